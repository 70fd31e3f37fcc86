#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rpm/rate_features.hpp"
#include "rpm/synthgen.hpp"

namespace rpm {
namespace {

// Mean observed new incident links per node per snapshot (snapshots 2..T),
// for hot and normal nodes.
std::pair<double, double> new_link_means(const SynthConfig& cfg) {
  const auto net = generate(cfg);
  const auto hot = hot_nodes(cfg);
  const auto fs = build_frames(net, 1, static_cast<int>(net.num_snapshots()));
  const auto series = build_all_rate_series(fs);
  double hot_sum = 0, normal_sum = 0, hot_n = 0, normal_n = 0;
  for (std::size_t x = 0; x < series.size(); ++x)
    for (std::size_t k = 1; k < series[x].size(); ++k) {
      (hot[x] ? hot_sum : normal_sum) += series[x][k];
      (hot[x] ? hot_n : normal_n) += 1;
    }
  return {hot_sum / hot_n, normal_sum / normal_n};
}

TEST(Synth, DeterministicGivenSeed) {
  SynthConfig cfg;
  cfg.num_nodes = 80;
  cfg.num_snapshots = 6;
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  for (int t = 1; t <= 6; ++t) EXPECT_EQ(a.snapshot(t).edges, b.snapshot(t).edges);
  cfg.seed = 2;
  EXPECT_NE(generate(cfg).snapshot(6).edges, a.snapshot(6).edges);
}

TEST(Synth, NoDynamicsMeansIdenticalSnapshots) {
  SynthConfig cfg;
  cfg.num_nodes = 50;
  cfg.num_snapshots = 5;
  cfg.churn = 0.0;
  cfg.base_rate = 0.0;
  const auto net = generate(cfg);
  for (int t = 2; t <= 5; ++t)
    EXPECT_EQ(net.snapshot(t).edges, net.snapshot(1).edges);
}

TEST(Synth, ZeroChurnOnlyGrows) {
  SynthConfig cfg;
  cfg.num_nodes = 50;
  cfg.num_snapshots = 5;
  cfg.churn = 0.0;
  const auto net = generate(cfg);
  for (int t = 2; t <= 5; ++t) {
    const auto& prev = net.snapshot(t - 1).edges;
    const auto& cur = net.snapshot(t).edges;
    EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    EXPECT_GT(cur.size(), prev.size());
  }
}

TEST(Synth, WellFormedEdgesAndChurn) {
  SynthConfig cfg;
  const auto net = generate(cfg);
  EXPECT_EQ(net.num_nodes(), 500u);
  EXPECT_EQ(net.num_snapshots(), 20u);
  EXPECT_EQ(net.directedness(), Directedness::Undirected);
  for (const auto& s : net.snapshots()) {
    EXPECT_TRUE(std::adjacent_find(s.edges.begin(), s.edges.end()) == s.edges.end());
    for (const auto& e : s.edges) {
      EXPECT_LT(e.src, e.dst);  // canonical, no self-loops
      EXPECT_LT(e.dst, 500u);
    }
  }
  const auto d = snapshot_dynamics(net);
  for (std::size_t t = 1; t < d.size(); ++t) {
    EXPECT_GT(d[t].added, 0u);
    EXPECT_GT(d[t].dropped, 0u);
  }
}

TEST(Synth, HotGroupSize) {
  SynthConfig cfg;
  const auto hot = hot_nodes(cfg);
  EXPECT_EQ(std::count(hot.begin(), hot.end(), true), 50);
}

TEST(Synth, EqualRatesAreIndistinguishable) {
  std::vector<double> diff;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthConfig cfg;
    cfg.hot_multiplier = 1.0;
    cfg.seed = seed;
    const auto [h, n] = new_link_means(cfg);
    diff.push_back(h - n);
  }
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / 20.0;
  double ss = 0;
  for (double v : diff) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / 19.0) / std::sqrt(20.0);
  EXPECT_LE(std::abs(mean), 3.0 * se);
}

TEST(Synth, HotNodesFormAtLeastThreeTimesAsManyLinks) {
  double hot = 0, normal = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    const auto [h, n] = new_link_means(cfg);
    hot += h;
    normal += n;
  }
  EXPECT_GE(hot / normal, 3.0);
}

TEST(Synth, InvalidConfig) {
  SynthConfig cfg;
  cfg.hot_fraction = 1.5;
  EXPECT_THROW(generate(cfg), Error);
  cfg = {};
  cfg.hot_multiplier = 0.5;
  EXPECT_THROW(generate(cfg), Error);
  cfg = {};
  cfg.churn = -0.1;
  EXPECT_THROW(generate(cfg), Error);
  cfg = {};
  cfg.base_rate = -1;
  EXPECT_THROW(generate(cfg), Error);
}

}  // namespace
}  // namespace rpm
