#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <unordered_set>
#include <vector>

#include "rpm/error.hpp"
#include "rpm/temporal_graph.hpp"

namespace rpm {

struct SynthConfig {
  std::size_t num_nodes = 500;
  int num_snapshots = 20;
  double base_rate = 1.0;  // expected new links sourced per node per snapshot
  double hot_fraction = 0.1;
  double hot_multiplier = 5.0;
  double churn = 0.3;  // per-snapshot drop probability of each edge
  std::uint64_t seed = 1;
};

inline void validate(const SynthConfig& cfg) {
  if (cfg.num_nodes == 0)
    throw Error(ErrorCode::InvalidArgument, "synthetic network needs nodes");
  if (cfg.num_snapshots < 1)
    throw Error(ErrorCode::InvalidArgument, "need at least one snapshot");
  if (!(cfg.base_rate >= 0.0) || !std::isfinite(cfg.base_rate))
    throw Error(ErrorCode::InvalidArgument, "base_rate must be >= 0");
  if (!(cfg.hot_fraction >= 0.0 && cfg.hot_fraction <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "hot_fraction must lie in [0, 1]");
  if (!(cfg.hot_multiplier >= 1.0) || !std::isfinite(cfg.hot_multiplier))
    throw Error(ErrorCode::InvalidArgument, "hot_multiplier must be >= 1");
  if (!(cfg.churn >= 0.0 && cfg.churn <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "churn must lie in [0, 1]");
}

namespace detail {

inline std::vector<bool> draw_hot_nodes(const SynthConfig& cfg,
                                        std::mt19937_64& rng) {
  std::vector<NodeId> order(cfg.num_nodes);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto hot_count = static_cast<std::size_t>(
      std::llround(cfg.hot_fraction * static_cast<double>(cfg.num_nodes)));
  std::vector<bool> hot(cfg.num_nodes, false);
  for (std::size_t i = 0; i < hot_count; ++i) hot[order[i]] = true;
  return hot;
}

inline std::uint64_t edge_key(NodeId a, NodeId b) {
  if (b < a) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace detail

/// Membership of the high-rate group that generate(cfg) uses.
inline std::vector<bool> hot_nodes(const SynthConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  return detail::draw_hot_nodes(cfg, rng);
}

/// Undirected network grown snapshot by snapshot: every existing edge is
/// dropped with probability `churn`, then each node sources Poisson(rate)
/// new links whose destinations are drawn with probability
/// proportional to degree + 1. Hot nodes have rate base_rate *
/// hot_multiplier. Snapshot 1 is one formation round on the empty graph.
inline TemporalNetwork generate(const SynthConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  const auto hot = detail::draw_hot_nodes(cfg, rng);
  const auto n = cfg.num_nodes;

  std::vector<double> rate(n);
  for (std::size_t i = 0; i < n; ++i)
    rate[i] = cfg.base_rate * (hot[i] ? cfg.hot_multiplier : 1.0);

  std::vector<Edge> edges;  // current edge set, kept sorted between rounds
  std::unordered_set<std::uint64_t> present;
  std::vector<std::vector<Edge>> snapshots;
  snapshots.reserve(cfg.num_snapshots);
  std::bernoulli_distribution drop(cfg.churn);
  constexpr int kMaxAttempts = 16;

  for (int t = 1; t <= cfg.num_snapshots; ++t) {
    if (t > 1) {
      std::vector<Edge> kept;
      kept.reserve(edges.size());
      for (const auto& e : edges) {
        if (drop(rng))
          present.erase(detail::edge_key(e.src, e.dst));
        else
          kept.push_back(e);
      }
      edges = std::move(kept);
    }

    // Urn with one ticket per node plus one per edge endpoint.
    std::vector<NodeId> urn(n);
    std::iota(urn.begin(), urn.end(), NodeId{0});
    for (const auto& e : edges) {
      urn.push_back(e.src);
      urn.push_back(e.dst);
    }

    for (NodeId src = 0; src < n; ++src) {
      if (rate[src] <= 0.0) continue;
      std::poisson_distribution<int> formations(rate[src]);
      const int k = formations(rng);
      for (int link = 0; link < k; ++link) {
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
          std::uniform_int_distribution<std::size_t> pick(0, urn.size() - 1);
          const NodeId dst = urn[pick(rng)];
          if (dst == src) continue;
          if (!present.insert(detail::edge_key(src, dst)).second) continue;
          edges.push_back({std::min(src, dst), std::max(src, dst)});
          urn.push_back(src);
          urn.push_back(dst);
          break;
        }
      }
    }
    std::sort(edges.begin(), edges.end());
    snapshots.push_back(edges);
  }
  return TemporalNetwork(n, Directedness::Undirected, std::move(snapshots));
}

}  // namespace rpm
