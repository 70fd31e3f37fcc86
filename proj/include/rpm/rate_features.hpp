#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rpm/error.hpp"
#include "rpm/forecasting.hpp"
#include "rpm/parallel.hpp"
#include "rpm/temporal_graph.hpp"
#include "rpm/topo_metrics.hpp"

namespace rpm {

enum class FeatureSetKind { RPM, Supervised, SupervisedMA };

inline std::string_view kind_name(FeatureSetKind kind) {
  switch (kind) {
    case FeatureSetKind::RPM: return "RPM";
    case FeatureSetKind::Supervised: return "Supervised";
    case FeatureSetKind::SupervisedMA: return "Supervised-MA";
  }
  return "?";
}

inline std::vector<std::string> feature_schema(FeatureSetKind kind) {
  switch (kind) {
    case FeatureSetKind::Supervised: return {"cn", "jc", "pa", "aa"};
    case FeatureSetKind::RPM:
      return {"cn", "jc", "pa", "aa", "rate_src", "rate_dst"};
    case FeatureSetKind::SupervisedMA: return {"cn_f", "jc_f", "pa_f", "aa_f"};
  }
  return {};
}

struct FeatureOptions {
  NeighborMode neighbor_mode = NeighborMode::Union;
  // Rate series also count incident edges that disappeared.
  bool count_deletions = false;
  // Topological features over the union of all history frames instead of
  // the last one.
  bool cumulative_graph = false;
  unsigned threads = 1;
};

/// Value copy of one dataset row.
struct LabeledPair {
  NodePair pair;
  std::vector<double> features;
  std::uint8_t label = 0;
};

/// Row-major feature matrix plus pair and label columns, sharing one schema.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::vector<std::string> schema, std::vector<NodePair> pairs,
          std::vector<double> values, std::vector<std::uint8_t> labels)
      : schema_(std::move(schema)),
        pairs_(std::move(pairs)),
        values_(std::move(values)),
        labels_(std::move(labels)) {
    if (labels_.size() != pairs_.size() ||
        values_.size() != pairs_.size() * schema_.size())
      throw Error(ErrorCode::SchemaMismatch,
                  "dataset columns have inconsistent lengths");
    for (auto y : labels_)
      if (y > 1)
        throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
  }

  std::size_t size() const noexcept { return pairs_.size(); }
  std::size_t num_features() const noexcept { return schema_.size(); }
  const std::vector<std::string>& schema() const noexcept { return schema_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * schema_.size(), schema_.size()};
  }
  NodePair pair(std::size_t i) const { return pairs_[i]; }
  std::uint8_t label(std::size_t i) const { return labels_[i]; }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }
  std::span<const double> values() const noexcept { return values_; }

  std::size_t positives() const {
    std::size_t n = 0;
    for (auto y : labels_) n += y;
    return n;
  }
  std::size_t negatives() const { return size() - positives(); }

  LabeledPair at(std::size_t i) const {
    const auto r = row(i);
    return {pairs_.at(i), {r.begin(), r.end()}, labels_.at(i)};
  }

 private:
  std::vector<std::string> schema_;
  std::vector<NodePair> pairs_;
  std::vector<double> values_;
  std::vector<std::uint8_t> labels_;
};

namespace detail {

// Adds one to each endpoint of `e` whose incident-edge set contains it.
inline void count_incident(const Edge& e, Directedness dir, NeighborMode mode,
                           std::vector<double>& counts) {
  counts[e.src] += 1.0;
  if (e.src == e.dst) return;
  if (dir == Directedness::Undirected || mode == NeighborMode::Union)
    counts[e.dst] += 1.0;
}

}  // namespace detail

/// Link-formation counts for every node: entry [x][k] is the number of
/// edges incident to x in frame k that were absent from frame k-1.
inline std::vector<std::vector<double>> build_all_rate_series(
    const FramedSeries& fs, const FeatureOptions& opts = {}) {
  if (fs.count() == 0)
    throw Error(ErrorCode::InsufficientHistory, "no frames to build rates from");
  const auto n = fs.num_nodes();
  const auto dir = fs.frames.front().graph.directedness();
  std::vector<std::vector<double>> series(n,
                                          std::vector<double>(fs.count(), 0.0));
  std::vector<double> counts(n);
  static const std::vector<Edge> kNone;
  for (std::size_t k = 0; k < fs.count(); ++k) {
    const auto& cur = fs.frames[k].graph.edges();
    const auto& prev = k == 0 ? kNone : fs.frames[k - 1].graph.edges();
    std::fill(counts.begin(), counts.end(), 0.0);
    for (const auto& e : detail::difference_sorted(cur, prev))
      detail::count_incident(e, dir, opts.neighbor_mode, counts);
    if (opts.count_deletions) {
      for (const auto& e : detail::difference_sorted(prev, cur))
        detail::count_incident(e, dir, opts.neighbor_mode, counts);
    }
    for (std::size_t x = 0; x < n; ++x) series[x][k] = counts[x];
  }
  return series;
}

inline std::vector<double> build_rate_series(const FramedSeries& fs,
                                             NodeId node,
                                             const FeatureOptions& opts = {}) {
  if (node >= fs.num_nodes())
    throw Error(ErrorCode::InvalidArgument, "node outside node universe");
  return std::move(build_all_rate_series(fs, opts)[node]);
}

/// One labeled row per ordered pair (x, y) over the node universe,
/// row-major, n^2 rows. Label is 1 iff (x, y) is an edge of `target`.
inline Dataset build_dataset(const FramedSeries& history, const Frame& target,
                             FeatureSetKind kind, const ForecastModel& model,
                             const FeatureOptions& opts = {}) {
  if (history.count() == 0)
    throw Error(ErrorCode::InsufficientHistory, "history has no frames");
  if (kind != FeatureSetKind::Supervised && history.count() < 2)
    throw Error(ErrorCode::InsufficientHistory,
                std::string(kind_name(kind)) +
                    " features need at least 2 history frames");
  const auto n = history.num_nodes();
  if (target.graph.num_nodes() != n)
    throw Error(ErrorCode::NodeUniverseMismatch,
                "target frame and history disagree on node count");
  if (history.frames.back().last >= target.first)
    throw Error(ErrorCode::InvalidArgument,
                "history frames must strictly precede the target frame");
  validate(model);

  const auto& last = history.frames.back().graph;
  Graph cumulative;
  const Graph* base = &last;
  if (opts.cumulative_graph && history.count() > 1) {
    std::vector<Edge> all;
    for (const auto& f : history.frames)
      all = detail::union_sorted(all, f.graph.edges());
    cumulative = Graph(n, last.directedness(), std::move(all));
    base = &cumulative;
  }

  auto schema = feature_schema(kind);
  const auto d = schema.size();
  const auto rows = n * n;
  std::vector<NodePair> pairs(rows);
  std::vector<double> values(rows * d);
  std::vector<std::uint8_t> labels(rows, 0);

  for (const auto& e : target.graph.edges()) {
    labels[static_cast<std::size_t>(e.src) * n + e.dst] = 1;
    if (target.graph.directedness() == Directedness::Undirected)
      labels[static_cast<std::size_t>(e.dst) * n + e.src] = 1;
  }

  std::vector<double> rate;
  if (kind == FeatureSetKind::RPM) {
    const auto series = build_all_rate_series(history, opts);
    rate.resize(n);
    for (std::size_t x = 0; x < n; ++x) rate[x] = forecast(model, series[x]);
  }

  if (kind == FeatureSetKind::SupervisedMA) {
    std::vector<PairScorer> scorers;
    scorers.reserve(history.count());
    for (const auto& f : history.frames)
      scorers.emplace_back(f.graph, opts.neighbor_mode);
    const auto frames = history.count();
    parallel_for(n, opts.threads, [&](std::size_t xi) {
      const auto x = static_cast<NodeId>(xi);
      std::vector<double> cn(frames), jc(frames), pa(frames), aa(frames);
      for (NodeId y = 0; y < n; ++y) {
        for (std::size_t k = 0; k < frames; ++k) {
          const auto v = scorers[k](x, y);
          cn[k] = v.cn;
          jc[k] = v.jc;
          pa[k] = v.pa;
          aa[k] = v.aa;
        }
        const auto r = xi * n + y;
        pairs[r] = {x, y};
        double* out = values.data() + r * d;
        out[0] = forecast(model, cn);
        out[1] = forecast(model, jc);
        out[2] = forecast(model, pa);
        out[3] = forecast(model, aa);
      }
    });
  } else {
    const PairScorer scorer(*base, opts.neighbor_mode);
    parallel_for(n, opts.threads, [&](std::size_t xi) {
      const auto x = static_cast<NodeId>(xi);
      for (NodeId y = 0; y < n; ++y) {
        const auto r = xi * n + y;
        const auto v = scorer(x, y);
        pairs[r] = {x, y};
        double* out = values.data() + r * d;
        out[0] = v.cn;
        out[1] = v.jc;
        out[2] = v.pa;
        out[3] = v.aa;
        if (kind == FeatureSetKind::RPM) {
          out[4] = rate[x];
          out[5] = rate[y];
        }
      }
    });
  }

  return Dataset(std::move(schema), std::move(pairs), std::move(values),
                 std::move(labels));
}

}  // namespace rpm
