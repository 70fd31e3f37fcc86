#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpm/error.hpp"
#include "rpm/parallel.hpp"
#include "rpm/temporal_graph.hpp"

namespace rpm {

enum class MetricKind {
  CommonNeighbors,
  PreferentialAttachment,
  JaccardCoefficient,
  AdamicAdar
};

inline std::string_view metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::CommonNeighbors: return "cn";
    case MetricKind::PreferentialAttachment: return "pa";
    case MetricKind::JaccardCoefficient: return "jc";
    case MetricKind::AdamicAdar: return "aa";
  }
  return "?";
}

struct NodePair {
  NodeId src = 0;
  NodeId dst = 0;

  friend bool operator==(const NodePair&, const NodePair&) = default;
};

struct PairScore {
  NodePair pair;
  double value = 0.0;
};

/// Every ordered pair (x, y) over [0, n), self-pairs included, row-major.
inline std::vector<NodePair> all_ordered_pairs(std::size_t num_nodes) {
  std::vector<NodePair> pairs;
  pairs.reserve(num_nodes * num_nodes);
  for (NodeId x = 0; x < num_nodes; ++x)
    for (NodeId y = 0; y < num_nodes; ++y) pairs.push_back({x, y});
  return pairs;
}

// 1/ln|Γ(z)|, or 0 when |Γ(z)| <= 1 (the term is skipped).
inline double adamic_adar_weight(std::size_t degree) {
  return degree > 1 ? 1.0 / std::log(static_cast<double>(degree)) : 0.0;
}

inline std::size_t common_neighbors(const Graph& g, NodeId x, NodeId y,
                                    NeighborMode mode = NeighborMode::Union) {
  const auto a = g.neighbors(x, mode);
  const auto b = g.neighbors(y, mode);
  std::size_t count = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

inline std::size_t preferential_attachment(
    const Graph& g, NodeId x, NodeId y,
    NeighborMode mode = NeighborMode::Union) {
  return g.degree(x, mode) * g.degree(y, mode);
}

/// |Γ(x) ∩ Γ(y)| / |Γ(x) ∪ Γ(y)|, with 0/0 taken as 0.
inline double jaccard(const Graph& g, NodeId x, NodeId y,
                      NeighborMode mode = NeighborMode::Union) {
  const auto common = common_neighbors(g, x, y, mode);
  const auto total = g.degree(x, mode) + g.degree(y, mode) - common;
  return total == 0 ? 0.0
                    : static_cast<double>(common) / static_cast<double>(total);
}

inline double adamic_adar(const Graph& g, NodeId x, NodeId y,
                          NeighborMode mode = NeighborMode::Union) {
  const auto a = g.neighbors(x, mode);
  const auto b = g.neighbors(y, mode);
  double sum = 0.0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      sum += adamic_adar_weight(g.degree(a[i], mode));
      ++i;
      ++j;
    }
  }
  return sum;
}

struct MetricValues {
  double cn = 0.0;
  double jc = 0.0;
  double pa = 0.0;
  double aa = 0.0;

  double get(MetricKind kind) const {
    switch (kind) {
      case MetricKind::CommonNeighbors: return cn;
      case MetricKind::PreferentialAttachment: return pa;
      case MetricKind::JaccardCoefficient: return jc;
      case MetricKind::AdamicAdar: return aa;
    }
    return 0.0;
  }
};

/// Scores all four metrics for many pairs of one graph with a single
/// neighbour-list merge per pair. Values are bitwise identical to the
/// single-pair functions.
class PairScorer {
 public:
  explicit PairScorer(const Graph& g, NeighborMode mode = NeighborMode::Union)
      : graph_(&g), mode_(mode), aa_weight_(g.num_nodes()) {
    for (NodeId z = 0; z < g.num_nodes(); ++z)
      aa_weight_[z] = adamic_adar_weight(g.degree(z, mode));
  }

  MetricValues operator()(NodeId x, NodeId y) const {
    const auto a = graph_->neighbors(x, mode_);
    const auto b = graph_->neighbors(y, mode_);
    std::size_t common = 0;
    double aa = 0.0;
    for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
      if (a[i] < b[j]) {
        ++i;
      } else if (b[j] < a[i]) {
        ++j;
      } else {
        ++common;
        aa += aa_weight_[a[i]];
        ++i;
        ++j;
      }
    }
    const auto total = a.size() + b.size() - common;
    MetricValues v;
    v.cn = static_cast<double>(common);
    v.jc = total == 0 ? 0.0
                      : static_cast<double>(common) /
                            static_cast<double>(total);
    v.pa = static_cast<double>(a.size() * b.size());
    v.aa = aa;
    return v;
  }

  const Graph& graph() const noexcept { return *graph_; }
  NeighborMode mode() const noexcept { return mode_; }

 private:
  const Graph* graph_;
  NeighborMode mode_;
  std::vector<double> aa_weight_;
};

/// One score per input pair, in input order.
inline std::vector<PairScore> score_all_pairs(
    const Graph& g, MetricKind kind, std::span<const NodePair> pairs,
    NeighborMode mode = NeighborMode::Union, unsigned threads = 1) {
  for (const auto& p : pairs) {
    if (p.src >= g.num_nodes() || p.dst >= g.num_nodes())
      throw Error(ErrorCode::InvalidArgument, "pair outside node universe");
  }
  const PairScorer scorer(g, mode);
  std::vector<PairScore> out(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    out[i] = {pairs[i], scorer(pairs[i].src, pairs[i].dst).get(kind)};
  });
  return out;
}

}  // namespace rpm
