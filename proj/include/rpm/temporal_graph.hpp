#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rpm/error.hpp"

namespace rpm {

using NodeId = std::uint32_t;

enum class Directedness { Undirected, Directed };

// Which incident edges form a node's neighbourhood in directed graphs.
// Undirected graphs ignore this.
enum class NeighborMode { Union, OutOnly };

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

namespace detail {

// Sorted, de-duplicated, and (for undirected graphs) canonicalized to
// src <= dst.
inline std::vector<Edge> normalize_edges(std::vector<Edge> edges,
                                         Directedness dir) {
  if (dir == Directedness::Undirected) {
    for (auto& e : edges)
      if (e.dst < e.src) std::swap(e.src, e.dst);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

inline std::vector<Edge> union_sorted(const std::vector<Edge>& a,
                                      const std::vector<Edge>& b) {
  std::vector<Edge> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

inline std::vector<Edge> difference_sorted(const std::vector<Edge>& a,
                                           const std::vector<Edge>& b) {
  std::vector<Edge> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

// Compressed adjacency: offsets into a flat target array.
struct Csr {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> targets;

  std::span<const NodeId> row(NodeId x) const {
    return {targets.data() + offsets[x], offsets[x + 1] - offsets[x]};
  }
};

}  // namespace detail

/// Immutable static graph over a fixed node universe, with sorted
/// neighbour lists for out- and union adjacency.
class Graph {
 public:
  Graph() = default;

  Graph(std::size_t num_nodes, Directedness dir, std::vector<Edge> edges)
      : num_nodes_(num_nodes),
        dir_(dir),
        edges_(detail::normalize_edges(std::move(edges), dir)) {
    for (const auto& e : edges_) {
      if (e.src >= num_nodes_ || e.dst >= num_nodes_)
        throw Error(ErrorCode::InvalidArgument,
                    "edge endpoint outside node universe");
    }
    std::vector<std::pair<NodeId, NodeId>> out_arcs, all_arcs;
    out_arcs.reserve(edges_.size());
    all_arcs.reserve(2 * edges_.size());
    for (const auto& e : edges_) {
      out_arcs.emplace_back(e.src, e.dst);
      all_arcs.emplace_back(e.src, e.dst);
      if (e.src != e.dst) all_arcs.emplace_back(e.dst, e.src);
    }
    all_ = pack(all_arcs);
    if (dir_ == Directedness::Directed) {
      out_ = pack(out_arcs);
    }
  }

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  Directedness directedness() const noexcept { return dir_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  /// Γ(x). Undirected: all incident nodes. Directed: in ∪ out, or out only.
  std::span<const NodeId> neighbors(NodeId x,
                                    NeighborMode mode = NeighborMode::Union)
      const {
    if (dir_ == Directedness::Directed && mode == NeighborMode::OutOnly)
      return out_.row(x);
    return all_.row(x);
  }

  std::size_t degree(NodeId x, NeighborMode mode = NeighborMode::Union) const {
    return neighbors(x, mode).size();
  }

  bool has_edge(NodeId x, NodeId y) const {
    Edge e{x, y};
    if (dir_ == Directedness::Undirected && y < x) e = {y, x};
    return std::binary_search(edges_.begin(), edges_.end(), e);
  }

 private:
  detail::Csr pack(const std::vector<std::pair<NodeId, NodeId>>& arcs) const {
    auto sorted = arcs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    detail::Csr csr;
    csr.offsets.assign(num_nodes_ + 1, 0);
    for (const auto& arc : sorted) ++csr.offsets[arc.first + 1];
    for (std::size_t i = 0; i < num_nodes_; ++i)
      csr.offsets[i + 1] += csr.offsets[i];
    csr.targets.reserve(sorted.size());
    for (const auto& arc : sorted) csr.targets.push_back(arc.second);
    return csr;
  }

  std::size_t num_nodes_ = 0;
  Directedness dir_ = Directedness::Undirected;
  std::vector<Edge> edges_;
  detail::Csr all_;
  detail::Csr out_;
};

struct Snapshot {
  int index = 0;  // 1-based time index
  std::vector<Edge> edges;
};

/// Ordered snapshots over a shared node universe. Snapshot t is stored at
/// position t-1; edge lists are normalized on construction.
class TemporalNetwork {
 public:
  TemporalNetwork() = default;

  TemporalNetwork(std::size_t num_nodes, Directedness dir,
                  std::vector<std::vector<Edge>> snapshot_edges,
                  std::vector<std::string> labels = {})
      : num_nodes_(num_nodes), dir_(dir), labels_(std::move(labels)) {
    if (!labels_.empty() && labels_.size() != num_nodes_)
      throw Error(ErrorCode::InvalidArgument,
                  "label table size does not match node count");
    snapshots_.reserve(snapshot_edges.size());
    int t = 1;
    for (auto& edges : snapshot_edges) {
      Snapshot snap{t++, detail::normalize_edges(std::move(edges), dir)};
      for (const auto& e : snap.edges) {
        if (e.src >= num_nodes_ || e.dst >= num_nodes_)
          throw Error(ErrorCode::InvalidArgument,
                      "edge endpoint outside node universe");
      }
      snapshots_.push_back(std::move(snap));
    }
  }

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  Directedness directedness() const noexcept { return dir_; }
  std::size_t num_snapshots() const noexcept { return snapshots_.size(); }
  const std::vector<Snapshot>& snapshots() const noexcept {
    return snapshots_;
  }
  /// 1-based.
  const Snapshot& snapshot(int t) const { return snapshots_.at(t - 1); }

  std::string label(NodeId x) const {
    return labels_.empty() ? std::to_string(x) : labels_.at(x);
  }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::size_t num_nodes_ = 0;
  Directedness dir_ = Directedness::Undirected;
  std::vector<Snapshot> snapshots_;
  std::vector<std::string> labels_;
};

/// Union graph of w consecutive snapshots, spanning [first, last].
struct Frame {
  int first = 0;
  int last = 0;
  Graph graph;
};

struct FramedSeries {
  std::vector<Frame> frames;
  int window = 0;

  std::size_t count() const noexcept { return frames.size(); }
  std::size_t num_nodes() const {
    return frames.empty() ? 0 : frames.front().graph.num_nodes();
  }
};

inline Frame make_frame(const TemporalNetwork& net, int first, int last) {
  std::vector<Edge> edges;
  for (int t = first; t <= last; ++t)
    edges = detail::union_sorted(edges, net.snapshot(t).edges);
  return Frame{first, last,
               Graph(net.num_nodes(), net.directedness(), std::move(edges))};
}

/// Frame i (1-based) covers snapshots (i-1)w+1 .. iw. Snapshots past n*w
/// are left out with a warning.
inline FramedSeries build_frames(const TemporalNetwork& net, int window,
                                 int count) {
  if (window < 1 || count < 1)
    throw Error(ErrorCode::InvalidArgument,
                "frame window and count must be >= 1");
  const auto needed = static_cast<std::size_t>(window) * count;
  if (needed > net.num_snapshots())
    throw Error(ErrorCode::NotEnoughSnapshots,
                "framing needs " + std::to_string(needed) +
                    " snapshots, network has " +
                    std::to_string(net.num_snapshots()));
  if (needed < net.num_snapshots())
    warn("dropping " + std::to_string(net.num_snapshots() - needed) +
         " trailing snapshot(s) beyond frame coverage");

  FramedSeries fs;
  fs.window = window;
  fs.frames.reserve(count);
  for (int i = 1; i <= count; ++i)
    fs.frames.push_back(make_frame(net, (i - 1) * window + 1, i * window));
  return fs;
}

struct SnapshotChurn {
  int t = 0;
  std::size_t added = 0;
  std::size_t dropped = 0;
};

inline std::vector<SnapshotChurn> snapshot_dynamics(
    const TemporalNetwork& net) {
  if (net.num_snapshots() < 2)
    throw Error(ErrorCode::NotEnoughSnapshots,
                "snapshot dynamics need at least 2 snapshots");
  std::vector<SnapshotChurn> out;
  const auto& snaps = net.snapshots();
  out.push_back({1, snaps[0].edges.size(), 0});
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    const auto& prev = snaps[i - 1].edges;
    const auto& cur = snaps[i].edges;
    out.push_back({snaps[i].index,
                   detail::difference_sorted(cur, prev).size(),
                   detail::difference_sorted(prev, cur).size()});
  }
  return out;
}

struct EdgeListFormat {
  Directedness directedness = Directedness::Undirected;
};

/// Whitespace-separated `src dst snapshot [weight]` records; `#` starts a
/// comment line. Labels are interned in order of first appearance.
/// Snapshot indices missing from the file become empty snapshots.
inline TemporalNetwork parse_edge_list(std::istream& in,
                                       const EdgeListFormat& format = {}) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<std::vector<Edge>> snaps;
  bool any_record = false;
  bool weight_warned = false;

  auto intern = [&](const std::string& label) {
    auto [it, inserted] =
        ids.try_emplace(label, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;

    std::istringstream fields(line);
    std::string src, dst, time_field, extra;
    if (!(fields >> src >> dst >> time_field))
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) +
                      ": expected `src dst snapshot`");
    long long t = 0;
    std::size_t consumed = 0;
    try {
      t = std::stoll(time_field, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed != time_field.size() || consumed == 0)
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) +
                      ": snapshot index `" + time_field +
                      "` is not an integer");
    if (t < 1)
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) +
                      ": snapshot index must be >= 1");
    if (fields >> extra && !weight_warned) {
      warn("edge weights are ignored (first seen on line " +
           std::to_string(line_no) + ")");
      weight_warned = true;
    }

    const NodeId u = intern(src);
    const NodeId v = intern(dst);
    if (static_cast<std::size_t>(t) > snaps.size()) snaps.resize(t);
    snaps[t - 1].push_back({u, v});
    any_record = true;
  }
  if (!any_record) throw Error(ErrorCode::EmptyInput, "edge list is empty");

  const auto n = labels.size();
  return TemporalNetwork(n, format.directedness, std::move(snaps),
                         std::move(labels));
}

inline TemporalNetwork load_edge_list(const std::string& path,
                                      const EdgeListFormat& format = {}) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  return parse_edge_list(in, format);
}

/// Inverse of parse_edge_list. Nodes with no edges at all are not
/// representable in the format and vanish on reload.
inline void write_edge_list(std::ostream& out, const TemporalNetwork& net) {
  for (const auto& snap : net.snapshots())
    for (const auto& e : snap.edges)
      out << net.label(e.src) << ' ' << net.label(e.dst) << ' ' << snap.index
          << '\n';
}

}  // namespace rpm
