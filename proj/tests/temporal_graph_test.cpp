#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rpm/temporal_graph.hpp"

namespace rpm {
namespace {

TemporalNetwork parse(const std::string& text,
                      Directedness dir = Directedness::Undirected) {
  std::istringstream in(text);
  return parse_edge_list(in, EdgeListFormat{dir});
}

// Collects warnings for the lifetime of the object.
struct WarningCapture {
  std::vector<std::string> messages;
  std::function<void(std::string_view)> saved = warning_handler();
  WarningCapture() {
    warning_handler() = [this](std::string_view m) {
      messages.emplace_back(m);
    };
  }
  ~WarningCapture() { warning_handler() = saved; }
};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no rpm::Error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(EdgeList, ReadsThreeRecords) {
  const auto net = parse("a b 1\nb c 1\na c 2\n");
  EXPECT_EQ(net.num_nodes(), 3u);
  ASSERT_EQ(net.num_snapshots(), 2u);
  EXPECT_EQ(net.snapshot(1).edges.size(), 2u);
  EXPECT_EQ(net.snapshot(2).edges.size(), 1u);
  EXPECT_EQ(net.label(0), "a");
  EXPECT_EQ(net.label(2), "c");
}

TEST(EdgeList, EmptyInputIsAnError) {
  EXPECT_EQ(code_of([] { parse(""); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([] { parse("# only a comment\n\n"); }),
            ErrorCode::EmptyInput);
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  try {
    parse("a b x\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  try {
    parse("# header\na b 1\nc d\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(EdgeList, SnapshotIndexBelowOneRejected) {
  EXPECT_EQ(code_of([] { parse("a b 0\n"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse("a b -2\n"); }), ErrorCode::ParseError);
}

TEST(EdgeList, DuplicatesCollapseAndUndirectedIsCanonical) {
  const auto net = parse("a b 1\nb a 1\na b 1\n");
  EXPECT_EQ(net.snapshot(1).edges.size(), 1u);
  const auto directed = parse("a b 1\nb a 1\na b 1\n", Directedness::Directed);
  EXPECT_EQ(directed.snapshot(1).edges.size(), 2u);
}

TEST(EdgeList, GapsBecomeEmptySnapshots) {
  const auto net = parse("a b 1\nb c 3\n");
  ASSERT_EQ(net.num_snapshots(), 3u);
  EXPECT_TRUE(net.snapshot(2).edges.empty());
  EXPECT_EQ(net.snapshot(3).index, 3);
}

TEST(EdgeList, WeightColumnIgnoredWithWarning) {
  WarningCapture w;
  const auto net = parse("a b 1 0.5\nb c 1 2\n");
  EXPECT_EQ(net.snapshot(1).edges.size(), 2u);
  EXPECT_EQ(w.messages.size(), 1u);
}

TEST(EdgeList, RoundTripsEdgeSets) {
  std::mt19937_64 rng(7);
  std::ostringstream text;
  std::uniform_int_distribution<int> node(0, 19), snap(1, 6);
  for (int i = 0; i < 200; ++i)
    text << 'n' << node(rng) << " n" << node(rng) << ' ' << snap(rng) << '\n';
  const auto net = parse(text.str());
  std::ostringstream written;
  write_edge_list(written, net);
  const auto again = parse(written.str());
  ASSERT_EQ(again.num_snapshots(), net.num_snapshots());
  for (int t = 1; t <= static_cast<int>(net.num_snapshots()); ++t) {
    std::set<std::pair<std::string, std::string>> a, b;
    for (const auto& e : net.snapshot(t).edges)
      a.insert(std::minmax(net.label(e.src), net.label(e.dst)));
    for (const auto& e : again.snapshot(t).edges)
      b.insert(std::minmax(again.label(e.src), again.label(e.dst)));
    EXPECT_EQ(a, b) << "snapshot " << t;
  }
}

TEST(Frames, SixSnapshotsWindowTwo) {
  std::vector<std::vector<Edge>> snaps(6);
  const TemporalNetwork net(2, Directedness::Undirected, snaps);
  const auto fs = build_frames(net, 2, 3);
  ASSERT_EQ(fs.count(), 3u);
  EXPECT_EQ(fs.frames[0].first, 1);
  EXPECT_EQ(fs.frames[0].last, 2);
  EXPECT_EQ(fs.frames[1].first, 3);
  EXPECT_EQ(fs.frames[1].last, 4);
  EXPECT_EQ(fs.frames[2].first, 5);
  EXPECT_EQ(fs.frames[2].last, 6);
}

TEST(Frames, WindowOneIsIdentity) {
  const auto net = parse("a b 1\nb c 2\na c 3\nc d 3\n");
  const auto fs = build_frames(net, 1, 3);
  for (int t = 1; t <= 3; ++t)
    EXPECT_EQ(fs.frames[t - 1].graph.edges(), net.snapshot(t).edges);
}

TEST(Frames, UnionOfTwoSnapshots) {
  const auto net = parse("a b 1\nb c 2\n");
  const auto fs = build_frames(net, 2, 1);
  ASSERT_EQ(fs.count(), 1u);
  EXPECT_EQ(fs.frames[0].graph.num_edges(), 2u);
  EXPECT_TRUE(fs.frames[0].graph.has_edge(0, 1));
  EXPECT_TRUE(fs.frames[0].graph.has_edge(2, 1));
}

TEST(Frames, TooFewSnapshots) {
  const auto net = parse("a b 1\nb c 2\n");
  EXPECT_EQ(code_of([&] { build_frames(net, 2, 2); }),
            ErrorCode::NotEnoughSnapshots);
  EXPECT_EQ(code_of([&] { build_frames(net, 0, 1); }),
            ErrorCode::InvalidArgument);
}

TEST(Frames, TrailingSnapshotsWarn) {
  WarningCapture w;
  const auto net = parse("a b 1\nb c 2\na c 3\n");
  build_frames(net, 1, 2);
  EXPECT_EQ(w.messages.size(), 1u);
  build_frames(net, 1, 3);
  EXPECT_EQ(w.messages.size(), 1u);
}

TEST(Frames, MatchBruteForceUnionOnRandomNetworks) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    const int snaps = 1 + static_cast<int>(rng() % 10);
    const auto dir = trial % 2 ? Directedness::Directed : Directedness::Undirected;
    std::vector<std::vector<Edge>> edges(snaps);
    for (auto& s : edges) {
      const std::size_t m = rng() % (3 * n);
      for (std::size_t i = 0; i < m; ++i)
        s.push_back({static_cast<NodeId>(rng() % n),
                     static_cast<NodeId>(rng() % n)});
    }
    const TemporalNetwork net(n, dir, edges);
    const int w = 1 + static_cast<int>(rng() % snaps);
    const int count = snaps / w;
    WarningCapture quiet;
    const auto fs = build_frames(net, w, count);

    std::multiset<int> covered;
    for (int i = 0; i < count; ++i) {
      const auto& f = fs.frames[i];
      std::set<std::pair<NodeId, NodeId>> expect;
      for (int t = f.first; t <= f.last; ++t) {
        covered.insert(t);
        for (const auto& e : edges[t - 1]) {
          auto a = e.src, b = e.dst;
          if (dir == Directedness::Undirected && b < a) std::swap(a, b);
          expect.insert({a, b});
        }
      }
      std::set<std::pair<NodeId, NodeId>> got;
      for (const auto& e : f.graph.edges()) got.insert({e.src, e.dst});
      EXPECT_EQ(got, expect);
    }
    std::multiset<int> all;
    for (int t = 1; t <= count * w; ++t) all.insert(t);
    EXPECT_EQ(covered, all);
  }
}

TEST(Dynamics, HandExamples) {
  auto at2 = [](const std::string& text) {
    return snapshot_dynamics(parse(text + "x y 1\nx y 2\n"))[1];
  };
  const auto same = at2("a b 1\na b 2\n");
  EXPECT_EQ(same.added, 0u);
  EXPECT_EQ(same.dropped, 0u);
  const auto swap = at2("a b 1\nb c 2\n");
  EXPECT_EQ(swap.added, 1u);
  EXPECT_EQ(swap.dropped, 1u);

  // E_2 empty: only snapshot 1 has records, so build it directly.
  const TemporalNetwork net(3, Directedness::Undirected,
                            {{{0, 1}, {1, 2}}, {}});
  const auto d = snapshot_dynamics(net);
  EXPECT_EQ(d[0].added, 2u);
  EXPECT_EQ(d[0].dropped, 0u);
  EXPECT_EQ(d[1].added, 0u);
  EXPECT_EQ(d[1].dropped, 2u);
}

TEST(Dynamics, SingleSnapshotIsAnError) {
  EXPECT_EQ(code_of([] { snapshot_dynamics(parse("a b 1\n")); }),
            ErrorCode::NotEnoughSnapshots);
}

TEST(Dynamics, EdgeCountBalance) {
  std::mt19937_64 rng(3);
  std::vector<std::vector<Edge>> edges(12);
  for (auto& s : edges)
    for (int i = 0; i < 40; ++i)
      s.push_back({static_cast<NodeId>(rng() % 15),
                   static_cast<NodeId>(rng() % 15)});
  const TemporalNetwork net(15, Directedness::Undirected, edges);
  const auto d = snapshot_dynamics(net);
  for (std::size_t t = 1; t < d.size(); ++t) {
    EXPECT_EQ(net.snapshots()[t].edges.size(),
              net.snapshots()[t - 1].edges.size() + d[t].added - d[t].dropped);
  }
}

TEST(Neighbors, UndirectedAndDirected) {
  const Graph g(4, Directedness::Undirected, {{0, 1}, {0, 2}});
  const auto nb = g.neighbors(0);
  EXPECT_EQ(std::vector<NodeId>(nb.begin(), nb.end()),
            (std::vector<NodeId>{1, 2}));
  EXPECT_TRUE(g.neighbors(3).empty());

  const Graph d(3, Directedness::Directed, {{0, 1}, {2, 0}});
  const auto both = d.neighbors(0, NeighborMode::Union);
  EXPECT_EQ(std::vector<NodeId>(both.begin(), both.end()),
            (std::vector<NodeId>{1, 2}));
  const auto out = d.neighbors(0, NeighborMode::OutOnly);
  EXPECT_EQ(std::vector<NodeId>(out.begin(), out.end()),
            (std::vector<NodeId>{1}));
}

}  // namespace
}  // namespace rpm
