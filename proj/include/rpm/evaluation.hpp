#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"
#include "rpm/classifier.hpp"
#include "rpm/error.hpp"
#include "rpm/forecasting.hpp"
#include "rpm/parallel.hpp"
#include "rpm/rate_features.hpp"
#include "rpm/temporal_graph.hpp"
#include "rpm/topo_metrics.hpp"

namespace rpm {

struct RocResult {
  double auroc = 0.5;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// Probability that a random positive outscores a random negative, ties
/// counted 1/2. Computed from midranks in exact integer arithmetic.
inline RocResult auroc(std::span<const double> scores,
                       std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size())
    throw Error(ErrorCode::LengthMismatch,
                "scores and labels differ in length");
  std::size_t pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1)
      throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    if (std::isnan(scores[i]))
      throw Error(ErrorCode::InvalidArgument, "NaN score at index " +
                                                  std::to_string(i));
    pos += labels[i];
  }
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0)
    throw Error(ErrorCode::SingleClass, "AUROC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Twice the positive rank sum: a tie block over ranks i+1..j has
  // midrank (i+1+j)/2.
  unsigned long long rank_sum_x2 = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    std::size_t block_pos = 0;
    for (std::size_t k = i; k < j; ++k) block_pos += labels[order[k]];
    rank_sum_x2 += static_cast<unsigned long long>(block_pos) * (i + 1 + j);
    i = j;
  }
  const unsigned long long u_x2 =
      rank_sum_x2 - static_cast<unsigned long long>(pos) * (pos + 1);
  const double area = static_cast<double>(u_x2) /
                      (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return {area, pos, neg};
}

/// Fold index in [0, k) for every row. Each class is shuffled with `seed`
/// and dealt round-robin, continuing the deal across classes, so per-class
/// fold counts differ by at most one.
inline std::vector<int> stratified_kfold(std::span<const std::uint8_t> labels,
                                         int k, std::uint64_t seed) {
  if (k < 2)
    throw Error(ErrorCode::InvalidArgument,
                "cross-validation needs at least 2 folds");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1)
      throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
    by_class[labels[i]].push_back(i);
  }
  for (const auto& members : by_class) {
    if (members.size() < static_cast<std::size_t>(k))
      throw Error(ErrorCode::InvalidArgument,
                  "a class has fewer members than folds");
  }

  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), -1);
  std::size_t deal = 0;
  for (int cls : {1, 0}) {
    auto members = by_class[cls];
    std::shuffle(members.begin(), members.end(), rng);
    for (auto row : members) fold[row] = static_cast<int>(deal++ % k);
  }
  return fold;
}

namespace detail {

inline std::vector<std::uint8_t> pair_labels(const Graph& target) {
  const auto n = target.num_nodes();
  std::vector<std::uint8_t> labels(n * n, 0);
  for (const auto& e : target.edges()) {
    labels[static_cast<std::size_t>(e.src) * n + e.dst] = 1;
    if (target.directedness() == Directedness::Undirected)
      labels[static_cast<std::size_t>(e.dst) * n + e.src] = 1;
  }
  return labels;
}

}  // namespace detail

/// AUROC of a raw metric over every ordered pair against the target edges.
inline RocResult unsupervised_auroc(const Graph& g, const Frame& target,
                                    MetricKind kind,
                                    NeighborMode mode = NeighborMode::Union,
                                    unsigned threads = 1) {
  const auto n = g.num_nodes();
  if (target.graph.num_nodes() != n)
    throw Error(ErrorCode::NodeUniverseMismatch,
                "target frame and graph disagree on node count");
  const PairScorer scorer(g, mode);
  std::vector<double> scores(n * n);
  parallel_for(n, threads, [&](std::size_t x) {
    for (std::size_t y = 0; y < n; ++y)
      scores[x * n + y] =
          scorer(static_cast<NodeId>(x), static_cast<NodeId>(y)).get(kind);
  });
  const auto labels = detail::pair_labels(target.graph);
  return auroc(scores, labels);
}

/// Two-tailed p-value of the paired Student t statistic on a - b.
/// All-zero differences give 1; zero variance with nonzero mean gives 0.
inline double paired_t_test(std::span<const double> a,
                            std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch, "paired samples differ in length");
  if (a.size() < 2)
    throw Error(ErrorCode::InvalidArgument,
                "paired t-test needs at least 2 pairs");
  const auto m = static_cast<double>(a.size());
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / m;
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (m - 1.0));
  if (sd == 0.0) return mean == 0.0 ? 1.0 : 0.0;
  const double t = mean / (sd / std::sqrt(m));
  const boost::math::students_t dist(m - 1.0);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(
                                 dist, std::abs(t))));
}

enum class Method { RPM, SupervisedMA, Supervised, CN, JC, PA, AA };

inline constexpr Method kAllMethods[] = {Method::RPM, Method::SupervisedMA,
                                         Method::Supervised, Method::CN,
                                         Method::JC,  Method::PA,
                                         Method::AA};

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::RPM: return "RPM";
    case Method::SupervisedMA: return "Supervised-MA";
    case Method::Supervised: return "Supervised";
    case Method::CN: return "CN";
    case Method::JC: return "JC";
    case Method::PA: return "PA";
    case Method::AA: return "AA";
  }
  return "?";
}

inline Method parse_method(std::string_view name) {
  for (auto m : kAllMethods)
    if (method_name(m) == name) return m;
  throw Error(ErrorCode::InvalidArgument,
              "unknown method `" + std::string(name) + "`");
}

inline std::optional<FeatureSetKind> supervised_kind(Method m) {
  switch (m) {
    case Method::RPM: return FeatureSetKind::RPM;
    case Method::SupervisedMA: return FeatureSetKind::SupervisedMA;
    case Method::Supervised: return FeatureSetKind::Supervised;
    default: return std::nullopt;
  }
}

inline MetricKind metric_of(Method m) {
  switch (m) {
    case Method::CN: return MetricKind::CommonNeighbors;
    case Method::JC: return MetricKind::JaccardCoefficient;
    case Method::PA: return MetricKind::PreferentialAttachment;
    case Method::AA: return MetricKind::AdamicAdar;
    default:
      throw Error(ErrorCode::InvalidArgument,
                  std::string(method_name(m)) + " is not a raw metric");
  }
}

struct ExperimentConfig {
  int window = 1;          // w, snapshots per frame
  int history_frames = 3;  // n, frames feeding each prediction
  int target_frame = 0;    // first target frame; 0 means history_frames + 1
  int num_targets = 1;     // consecutive targets (the snapshot axis)
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::string rate_model = "wma:0.2,0.3,0.5";  // "auto" runs select_model
  std::string metric_model = "ma:3";           // Supervised-MA forecaster
  TrainConfig train;
  int folds = 10;
  int repeats = 10;
  std::uint64_t seed = 1;
  FeatureOptions features;

  int first_target() const {
    return target_frame > 0 ? target_frame : history_frames + 1;
  }
  /// Seed of repeat r: drives fold assignment and training shuffles.
  std::uint64_t repeat_seed(int r) const {
    return seed + static_cast<std::uint64_t>(r);
  }
};

inline void validate(const ExperimentConfig& cfg) {
  auto bad = [](const std::string& field, const std::string& why) {
    return Error(ErrorCode::InvalidArgument, field + ": " + why);
  };
  if (cfg.window < 1) throw bad("window", "must be >= 1");
  if (cfg.history_frames < 1) throw bad("history_frames", "must be >= 1");
  if (cfg.target_frame != 0 && cfg.target_frame <= cfg.history_frames)
    throw bad("target_frame", "must leave history_frames frames before it");
  if (cfg.num_targets < 1) throw bad("num_targets", "must be >= 1");
  if (cfg.methods.empty()) throw bad("methods", "must not be empty");
  if (cfg.folds < 2) throw bad("folds", "must be >= 2");
  if (cfg.repeats < 1) throw bad("repeats", "must be >= 1");
  if (cfg.rate_model != "auto") parse_model(cfg.rate_model);
  parse_model(cfg.metric_model);
  validate(cfg.train);
  for (auto m : cfg.methods) {
    if (m != Method::Supervised && supervised_kind(m) &&
        cfg.history_frames < 2)
      throw bad("history_frames",
                std::string(method_name(m)) + " needs at least 2");
  }
}

struct MethodResult {
  Method method = Method::RPM;
  // runs[target][repeat * folds + fold]
  std::vector<std::vector<double>> runs;
  std::vector<double> target_means;
  double mean = 0.0;
  double stddev = 0.0;
};

struct TTestResult {
  Method method = Method::Supervised;  // compared against RPM
  std::string axis;                    // "snapshots" or "runs"
  double p_value = 1.0;
};

struct ExperimentReport {
  std::vector<int> targets;
  std::string rate_model;  // resolved, never "auto"
  std::size_t num_pairs = 0;
  std::vector<std::size_t> positives;  // per target
  std::vector<MethodResult> methods;
  std::vector<TTestResult> t_tests;

  const MethodResult* find(Method m) const {
    for (const auto& r : methods)
      if (r.method == m) return &r;
    return nullptr;
  }
};

namespace detail {

struct Split {
  FramedSeries history;
  Frame target;
};

inline Split make_split(const FramedSeries& all, int target_frame,
                        int history_frames) {
  Split s;
  s.history.window = all.window;
  for (int f = target_frame - history_frames; f < target_frame; ++f)
    s.history.frames.push_back(all.frames[f - 1]);
  s.target = all.frames[target_frame - 1];
  return s;
}

inline double mean_of_runs(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

// Per-fold AUROC of a classifier trained on the other folds.
inline std::vector<double> cross_validate(const Dataset& data,
                                          std::span<const int> fold_of,
                                          int folds, TrainConfig train_cfg,
                                          unsigned threads) {
  std::vector<double> out(folds);
  parallel_for(static_cast<std::size_t>(folds), threads, [&](std::size_t f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < data.size(); ++i)
      (fold_of[i] == static_cast<int>(f) ? test_rows : train_rows).push_back(i);
    const auto model = train(data, train_rows, train_cfg);
    std::vector<double> scores(test_rows.size());
    std::vector<std::uint8_t> labels(test_rows.size());
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      scores[i] = decision_score(model, data.row(test_rows[i]));
      labels[i] = data.label(test_rows[i]);
    }
    out[f] = auroc(scores, labels).auroc;
  });
  return out;
}

}  // namespace detail

/// Mean cross-validated AUROC of one feature set on one split.
inline double cv_auroc(const Dataset& data, const ExperimentConfig& cfg,
                       int repeats) {
  double total = 0.0;
  for (int r = 0; r < repeats; ++r) {
    const auto fold_of =
        stratified_kfold(data.labels(), cfg.folds, cfg.repeat_seed(r));
    auto train_cfg = cfg.train;
    train_cfg.seed = cfg.repeat_seed(r);
    const auto aucs = detail::cross_validate(data, fold_of, cfg.folds,
                                             train_cfg, cfg.features.threads);
    total += detail::mean_of_runs(aucs);
  }
  return total / repeats;
}

/// Rate model used by RPM. "auto" scores every default candidate by the
/// cross-validated AUROC of RPM on a training split: the last history
/// frame of the first target becomes the target, the frames before it the
/// history. The test target never influences the choice.
inline ForecastModel resolve_rate_model(const FramedSeries& all,
                                        const ExperimentConfig& cfg) {
  if (cfg.rate_model != "auto") return parse_model(cfg.rate_model);
  const int train_target = cfg.first_target() - 1;
  const int train_history = cfg.history_frames - 1;
  if (train_history < 2)
    throw Error(ErrorCode::InsufficientHistory,
                "rate model selection needs history_frames >= 3");
  const auto split = detail::make_split(all, train_target, train_history);
  const auto candidates = default_candidates();
  return select_model(candidates, [&](const ForecastModel& m) {
    const auto data = build_dataset(split.history, split.target,
                                    FeatureSetKind::RPM, m, cfg.features);
    return cv_auroc(data, cfg, 1);
  });
}

/// Cross-validated comparison of the supervised feature sets and the raw
/// metrics over one or more consecutive target frames.
inline ExperimentReport run_experiment(const TemporalNetwork& net,
                                       const ExperimentConfig& cfg) {
  validate(cfg);
  const int first = cfg.first_target();
  const int last = first + cfg.num_targets - 1;
  if (static_cast<std::size_t>(last) * cfg.window > net.num_snapshots())
    throw Error(ErrorCode::InsufficientHistory,
                "network has " + std::to_string(net.num_snapshots()) +
                    " snapshots; targets up to frame " + std::to_string(last) +
                    " with window " + std::to_string(cfg.window) + " need " +
                    std::to_string(last * cfg.window));
  const auto all = build_frames(net, cfg.window, last);

  ExperimentReport report;
  const auto rate_model = resolve_rate_model(all, cfg);
  const auto metric_model = parse_model(cfg.metric_model);
  report.rate_model = to_string(rate_model);
  report.num_pairs = net.num_nodes() * net.num_nodes();

  const int runs_per_target = cfg.folds * cfg.repeats;
  for (auto m : cfg.methods) {
    MethodResult r;
    r.method = m;
    r.runs.assign(cfg.num_targets, std::vector<double>(runs_per_target, 0.0));
    report.methods.push_back(std::move(r));
  }

  for (int ti = 0; ti < cfg.num_targets; ++ti) {
    const int target = first + ti;
    report.targets.push_back(target);
    const auto split = detail::make_split(all, target, cfg.history_frames);
    const auto labels = detail::pair_labels(split.target.graph);
    report.positives.push_back(static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), std::uint8_t{1})));

    std::vector<std::vector<int>> fold_of(cfg.repeats);
    bool folds_ready = false;

    for (auto& result : report.methods) {
      const auto method = result.method;
      try {
        if (auto kind = supervised_kind(method)) {
          const auto& model = *kind == FeatureSetKind::SupervisedMA
                                  ? metric_model
                                  : rate_model;
          const auto data = build_dataset(split.history, split.target, *kind,
                                          model, cfg.features);
          if (!folds_ready) {
            for (int r = 0; r < cfg.repeats; ++r)
              fold_of[r] = stratified_kfold(data.labels(), cfg.folds,
                                            cfg.repeat_seed(r));
            folds_ready = true;
          }
          for (int r = 0; r < cfg.repeats; ++r) {
            auto train_cfg = cfg.train;
            train_cfg.seed = cfg.repeat_seed(r);
            const auto aucs =
                detail::cross_validate(data, fold_of[r], cfg.folds, train_cfg,
                                       cfg.features.threads);
            std::copy(aucs.begin(), aucs.end(),
                      result.runs[ti].begin() + r * cfg.folds);
          }
        } else {
          const Graph* base = &split.history.frames.back().graph;
          Graph cumulative;
          if (cfg.features.cumulative_graph) {
            std::vector<Edge> edges;
            for (const auto& f : split.history.frames)
              edges = detail::union_sorted(edges, f.graph.edges());
            cumulative = Graph(net.num_nodes(), net.directedness(),
                               std::move(edges));
            base = &cumulative;
          }
          const double a =
              unsupervised_auroc(*base, split.target, metric_of(method),
                                 cfg.features.neighbor_mode,
                                 cfg.features.threads)
                  .auroc;
          std::fill(result.runs[ti].begin(), result.runs[ti].end(), a);
        }
      } catch (const Error& e) {
        throw Error(e.code(), std::string(method_name(method)) + ": " +
                                  e.what());
      }
    }
  }

  for (auto& result : report.methods) {
    std::vector<double> flat;
    for (const auto& runs : result.runs) {
      result.target_means.push_back(detail::mean_of_runs(runs));
      flat.insert(flat.end(), runs.begin(), runs.end());
    }
    result.mean = detail::mean_of_runs(flat);
    // Deviations from the first run keep a constant series at exactly 0.
    double shift_sum = 0.0, shift_sq = 0.0;
    for (double v : flat) {
      shift_sum += v - flat.front();
      shift_sq += (v - flat.front()) * (v - flat.front());
    }
    const double ss =
        shift_sq - shift_sum * shift_sum / static_cast<double>(flat.size());
    result.stddev =
        flat.size() > 1 ? std::sqrt(std::max(0.0, ss) /
                                    static_cast<double>(flat.size() - 1))
                        : 0.0;
  }

  // RPM against every other method: across targets when there are several,
  // otherwise across the paired (repeat, fold) runs of the single target.
  if (const auto* rpm = report.find(Method::RPM)) {
    for (const auto& other : report.methods) {
      if (other.method == Method::RPM) continue;
      TTestResult t;
      t.method = other.method;
      if (cfg.num_targets >= 2) {
        t.axis = "snapshots";
        t.p_value = paired_t_test(rpm->target_means, other.target_means);
      } else {
        t.axis = "runs";
        t.p_value = paired_t_test(rpm->runs.front(), other.runs.front());
      }
      report.t_tests.push_back(t);
    }
  }
  return report;
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json methods = nlohmann::json::array();
  for (auto m : cfg.methods) methods.push_back(std::string(method_name(m)));
  nlohmann::json seeds = nlohmann::json::array();
  for (int r = 0; r < cfg.repeats; ++r) seeds.push_back(cfg.repeat_seed(r));
  return {
      {"window", cfg.window},
      {"history_frames", cfg.history_frames},
      {"target_frame", cfg.first_target()},
      {"num_targets", cfg.num_targets},
      {"methods", methods},
      {"rate_model", cfg.rate_model},
      {"metric_model", cfg.metric_model},
      {"train", to_json(cfg.train)},
      {"folds", cfg.folds},
      {"repeats", cfg.repeats},
      {"seed", cfg.seed},
      {"derived_repeat_seeds", seeds},
      {"neighbor_mode", cfg.features.neighbor_mode == NeighborMode::Union
                            ? "union"
                            : "out"},
      {"count_deletions", cfg.features.count_deletions},
      {"cumulative_graph", cfg.features.cumulative_graph},
  };
}

/// Missing fields keep the values already in `cfg`.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                                    ExperimentConfig cfg = {}) {
  cfg.window = j.value("window", cfg.window);
  cfg.history_frames = j.value("history_frames", cfg.history_frames);
  cfg.target_frame = j.value("target_frame", cfg.target_frame);
  cfg.num_targets = j.value("num_targets", cfg.num_targets);
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j.at("methods"))
      cfg.methods.push_back(parse_method(m.get<std::string>()));
  }
  cfg.rate_model = j.value("rate_model", cfg.rate_model);
  cfg.metric_model = j.value("metric_model", cfg.metric_model);
  if (j.contains("train"))
    cfg.train = train_config_from_json(j.at("train"), cfg.train);
  cfg.folds = j.value("folds", cfg.folds);
  cfg.repeats = j.value("repeats", cfg.repeats);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("neighbor_mode")) {
    const auto s = j.at("neighbor_mode").get<std::string>();
    if (s == "union")
      cfg.features.neighbor_mode = NeighborMode::Union;
    else if (s == "out")
      cfg.features.neighbor_mode = NeighborMode::OutOnly;
    else
      throw Error(ErrorCode::InvalidArgument,
                  "neighbor_mode: must be `union` or `out`");
  }
  cfg.features.count_deletions =
      j.value("count_deletions", cfg.features.count_deletions);
  cfg.features.cumulative_graph =
      j.value("cumulative_graph", cfg.features.cumulative_graph);
  return cfg;
}

inline nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& r : report.methods) {
    methods.push_back({{"method", std::string(method_name(r.method))},
                       {"mean_auroc", r.mean},
                       {"stddev", r.stddev},
                       {"target_means", r.target_means},
                       {"runs", r.runs}});
  }
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : report.t_tests) {
    tests.push_back({{"baseline", "RPM"},
                     {"method", std::string(method_name(t.method))},
                     {"axis", t.axis},
                     {"p_value", t.p_value}});
  }
  return {{"targets", report.targets},
          {"rate_model", report.rate_model},
          {"pairs_per_target", report.num_pairs},
          {"positives_per_target", report.positives},
          {"methods", methods},
          {"t_tests", tests}};
}

}  // namespace rpm
