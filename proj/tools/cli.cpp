#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rpm/rpm.hpp"

namespace rpm::cli {
namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a subcommand may read, after config file and flags are merged.
struct Settings {
  std::string command;
  std::string input;
  bool directed = false;
  std::string output;
  unsigned threads = 1;
  ExperimentConfig exp;
  std::string kind = "RPM";
  std::string model;  // empty: the kind's default forecaster
  bool scores = false;
  SynthConfig synth;
};

const std::set<std::string>& allowed_keys(const std::string& command) {
  static const std::set<std::string> stats{"command", "input", "directed",
                                           "output"};
  static const std::set<std::string> synth{
      "command",      "output",         "nodes", "snapshots", "base_rate",
      "hot_fraction", "hot_multiplier", "churn", "seed"};
  static const std::set<std::string> featurize{
      "command",         "input",          "directed",        "output",
      "threads",         "window",         "history_frames",  "target_frame",
      "kind",            "model",          "scores",          "neighbor_mode",
      "count_deletions", "cumulative_graph"};
  static const std::set<std::string> train = [] {
    auto keys = featurize;
    keys.erase("scores");
    keys.insert("train");
    return keys;
  }();
  static const std::set<std::string> experiment{
      "command",         "input",           "directed",
      "output",          "threads",         "window",
      "history_frames",  "target_frame",    "num_targets",
      "methods",         "rate_model",      "metric_model",
      "train",           "folds",           "repeats",
      "seed",            "derived_repeat_seeds", "neighbor_mode",
      "count_deletions", "cumulative_graph"};
  if (command == "stats") return stats;
  if (command == "synth") return synth;
  if (command == "featurize") return featurize;
  if (command == "train") return train;
  return experiment;
}

FeatureSetKind parse_kind(const std::string& name) {
  for (auto k : {FeatureSetKind::RPM, FeatureSetKind::Supervised,
                 FeatureSetKind::SupervisedMA})
    if (kind_name(k) == name) return k;
  throw UsageError("kind: must be RPM, Supervised or Supervised-MA, got `" +
                   name + "`");
}

void apply_config(const json& j, Settings& s) {
  if (!j.is_object()) throw UsageError("config: top level must be an object");
  const auto& keys = allowed_keys(s.command);
  for (const auto& item : j.items()) {
    if (!keys.count(item.key()))
      throw UsageError("config: unknown field `" + item.key() + "` for " +
                       s.command);
  }
  if (j.contains("command") && j.at("command").get<std::string>() != s.command)
    throw UsageError("config: written for `" +
                     j.at("command").get<std::string>() + "`, not `" +
                     s.command + "`");
  s.input = j.value("input", s.input);
  s.directed = j.value("directed", s.directed);
  s.output = j.value("output", s.output);
  s.threads = j.value("threads", s.threads);
  if (s.command == "synth") {
    auto& c = s.synth;
    c.num_nodes = j.value("nodes", c.num_nodes);
    c.num_snapshots = j.value("snapshots", c.num_snapshots);
    c.base_rate = j.value("base_rate", c.base_rate);
    c.hot_fraction = j.value("hot_fraction", c.hot_fraction);
    c.hot_multiplier = j.value("hot_multiplier", c.hot_multiplier);
    c.churn = j.value("churn", c.churn);
    c.seed = j.value("seed", c.seed);
    return;
  }
  s.kind = j.value("kind", s.kind);
  s.model = j.value("model", s.model);
  s.scores = j.value("scores", s.scores);
  s.exp = experiment_config_from_json(j, s.exp);
}

json echo(const Settings& s) {
  json j{{"command", s.command}};
  if (s.command == "synth") {
    const auto& c = s.synth;
    j.update({{"output", s.output},
              {"nodes", c.num_nodes},
              {"snapshots", c.num_snapshots},
              {"base_rate", c.base_rate},
              {"hot_fraction", c.hot_fraction},
              {"hot_multiplier", c.hot_multiplier},
              {"churn", c.churn},
              {"seed", c.seed}});
    return j;
  }
  j.update({{"input", s.input}, {"directed", s.directed}, {"output", s.output}});
  if (s.command == "stats") return j;
  j["threads"] = s.threads;
  const auto e = to_json(s.exp);
  if (s.command == "evaluate" || s.command == "compare") {
    j.update(e);
    return j;
  }
  for (const char* key : {"window", "history_frames", "target_frame",
                          "neighbor_mode", "count_deletions",
                          "cumulative_graph"})
    j[key] = e.at(key);
  j["kind"] = s.kind;
  j["model"] = s.model;
  if (s.command == "featurize") j["scores"] = s.scores;
  if (s.command == "train") j["train"] = e.at("train");
  return j;
}

// Shortest round-trip text for a double.
std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Output {
 public:
  explicit Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }
  void close() {
    stream_->flush();
    if (file_) {
      file_->close();
      if (!*file_) throw Error(ErrorCode::InvalidArgument, "write failed");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

bool writes_file(const std::string& path) { return !path.empty() && path != "-"; }

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed: " + path);
}

TemporalNetwork load_input(const Settings& s) {
  if (s.input.empty()) throw UsageError("--input is required");
  EdgeListFormat fmt;
  fmt.directedness = s.directed ? Directedness::Directed : Directedness::Undirected;
  if (s.input == "-") return parse_edge_list(std::cin, fmt);
  return load_edge_list(s.input, fmt);
}

void require_output(const Settings& s) {
  if (!writes_file(s.output))
    throw UsageError(s.command + ": --output must name a file");
}

struct Split {
  FramedSeries history;
  Frame target;
};

Split split_of(const FramedSeries& all, const ExperimentConfig& cfg) {
  const int target = cfg.first_target();
  Split s;
  s.history.window = cfg.window;
  for (int f = target - cfg.history_frames; f < target; ++f)
    s.history.frames.push_back(all.frames[f - 1]);
  s.target = all.frames[target - 1];
  return s;
}

ForecastModel resolve_model(Settings& s, const FramedSeries& all) {
  const auto kind = parse_kind(s.kind);
  if (kind == FeatureSetKind::RPM) {
    if (!s.model.empty()) s.exp.rate_model = s.model;
    auto m = resolve_rate_model(all, s.exp);
    s.model = to_string(m);
    return m;
  }
  if (kind == FeatureSetKind::SupervisedMA) {
    if (s.model.empty()) s.model = s.exp.metric_model;
    return parse_model(s.model);
  }
  if (s.model.empty()) s.model = "mean";  // unused by plain topology features
  return parse_model(s.model);
}

void write_echo(const Settings& s, const std::string& echo_path) {
  std::string path = echo_path;
  if (path.empty() && writes_file(s.output)) path = s.output + ".config.json";
  if (!path.empty()) write_json_file(path, echo(s));
}

// Resolution problems are usage errors; failures while running are not.
void check_settings(const Settings& s) {
  try {
    if (s.command == "synth") {
      validate(s.synth);
      return;
    }
    if (s.command == "stats") return;
    if (s.threads < 1) throw UsageError("threads: must be >= 1");
    parse_kind(s.kind);
    if (!s.model.empty() && s.model != "auto") parse_model(s.model);
    auto cfg = s.exp;
    if (s.command == "featurize" || s.command == "train") {
      // Fields that only the experiment runner reads keep their defaults.
      if (parse_kind(s.kind) != FeatureSetKind::Supervised)
        cfg.methods = {Method::RPM};
      else
        cfg.methods = {Method::Supervised};
    }
    validate(cfg);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

int cmd_stats(Settings& s, std::ostream& out, const std::string& echo_path) {
  const auto net = load_input(s);
  Output dst(s.output, out);
  *dst << "t,added,dropped\n";
  for (const auto& c : snapshot_dynamics(net))
    *dst << c.t << ',' << c.added << ',' << c.dropped << '\n';
  dst.close();
  write_echo(s, echo_path);
  return kExitOk;
}

int cmd_synth(Settings& s, std::ostream& out, const std::string& echo_path) {
  const auto net = generate(s.synth);
  Output dst(s.output, out);
  write_edge_list(*dst, net);
  dst.close();
  write_echo(s, echo_path);
  return kExitOk;
}

int cmd_featurize(Settings& s, const std::string& echo_path) {
  require_output(s);
  const auto net = load_input(s);
  const auto kind = parse_kind(s.kind);
  const auto all = build_frames(net, s.exp.window, s.exp.first_target());
  const auto model = resolve_model(s, all);
  const auto split = split_of(all, s.exp);
  std::ofstream out(s.output, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + s.output);

  if (s.scores) {
    Graph cumulative;
    const Graph* base = &split.history.frames.back().graph;
    if (s.exp.features.cumulative_graph) {
      std::vector<Edge> edges;
      for (const auto& f : split.history.frames)
        edges = detail::union_sorted(edges, f.graph.edges());
      cumulative = Graph(net.num_nodes(), net.directedness(), std::move(edges));
      base = &cumulative;
    }
    const PairScorer scorer(*base, s.exp.features.neighbor_mode);
    out << "src,dst,cn,jc,pa,aa\n";
    const auto n = static_cast<NodeId>(net.num_nodes());
    for (NodeId x = 0; x < n; ++x)
      for (NodeId y = 0; y < n; ++y) {
        const auto v = scorer(x, y);
        out << net.label(x) << ',' << net.label(y) << ',' << number(v.cn)
            << ',' << number(v.jc) << ',' << number(v.pa) << ','
            << number(v.aa) << '\n';
      }
  } else {
    const auto data = build_dataset(split.history, split.target, kind, model,
                                    s.exp.features);
    out << "src,dst,label";
    for (const auto& name : data.schema()) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto p = data.pair(i);
      out << net.label(p.src) << ',' << net.label(p.dst) << ','
          << int(data.label(i));
      for (double v : data.row(i)) out << ',' << number(v);
      out << '\n';
    }
    write_json_file(s.output + ".schema.json",
                    {{"columns", json::array({"src", "dst", "label"})},
                     {"features", data.schema()},
                     {"kind", s.kind},
                     {"model", s.model},
                     {"rows", data.size()},
                     {"positives", data.positives()},
                     {"negatives", data.negatives()},
                     {"history_frames",
                      {split.history.frames.front().first,
                       split.history.frames.back().last}},
                     {"target_snapshots", {split.target.first, split.target.last}}});
  }
  out.close();
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed: " + s.output);
  write_echo(s, echo_path);
  return kExitOk;
}

int cmd_train(Settings& s, const std::string& echo_path) {
  require_output(s);
  const auto net = load_input(s);
  const auto kind = parse_kind(s.kind);
  const auto all = build_frames(net, s.exp.window, s.exp.first_target());
  const auto model = resolve_model(s, all);
  const auto split = split_of(all, s.exp);
  const auto data = build_dataset(split.history, split.target, kind, model,
                                  s.exp.features);
  const auto trained = train(data, s.exp.train);
  auto j = to_json(trained);
  j["kind"] = s.kind;
  j["forecast_model"] = s.model;
  write_json_file(s.output, j);
  write_echo(s, echo_path);
  return kExitOk;
}

void print_table(std::ostream& out, const ExperimentReport& report) {
  out << "rate model: " << report.rate_model << '\n';
  out << std::left << std::setw(15) << "method" << std::right << std::setw(10)
      << "AUROC" << std::setw(10) << "stddev" << std::setw(14) << "p vs RPM"
      << '\n';
  for (const auto& r : report.methods) {
    out << std::left << std::setw(15) << method_name(r.method) << std::right
        << std::fixed << std::setprecision(4) << std::setw(10) << r.mean
        << std::setw(10) << r.stddev;
    std::string p = "-";
    for (const auto& t : report.t_tests) {
      if (t.method != r.method) continue;
      std::ostringstream cell;
      cell << std::scientific << std::setprecision(2) << t.p_value << ' '
           << t.axis.front();
      p = cell.str();
    }
    out << std::setw(14) << p << '\n';
  }
  out << std::defaultfloat;
}

int cmd_experiment(Settings& s, std::ostream& out,
                   const std::string& echo_path) {
  require_output(s);
  const auto net = load_input(s);
  const auto report = run_experiment(net, s.exp);
  write_json_file(s.output + ".json", to_json(report));

  std::ofstream csv(s.output + ".csv", std::ios::binary);
  if (!csv) throw Error(ErrorCode::InvalidArgument, "cannot write csv report");
  csv << "method,mean_auroc,stddev,p_value_vs_rpm,t_test_axis\n";
  for (const auto& r : report.methods) {
    csv << method_name(r.method) << ',' << number(r.mean) << ','
        << number(r.stddev) << ',';
    bool tested = false;
    for (const auto& t : report.t_tests) {
      if (t.method != r.method) continue;
      csv << number(t.p_value) << ',' << t.axis;
      tested = true;
    }
    if (!tested) csv << ',';
    csv << '\n';
  }
  csv.close();
  print_table(out, report);
  write_echo(s, echo_path);
  return kExitOk;
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(parse_method(item));
    } catch (const Error& e) {
      throw UsageError(std::string("methods: ") + e.what());
    }
  }
  if (out.empty()) throw UsageError("methods: list is empty");
  return out;
}

// Flags are applied after the config file, and only when given.
class Overrides {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& slot,
                   std::function<void(Settings&, const T&)> apply,
                   const std::string& help) {
    auto* opt = app->add_option(name, slot, help);
    entries_.push_back({opt, [&slot, apply](Settings& s) { apply(s, slot); }});
    return opt;
  }
  CLI::Option* flag(CLI::App* app, const std::string& name, bool& slot,
                    std::function<void(Settings&, bool)> apply,
                    const std::string& help) {
    auto* opt = app->add_flag(name, slot, help);
    entries_.push_back({opt, [&slot, apply](Settings& s) { apply(s, slot); }});
    return opt;
  }
  void apply(Settings& s) const {
    for (const auto& e : entries_)
      if (e.option->count() > 0) e.apply(s);
  }

 private:
  struct Entry {
    CLI::Option* option;
    std::function<void(Settings&)> apply;
  };
  std::vector<Entry> entries_;
};

// Storage for raw flag values; one instance per run_cli call.
struct FlagValues {
  std::string config, echo, input, output, kind, model, methods, rate_model,
      metric_model, neighbor_mode, class_weighting;
  bool directed = false, scores = false, count_deletions = false,
       cumulative = false, degree2 = false;
  unsigned threads = 1;
  int window = 1, history = 1, target = 0, targets = 1, folds = 10,
      repeats = 10, epochs = 50, snapshots = 20;
  std::size_t nodes = 500, batch_size = 1;
  double cost = 1, learning_rate = 0.1, base_rate = 1, hot_fraction = 0.1,
         hot_multiplier = 5, churn = 0.3;
  std::uint64_t seed = 1;
};

void add_io(CLI::App* app, Overrides& ov, FlagValues& v, bool input) {
  app->add_option("--config", v.config, "JSON config; flags override it");
  app->add_option("--echo", v.echo,
                  "where to write the resolved config (default: "
                  "<output>.config.json)");
  if (input) {
    ov.add<std::string>(app, "-i,--input", v.input,
                        [](Settings& s, const std::string& x) { s.input = x; },
                        "edge list `src dst snapshot`, - for stdin");
    ov.flag(app, "--directed", v.directed,
            [](Settings& s, bool x) { s.directed = x; },
            "treat edges as directed");
  }
  ov.add<std::string>(app, "-o,--output", v.output,
                      [](Settings& s, const std::string& x) { s.output = x; },
                      "output path");
}

void add_frames(CLI::App* app, Overrides& ov, FlagValues& v) {
  ov.add<unsigned>(app, "--threads", v.threads,
                   [](Settings& s, const unsigned& x) { s.threads = x; },
                   "worker threads");
  ov.add<int>(app, "-w,--window", v.window,
              [](Settings& s, const int& x) { s.exp.window = x; },
              "snapshots per frame");
  ov.add<int>(app, "-n,--history", v.history,
              [](Settings& s, const int& x) { s.exp.history_frames = x; },
              "history frames per prediction");
  ov.add<int>(app, "--target", v.target,
              [](Settings& s, const int& x) { s.exp.target_frame = x; },
              "first target frame (default history + 1)");
  ov.add<std::string>(
      app, "--neighbor-mode", v.neighbor_mode,
      [](Settings& s, const std::string& x) {
        if (x == "union")
          s.exp.features.neighbor_mode = NeighborMode::Union;
        else if (x == "out")
          s.exp.features.neighbor_mode = NeighborMode::OutOnly;
        else
          throw UsageError("neighbor_mode: must be `union` or `out`");
      },
      "union or out");
  ov.flag(app, "--count-deletions", v.count_deletions,
          [](Settings& s, bool x) { s.exp.features.count_deletions = x; },
          "rate series also count dropped edges");
  ov.flag(app, "--cumulative", v.cumulative,
          [](Settings& s, bool x) { s.exp.features.cumulative_graph = x; },
          "topology from the union of all history frames");
}

void add_training(CLI::App* app, Overrides& ov, FlagValues& v) {
  ov.add<int>(app, "--epochs", v.epochs,
              [](Settings& s, const int& x) { s.exp.train.epochs = x; },
              "SGD passes");
  ov.add<double>(app, "--cost", v.cost,
                 [](Settings& s, const double& x) { s.exp.train.cost = x; },
                 "hinge cost C");
  ov.add<double>(
      app, "--learning-rate", v.learning_rate,
      [](Settings& s, const double& x) { s.exp.train.learning_rate = x; },
      "initial step size");
  ov.add<std::size_t>(
      app, "--batch-size", v.batch_size,
      [](Settings& s, const std::size_t& x) { s.exp.train.batch_size = x; },
      "rows per SGD step (1 = sequential)");
  ov.add<std::string>(
      app, "--class-weighting", v.class_weighting,
      [](Settings& s, const std::string& x) {
        if (x == "balanced")
          s.exp.train.class_weighting = ClassWeighting::Balanced;
        else if (x == "none")
          s.exp.train.class_weighting = ClassWeighting::None;
        else
          throw UsageError("class_weighting: must be `balanced` or `none`");
      },
      "balanced or none");
  ov.flag(app, "--degree2", v.degree2,
          [](Settings& s, bool x) { s.exp.train.degree2_expansion = x; },
          "explicit degree-2 feature expansion");
}

void add_kind(CLI::App* app, Overrides& ov, FlagValues& v) {
  ov.add<std::string>(app, "--kind", v.kind,
                      [](Settings& s, const std::string& x) { s.kind = x; },
                      "RPM, Supervised or Supervised-MA");
  ov.add<std::string>(app, "--model", v.model,
                      [](Settings& s, const std::string& x) { s.model = x; },
                      "forecaster: mean, ma:3, wma:0.2,0.3,0.5, ema:0.5, auto");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Link prediction from forecast link-formation rates"};
  app.require_subcommand(1);
  FlagValues v;
  Overrides ov;

  auto* stats = app.add_subcommand("stats", "per-snapshot added/dropped edges");
  add_io(stats, ov, v, true);

  auto* synth = app.add_subcommand("synth", "generate a synthetic network");
  add_io(synth, ov, v, false);
  ov.add<std::size_t>(synth, "--nodes", v.nodes,
                      [](Settings& s, const std::size_t& x) { s.synth.num_nodes = x; },
                      "node count");
  ov.add<int>(synth, "--snapshots", v.snapshots,
              [](Settings& s, const int& x) { s.synth.num_snapshots = x; },
              "snapshot count");
  ov.add<double>(synth, "--base-rate", v.base_rate,
                 [](Settings& s, const double& x) { s.synth.base_rate = x; },
                 "new links per node per snapshot");
  ov.add<double>(synth, "--hot-fraction", v.hot_fraction,
                 [](Settings& s, const double& x) { s.synth.hot_fraction = x; },
                 "fraction of high-rate nodes");
  ov.add<double>(synth, "--hot-multiplier", v.hot_multiplier,
                 [](Settings& s, const double& x) { s.synth.hot_multiplier = x; },
                 "rate ratio hot/normal");
  ov.add<double>(synth, "--churn", v.churn,
                 [](Settings& s, const double& x) { s.synth.churn = x; },
                 "per-snapshot edge drop probability");
  ov.add<std::uint64_t>(synth, "--seed", v.seed,
                        [](Settings& s, const std::uint64_t& x) { s.synth.seed = x; },
                        "RNG seed");

  auto* featurize =
      app.add_subcommand("featurize", "labeled pair dataset as CSV");
  add_io(featurize, ov, v, true);
  add_frames(featurize, ov, v);
  add_kind(featurize, ov, v);
  ov.flag(featurize, "--scores", v.scores,
          [](Settings& s, bool x) { s.scores = x; },
          "write raw src,dst,cn,jc,pa,aa scores instead");

  auto* train_cmd = app.add_subcommand("train", "fit a model on one split");
  add_io(train_cmd, ov, v, true);
  add_frames(train_cmd, ov, v);
  add_kind(train_cmd, ov, v);
  add_training(train_cmd, ov, v);
  ov.add<std::uint64_t>(
      train_cmd, "--seed", v.seed,
      [](Settings& s, const std::uint64_t& x) { s.exp.train.seed = x; },
      "shuffle seed");

  auto add_experiment = [&](CLI::App* cmd) {
    add_io(cmd, ov, v, true);
    add_frames(cmd, ov, v);
    add_training(cmd, ov, v);
    ov.add<int>(cmd, "--targets", v.targets,
                [](Settings& s, const int& x) { s.exp.num_targets = x; },
                "consecutive target frames");
    ov.add<std::string>(
        cmd, "--methods", v.methods,
        [](Settings& s, const std::string& x) { s.exp.methods = parse_methods(x); },
        "comma-separated: RPM,Supervised-MA,Supervised,CN,JC,PA,AA");
    ov.add<std::string>(
        cmd, "--rate-model", v.rate_model,
        [](Settings& s, const std::string& x) { s.exp.rate_model = x; },
        "RPM forecaster or auto");
    ov.add<std::string>(
        cmd, "--metric-model", v.metric_model,
        [](Settings& s, const std::string& x) { s.exp.metric_model = x; },
        "Supervised-MA forecaster");
    ov.add<int>(cmd, "--folds", v.folds,
                [](Settings& s, const int& x) { s.exp.folds = x; },
                "cross-validation folds");
    ov.add<int>(cmd, "--repeats", v.repeats,
                [](Settings& s, const int& x) { s.exp.repeats = x; },
                "cross-validation repeats");
    ov.add<std::uint64_t>(cmd, "--seed", v.seed,
                          [](Settings& s, const std::uint64_t& x) { s.exp.seed = x; },
                          "experiment seed; repeat r uses seed + r");
  };
  auto* evaluate = app.add_subcommand(
      "evaluate", "cross-validated AUROC of selected methods (default RPM)");
  add_experiment(evaluate);
  auto* compare =
      app.add_subcommand("compare", "all seven methods with t-tests vs RPM");
  add_experiment(compare);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  auto* sub = app.get_subcommands().front();
  Settings s;
  s.command = sub->get_name();
  if (s.command == "evaluate") s.exp.methods = {Method::RPM};

  auto previous = warning_handler();
  warning_handler() = [&err](std::string_view msg) {
    err << "warning: " << msg << '\n';
  };
  struct Restore {
    std::function<void(std::string_view)> saved;
    ~Restore() { warning_handler() = saved; }
  } restore{previous};

  try {
    if (!v.config.empty()) {
      std::ifstream in(v.config);
      if (!in) throw UsageError("cannot read config " + v.config);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw UsageError("config: " + std::string(e.what()));
      }
      try {
        apply_config(j, s);
      } catch (const json::exception& e) {
        throw UsageError("config: " + std::string(e.what()));
      } catch (const Error& e) {
        throw UsageError(std::string("config: ") + e.what());
      }
    }
    ov.apply(s);
    s.exp.features.threads = s.threads;
    check_settings(s);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (s.command == "stats") return cmd_stats(s, out, v.echo);
    if (s.command == "synth") return cmd_synth(s, out, v.echo);
    if (s.command == "featurize") return cmd_featurize(s, v.echo);
    if (s.command == "train") return cmd_train(s, v.echo);
    return cmd_experiment(s, out, v.echo);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace rpm::cli
