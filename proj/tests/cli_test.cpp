#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace rpm::cli {
namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rpm_cli_" + std::string(::testing::UnitTest::GetInstance()
                                         ->current_test_info()
                                         ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  // A small synthetic network written through the CLI itself.
  std::string synth_net() {
    const auto net = path("net.txt");
    EXPECT_EQ(run({"synth", "--nodes", "40", "--snapshots", "7", "--seed", "3",
                   "-o", net}),
              kExitOk)
        << err_.str();
    return net;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, StatsEmitsChurnCsv) {
  const auto net = path("tiny.txt");
  std::ofstream(net) << "a b 1\nb c 1\na c 2\n";
  ASSERT_EQ(run({"stats", "--input", net}), kExitOk) << err_.str();
  EXPECT_EQ(out_.str(), "t,added,dropped\n1,2,0\n2,1,2\n");
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), kExitUsage);
  EXPECT_EQ(run({"bogus"}), kExitUsage);
  EXPECT_EQ(run({"train", "-o", path("m.json")}), kExitUsage);
  EXPECT_NE(err_.str().find("--input"), std::string::npos);
  EXPECT_EQ(run({"stats", "--window", "2"}), kExitUsage);
  EXPECT_EQ(run({"compare", "-i", "x", "-o", path("r"), "--methods", "RPM,XX"}),
            kExitUsage);
}

TEST_F(CliTest, ConfigValidationNamesTheField) {
  const auto cfg = path("bad.json");
  std::ofstream(cfg) << R"({"folds": 1})";
  EXPECT_EQ(run({"compare", "--config", cfg, "-i", "x", "-o", path("r")}),
            kExitUsage);
  EXPECT_NE(err_.str().find("folds"), std::string::npos);
  std::ofstream(cfg) << R"({"no_such_field": 3})";
  EXPECT_EQ(run({"compare", "--config", cfg, "-i", "x", "-o", path("r")}),
            kExitUsage);
  EXPECT_NE(err_.str().find("no_such_field"), std::string::npos);
}

TEST_F(CliTest, RuntimeFailures) {
  EXPECT_EQ(run({"stats", "-i", path("missing.txt")}), kExitFailure);
  const auto net = path("one.txt");
  std::ofstream(net) << "a b 1\n";
  EXPECT_EQ(run({"stats", "-i", net}), kExitFailure);
  EXPECT_EQ(run({"compare", "-i", synth_net(), "-o", path("r"), "-n", "9"}),
            kExitFailure);
}

TEST_F(CliTest, SynthOutputFeedsOtherCommands) {
  const auto net = synth_net();
  EXPECT_TRUE(fs::exists(net + ".config.json"));
  EXPECT_EQ(run({"stats", "-i", net}), kExitOk);
  const auto csv = path("pairs.csv");
  ASSERT_EQ(run({"featurize", "-i", net, "-n", "3", "-o", csv}), kExitOk)
      << err_.str();
  const auto schema = nlohmann::json::parse(slurp(csv + ".schema.json"));
  const std::size_t rows = schema.at("rows");
  EXPECT_EQ(schema.at("features").size(), 6u);
  std::ifstream in(csv);
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header, "src,dst,label,cn,jc,pa,aa,rate_src,rate_dst");
  std::size_t count = 0;
  while (std::getline(in, line)) ++count;
  EXPECT_EQ(count, rows);
  const std::size_t n = static_cast<std::size_t>(std::sqrt(rows));
  EXPECT_EQ(n * n, rows);

  const auto scores = path("scores.csv");
  ASSERT_EQ(run({"featurize", "-i", net, "-n", "3", "--scores", "-o", scores}),
            kExitOk);
  std::ifstream sin(scores);
  std::getline(sin, header);
  EXPECT_EQ(header, "src,dst,cn,jc,pa,aa");
}

TEST_F(CliTest, TrainWritesModelJson) {
  const auto net = synth_net();
  const auto model = path("model.json");
  ASSERT_EQ(run({"train", "-i", net, "-n", "3", "--kind", "Supervised",
                 "--epochs", "3", "-o", model}),
            kExitOk)
      << err_.str();
  const auto j = nlohmann::json::parse(slurp(model));
  EXPECT_EQ(j.at("weights").size(), 4u);
  EXPECT_EQ(j.at("kind"), "Supervised");
  EXPECT_EQ(j.at("config").at("epochs"), 3);
}

TEST_F(CliTest, CompareReportShapeAndEchoReproduces) {
  const auto net = synth_net();
  const auto report = path("report");
  ASSERT_EQ(run({"compare", "-i", net, "-n", "3", "--folds", "3", "--repeats",
                 "2", "--epochs", "4", "--threads", "2", "-o", report}),
            kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("Supervised-MA"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(report + ".json"));
  EXPECT_EQ(j.at("methods").size(), 7u);
  EXPECT_EQ(j.at("t_tests").size(), 6u);

  const auto echo = nlohmann::json::parse(slurp(report + ".config.json"));
  EXPECT_EQ(echo.at("derived_repeat_seeds"), nlohmann::json({1, 2}));
  EXPECT_EQ(echo.at("train").at("epochs"), 4);

  const auto again = path("again");
  ASSERT_EQ(run({"compare", "--config", report + ".config.json", "-o", again}),
            kExitOk)
      << err_.str();
  EXPECT_EQ(slurp(report + ".json"), slurp(again + ".json"));
  EXPECT_EQ(slurp(report + ".csv"), slurp(again + ".csv"));
}

TEST_F(CliTest, FlagsOverrideConfig) {
  const auto net = synth_net();
  const auto cfg = path("exp.json");
  std::ofstream(cfg) << R"({"methods": ["CN", "PA"], "folds": 4, "repeats": 1})";
  const auto report = path("r");
  ASSERT_EQ(run({"evaluate", "--config", cfg, "-i", net, "-n", "3",
                 "--methods", "AA", "-o", report}),
            kExitOk)
      << err_.str();
  const auto echo = nlohmann::json::parse(slurp(report + ".config.json"));
  EXPECT_EQ(echo.at("methods"), nlohmann::json({"AA"}));
  EXPECT_EQ(echo.at("folds"), 4);
  EXPECT_EQ(echo.at("history_frames"), 3);
}

}  // namespace
}  // namespace rpm::cli
