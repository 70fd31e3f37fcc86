#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "rpm/forecasting.hpp"

namespace rpm {
namespace {

std::vector<ForecastModel> every_kind() {
  return {SimpleMean{}, MovingAverage{3}, WeightedMovingAverage{},
          ExponentialSmoothing{0.4}};
}

TEST(Forecast, HandValues) {
  const std::vector<double> s246{2, 4, 6};
  EXPECT_NEAR(forecast(SimpleMean{}, s246), 4.0, 1e-12);
  const std::vector<double> tail{7, 1, 2, 3};
  EXPECT_NEAR(forecast(WeightedMovingAverage{{0.2, 0.3, 0.5}}, tail), 2.3,
              1e-12);
  const std::vector<double> s15{1, 2, 3, 4, 5};
  EXPECT_NEAR(forecast(MovingAverage{3}, s15), 4.0, 1e-12);
  EXPECT_EQ(forecast(ExponentialSmoothing{1.0}, s15), 5.0);
}

TEST(Forecast, ExponentialSmoothingRecursion) {
  // F1 = 4, F2 = .5*4 + .5*4 = 4, F3 = .5*8 + .5*4 = 6, F4 = .5*2 + .5*6 = 4.
  const std::vector<double> s{4, 8, 2};
  EXPECT_NEAR(forecast(ExponentialSmoothing{0.5}, s), 4.0, 1e-12);
}

TEST(Forecast, AlphaZeroKeepsFirstObservation) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(1 + rng() % 12);
    for (auto& v : s) v = u(rng);
    EXPECT_EQ(forecast(ExponentialSmoothing{0.0}, s), s.front());
    EXPECT_EQ(forecast(ExponentialSmoothing{1.0}, s), s.back());
  }
}

TEST(Forecast, ConstantSeries) {
  for (double c : {0.0, 3.7, -1.25, 1e6}) {
    const std::vector<double> s(9, c);
    for (const auto& m : every_kind()) EXPECT_NEAR(forecast(m, s), c, 1e-12);
  }
}

TEST(Forecast, StaysWithinConsultedRange) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(1 + rng() % 10);
    for (auto& v : s) v = u(rng);
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    for (const auto& m : every_kind()) {
      const double f = forecast(m, s);
      EXPECT_GE(f, *lo - 1e-12);
      EXPECT_LE(f, *hi + 1e-12);
    }
  }
}

TEST(Forecast, UniformWmaEqualsMovingAverage) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (std::size_t n = 1; n <= 6; ++n) {
    const WeightedMovingAverage wma{std::vector<double>(n, 1.0 / n)};
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> s(n + rng() % 5);
      for (auto& v : s) v = u(rng);
      EXPECT_NEAR(forecast(wma, s), forecast(MovingAverage{n}, s), 1e-12);
    }
  }
}

TEST(Forecast, ShortSeriesFallsBackToMean) {
  const std::vector<double> s{1, 5};
  EXPECT_EQ(forecast(MovingAverage{3}, s), 3.0);
  EXPECT_EQ(forecast(WeightedMovingAverage{}, s), 3.0);
}

TEST(Forecast, Errors) {
  EXPECT_THROW(forecast(SimpleMean{}, std::vector<double>{}), Error);
  const std::vector<double> s{1, 2, 3};
  EXPECT_THROW(forecast(WeightedMovingAverage{{0.5, 0.6}}, s), Error);
  EXPECT_THROW(forecast(WeightedMovingAverage{{1.5, -0.5}}, s), Error);
  EXPECT_THROW(forecast(MovingAverage{0}, s), Error);
  EXPECT_THROW(forecast(ExponentialSmoothing{1.5}, s), Error);
}

TEST(ModelStrings, ParseAndPrint) {
  EXPECT_EQ(parse_model("mean"), ForecastModel{SimpleMean{}});
  EXPECT_EQ(parse_model("ma:3"), ForecastModel{MovingAverage{3}});
  const ForecastModel wma = WeightedMovingAverage{{0.2, 0.3, 0.5}};
  EXPECT_EQ(parse_model("wma:0.2,0.3,0.5"), wma);
  EXPECT_EQ(parse_model("ema:0.5"), ForecastModel{ExponentialSmoothing{0.5}});
  for (const auto& m : default_candidates())
    EXPECT_EQ(parse_model(to_string(m)), m);
  EXPECT_EQ(to_string(WeightedMovingAverage{}), "wma:0.2,0.3,0.5");
  for (const char* bad : {"", "ma", "ma:0", "ma:2.5", "wma:0.5", "ema:x",
                          "arima:1", "mean:2"})
    EXPECT_THROW(parse_model(bad), Error) << bad;
}

TEST(SelectModel, SingleCandidateIsNotScored) {
  const std::vector<ForecastModel> one{MovingAverage{2}};
  int calls = 0;
  const auto m = select_model(one, [&](const ForecastModel&) {
    ++calls;
    return 0.0;
  });
  EXPECT_EQ(m, one.front());
  EXPECT_EQ(calls, 0);
}

TEST(SelectModel, HighestScoreWinsAndTiesKeepListOrder) {
  const auto c = default_candidates();
  const auto best = select_model(c, [](const ForecastModel& m) {
    return std::holds_alternative<WeightedMovingAverage>(m) ? 0.9 : 0.6;
  });
  EXPECT_TRUE(std::holds_alternative<WeightedMovingAverage>(best));
  const auto tie = select_model(c, [](const ForecastModel&) { return 0.7; });
  EXPECT_EQ(tie, c.front());
  EXPECT_THROW(select_model(std::vector<ForecastModel>{},
                            [](const ForecastModel&) { return 0.0; }),
               Error);
}

}  // namespace
}  // namespace rpm
