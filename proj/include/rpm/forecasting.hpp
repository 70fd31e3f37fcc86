#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "rpm/error.hpp"

namespace rpm {

/// Mean of every observation.
struct SimpleMean {
  friend bool operator==(const SimpleMean&, const SimpleMean&) = default;
};

/// Mean of the `window` most recent observations.
struct MovingAverage {
  std::size_t window = 3;
  friend bool operator==(const MovingAverage&, const MovingAverage&) = default;
};

/// Dot product of `weights` with the last weights.size() observations,
/// weights ordered oldest to newest.
struct WeightedMovingAverage {
  std::vector<double> weights{0.2, 0.3, 0.5};
  friend bool operator==(const WeightedMovingAverage&,
                         const WeightedMovingAverage&) = default;
};

/// F(t+1) = alpha * A(t) + (1 - alpha) * F(t), seeded with F(1) = A(1).
struct ExponentialSmoothing {
  double alpha = 0.5;
  friend bool operator==(const ExponentialSmoothing&,
                         const ExponentialSmoothing&) = default;
};

using ForecastModel = std::variant<SimpleMean, MovingAverage,
                                   WeightedMovingAverage, ExponentialSmoothing>;

inline void validate(const ForecastModel& model) {
  std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MovingAverage>) {
          if (m.window < 1)
            throw Error(ErrorCode::InvalidArgument,
                        "moving average window must be >= 1");
        } else if constexpr (std::is_same_v<M, WeightedMovingAverage>) {
          if (m.weights.empty())
            throw Error(ErrorCode::InvalidArgument, "WMA needs weights");
          double sum = 0.0;
          for (double c : m.weights) {
            if (!(c >= 0.0) || !std::isfinite(c))
              throw Error(ErrorCode::InvalidArgument,
                          "WMA weights must be nonnegative");
            sum += c;
          }
          if (std::abs(sum - 1.0) > 1e-9)
            throw Error(ErrorCode::InvalidArgument,
                        "WMA weights must sum to 1");
        } else if constexpr (std::is_same_v<M, ExponentialSmoothing>) {
          if (!(m.alpha >= 0.0 && m.alpha <= 1.0))
            throw Error(ErrorCode::InvalidArgument,
                        "smoothing alpha must lie in [0, 1]");
        }
      },
      model);
}

namespace detail {

inline double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

}  // namespace detail

/// One-step-ahead forecast. MA and WMA fall back to the simple mean when
/// the series is shorter than their window.
inline double forecast(const ForecastModel& model,
                       std::span<const double> series) {
  if (series.empty())
    throw Error(ErrorCode::InvalidArgument, "cannot forecast an empty series");
  validate(model);
  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SimpleMean>) {
          return detail::mean_of(series);
        } else if constexpr (std::is_same_v<M, MovingAverage>) {
          if (series.size() < m.window) return detail::mean_of(series);
          return detail::mean_of(series.last(m.window));
        } else if constexpr (std::is_same_v<M, WeightedMovingAverage>) {
          if (series.size() < m.weights.size()) return detail::mean_of(series);
          const auto tail = series.last(m.weights.size());
          double acc = 0.0;
          for (std::size_t i = 0; i < tail.size(); ++i)
            acc += m.weights[i] * tail[i];
          return acc;
        } else {
          double f = series.front();
          for (double a : series) f = m.alpha * a + (1.0 - m.alpha) * f;
          return f;
        }
      },
      model);
}

/// Config-string form: `mean`, `ma:3`, `wma:0.2,0.3,0.5`, `ema:0.5`.
inline ForecastModel parse_model(std::string_view spec) {
  const auto colon = spec.find(':');
  const auto name = spec.substr(0, colon);
  const std::string args =
      colon == std::string_view::npos ? "" : std::string(spec.substr(colon + 1));
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::InvalidArgument,
                 "bad forecast model `" + std::string(spec) + "`: " + why);
  };
  auto parse_number = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw bad("`" + text + "` is not a number");
    }
    if (used != text.size()) throw bad("`" + text + "` is not a number");
    return v;
  };

  ForecastModel model;
  if (name == "mean") {
    if (!args.empty()) throw bad("takes no parameters");
    model = SimpleMean{};
  } else if (name == "ma") {
    const double n = parse_number(args);
    if (n < 1 || n != std::floor(n)) throw bad("window must be an integer >= 1");
    model = MovingAverage{static_cast<std::size_t>(n)};
  } else if (name == "wma") {
    WeightedMovingAverage wma;
    wma.weights.clear();
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) wma.weights.push_back(parse_number(item));
    model = std::move(wma);
  } else if (name == "ema") {
    model = ExponentialSmoothing{parse_number(args)};
  } else {
    throw bad("unknown model");
  }
  validate(model);
  return model;
}

namespace detail {

// Shortest text that parses back to the same double.
inline std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline std::string to_string(const ForecastModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using M = std::decay_t<decltype(m)>;
        std::ostringstream out;
        if constexpr (std::is_same_v<M, SimpleMean>) {
          out << "mean";
        } else if constexpr (std::is_same_v<M, MovingAverage>) {
          out << "ma:" << m.window;
        } else if constexpr (std::is_same_v<M, WeightedMovingAverage>) {
          out << "wma:";
          for (std::size_t i = 0; i < m.weights.size(); ++i)
            out << (i ? "," : "") << detail::shortest(m.weights[i]);
        } else {
          out << "ema:" << detail::shortest(m.alpha);
        }
        return out.str();
      },
      model);
}

/// Candidate grid searched when the rate model is left to selection.
inline std::vector<ForecastModel> default_candidates() {
  return {SimpleMean{},
          MovingAverage{2},
          MovingAverage{3},
          MovingAverage{5},
          WeightedMovingAverage{{0.2, 0.3, 0.5}},
          ExponentialSmoothing{0.3},
          ExponentialSmoothing{0.5},
          ExponentialSmoothing{0.8}};
}

/// Picks the candidate with the highest score(candidate); the earliest
/// candidate wins ties. `score` is typically a mean training AUROC.
template <class Score>
ForecastModel select_model(std::span<const ForecastModel> candidates,
                           Score&& score) {
  if (candidates.empty())
    throw Error(ErrorCode::InvalidArgument, "no forecast candidates");
  if (candidates.size() == 1) return candidates.front();
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = score(candidates[i]);
    if (i == 0 || s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return candidates[best];
}

}  // namespace rpm
