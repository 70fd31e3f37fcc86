#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rpm/error.hpp"
#include "rpm/parallel.hpp"
#include "rpm/rate_features.hpp"

namespace rpm {

enum class ClassWeighting { Balanced, None };

struct TrainConfig {
  double cost = 1.0;  // C
  int epochs = 50;
  double learning_rate = 0.1;  // decays as lr / sqrt(epoch)
  std::uint64_t seed = 0;
  ClassWeighting class_weighting = ClassWeighting::Balanced;
  // Explicit degree-2 monomial feature map in place of a polynomial kernel.
  bool degree2_expansion = false;
  // batch_size > 1 switches to mini-batch steps whose subgradient is summed
  // over fixed blocks of kBlockRows rows, reduced in block order; the model
  // then does not depend on `threads`.
  std::size_t batch_size = 1;
  unsigned threads = 1;
};

inline void validate(const TrainConfig& cfg) {
  if (!(cfg.cost > 0.0))
    throw Error(ErrorCode::InvalidArgument, "cost must be > 0");
  if (cfg.epochs < 1)
    throw Error(ErrorCode::InvalidArgument, "epochs must be >= 1");
  if (!(cfg.learning_rate > 0.0))
    throw Error(ErrorCode::InvalidArgument, "learning rate must be > 0");
  if (cfg.batch_size < 1)
    throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
}

struct Standardization {
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct LinearModel {
  std::vector<std::string> schema;  // raw input feature names
  std::vector<double> weights;      // over the (possibly expanded) features
  double bias = 0.0;
  Standardization standardization;
  TrainConfig config;
};

struct ClassWeights {
  double positive = 1.0;
  double negative = 1.0;
};

/// Inverse-frequency penalties scaled so the mean per-row weight is 1 and
/// both classes carry the same total penalty.
inline ClassWeights class_weights(std::size_t positives, std::size_t negatives,
                                  ClassWeighting scheme) {
  if (scheme == ClassWeighting::None) return {};
  const double total = static_cast<double>(positives + negatives);
  return {2.0 * static_cast<double>(negatives) / total,
          2.0 * static_cast<double>(positives) / total};
}

/// [x_1..x_d, x_i * x_j for i <= j].
inline std::vector<double> expand_degree2(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  out.reserve(x.size() + x.size() * (x.size() + 1) / 2);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i; j < x.size(); ++j) out.push_back(x[i] * x[j]);
  return out;
}

/// (1/2)|w|^2 + sum_i p_i * max(0, 1 - y_i (w.z_i + b)), y in {-1, +1},
/// with p_i = C * class penalty of row i. Rows are already standardized.
class HingeObjective {
 public:
  HingeObjective(std::vector<double> rows, std::size_t dim,
                 std::vector<double> signs, std::vector<double> penalties)
      : rows_(std::move(rows)),
        dim_(dim),
        signs_(std::move(signs)),
        penalties_(std::move(penalties)) {
    if (rows_.size() != dim_ * signs_.size() ||
        penalties_.size() != signs_.size())
      throw Error(ErrorCode::SchemaMismatch,
                  "objective columns have inconsistent lengths");
  }

  std::size_t size() const noexcept { return signs_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> row(std::size_t i) const {
    return {rows_.data() + i * dim_, dim_};
  }
  double sign(std::size_t i) const { return signs_[i]; }
  double penalty(std::size_t i) const { return penalties_[i]; }

  double margin(std::size_t i, std::span<const double> w, double b) const {
    const auto z = row(i);
    return signs_[i] *
           (std::inner_product(z.begin(), z.end(), w.begin(), 0.0) + b);
  }

  double value(std::span<const double> w, double b) const {
    double v = 0.5 * std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    for (std::size_t i = 0; i < size(); ++i)
      v += penalties_[i] * std::max(0.0, 1.0 - margin(i, w, b));
    return v;
  }

  /// Subgradient with respect to (w, b); the bias component comes last.
  /// Rows sitting exactly on the hinge contribute nothing.
  std::vector<double> subgradient(std::span<const double> w, double b) const {
    std::vector<double> g(w.begin(), w.end());
    g.push_back(0.0);
    for (std::size_t i = 0; i < size(); ++i) {
      if (margin(i, w, b) >= 1.0) continue;
      const double scale = penalties_[i] * signs_[i];
      const auto z = row(i);
      for (std::size_t j = 0; j < dim_; ++j) g[j] -= scale * z[j];
      g[dim_] -= scale;
    }
    return g;
  }

 private:
  std::vector<double> rows_;
  std::size_t dim_;
  std::vector<double> signs_;
  std::vector<double> penalties_;
};

namespace detail {

inline std::vector<double> model_input(const LinearModel& m,
                                       std::span<const double> raw) {
  std::vector<double> x = m.config.degree2_expansion
                              ? expand_degree2(raw)
                              : std::vector<double>(raw.begin(), raw.end());
  for (std::size_t j = 0; j < x.size(); ++j)
    x[j] = (x[j] - m.standardization.mean[j]) / m.standardization.stddev[j];
  return x;
}

}  // namespace detail

/// w . standardize(f) + b.
inline double decision_score(const LinearModel& m, std::span<const double> f) {
  if (f.size() != m.schema.size())
    throw Error(ErrorCode::SchemaMismatch,
                "feature vector has " + std::to_string(f.size()) +
                    " values, model expects " +
                    std::to_string(m.schema.size()));
  const auto x = detail::model_input(m, f);
  return std::inner_product(x.begin(), x.end(), m.weights.begin(), m.bias);
}

/// 1 iff the decision score is strictly positive.
inline int predict(const LinearModel& m, std::span<const double> f) {
  return decision_score(m, f) > 0.0 ? 1 : 0;
}

namespace detail {

inline constexpr std::size_t kBlockRows = 256;

// Mini-batch variant of the SGD loop in train(): a batch of B rows moves w
// against B*w/N - sum over active rows of p_i y_i z_i, all margins taken at
// the weights from before the batch.
inline void train_minibatch(const HingeObjective& obj, const TrainConfig& cfg,
                            std::vector<double>& w, double& b) {
  const std::size_t dim = obj.dim();
  const std::size_t n = obj.size();
  const double count = static_cast<double>(n);
  const std::size_t batch = std::min(cfg.batch_size, n);
  const std::size_t max_blocks = (batch + kBlockRows - 1) / kBlockRows;
  // Per block: dim weight sums followed by the bias sum.
  std::vector<double> partial(max_blocks * (dim + 1));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double eta = cfg.learning_rate / std::sqrt(static_cast<double>(epoch));
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      const std::size_t blocks = (stop - start + kBlockRows - 1) / kBlockRows;
      std::fill(partial.begin(), partial.end(), 0.0);
      parallel_for(blocks, cfg.threads, [&](std::size_t blk) {
        double* acc = partial.data() + blk * (dim + 1);
        const std::size_t lo = start + blk * kBlockRows;
        const std::size_t hi = std::min(stop, lo + kBlockRows);
        for (std::size_t k = lo; k < hi; ++k) {
          const auto i = order[k];
          if (obj.margin(i, w, b) >= 1.0) continue;
          const double scale = obj.penalty(i) * obj.sign(i);
          const auto z = obj.row(i);
          for (std::size_t j = 0; j < dim; ++j) acc[j] += scale * z[j];
          acc[dim] += scale;
        }
      });
      const double shrink =
          1.0 - eta * static_cast<double>(stop - start) / count;
      for (auto& wj : w) wj *= shrink;
      for (std::size_t blk = 0; blk < blocks; ++blk) {
        const double* acc = partial.data() + blk * (dim + 1);
        for (std::size_t j = 0; j < dim; ++j) w[j] += eta * acc[j];
        b += eta * acc[dim];
      }
    }
  }
}

}  // namespace detail

/// Seeded stochastic subgradient descent on HingeObjective over the given
/// rows of `data`. Each step visits one row i (seeded shuffle per epoch)
/// and moves against w/N - [margin_i < 1] p_i y_i z_i.
inline LinearModel train(const Dataset& data, std::span<const std::size_t> rows,
                         const TrainConfig& cfg) {
  validate(cfg);
  if (rows.empty())
    throw Error(ErrorCode::InvalidArgument, "no training rows");
  std::size_t positives = 0;
  for (auto r : rows) positives += data.label(r);
  const std::size_t negatives = rows.size() - positives;
  if (positives == 0 || negatives == 0)
    throw Error(ErrorCode::SingleClass,
                "training data must contain both classes");

  LinearModel model;
  model.schema = data.schema();
  model.config = cfg;

  std::size_t dim = data.num_features();
  if (cfg.degree2_expansion) dim += dim * (dim + 1) / 2;
  std::vector<double> z;
  z.reserve(rows.size() * dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto raw = data.row(rows[i]);
    for (double v : raw) {
      if (!std::isfinite(v))
        throw Error(ErrorCode::NonFiniteFeature,
                    "non-finite feature in row " + std::to_string(rows[i]));
    }
    if (cfg.degree2_expansion) {
      const auto e = expand_degree2(raw);
      z.insert(z.end(), e.begin(), e.end());
    } else {
      z.insert(z.end(), raw.begin(), raw.end());
    }
  }

  // Z-score with training statistics; constant columns keep stddev 1.
  const double count = static_cast<double>(rows.size());
  auto& st = model.standardization;
  st.mean.assign(dim, 0.0);
  st.stddev.assign(dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j) st.mean[j] += z[i * dim + j];
  for (auto& m : st.mean) m /= count;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const double dv = z[i * dim + j] - st.mean[j];
      st.stddev[j] += dv * dv;
    }
  for (auto& s : st.stddev) {
    s = std::sqrt(s / count);
    if (!(s > 0.0) || !std::isfinite(s)) s = 1.0;
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j)
      z[i * dim + j] = (z[i * dim + j] - st.mean[j]) / st.stddev[j];

  const auto pi = class_weights(positives, negatives, cfg.class_weighting);
  std::vector<double> signs(rows.size()), penalties(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool pos = data.label(rows[i]) == 1;
    signs[i] = pos ? 1.0 : -1.0;
    penalties[i] = cfg.cost * (pos ? pi.positive : pi.negative);
  }
  const HingeObjective objective(std::move(z), dim, std::move(signs),
                                 std::move(penalties));

  if (cfg.batch_size > 1) {
    model.weights.assign(dim, 0.0);
    detail::train_minibatch(objective, cfg, model.weights, model.bias);
    return model;
  }

  // w is kept as scale * v so the per-step shrink w *= (1 - eta/N) is O(1).
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  double b = 0.0;
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);
  constexpr std::size_t kPrefetch = 8;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double eta = cfg.learning_rate / std::sqrt(static_cast<double>(epoch));
    const double shrink = 1.0 - eta / count;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t step = 0; step < order.size(); ++step) {
#if defined(__GNUC__)
      if (step + kPrefetch < order.size())
        __builtin_prefetch(objective.row(order[step + kPrefetch]).data());
#endif
      const auto i = order[step];
      const auto zi = objective.row(i);
      double dot = 0.0;
      for (std::size_t j = 0; j < dim; ++j) dot += v[j] * zi[j];
      const bool active = objective.sign(i) * (scale * dot + b) < 1.0;
      scale *= shrink;
      if (active) {
        const double step_size = eta * objective.penalty(i) * objective.sign(i);
        const double inv = step_size / scale;
        for (std::size_t j = 0; j < dim; ++j) v[j] += inv * zi[j];
        b += step_size;
      }
      if (scale < 1e-9) {
        for (auto& vj : v) vj *= scale;
        scale = 1.0;
      }
    }
  }

  std::vector<double> w(dim);
  for (std::size_t j = 0; j < dim; ++j) w[j] = scale * v[j];
  model.weights = std::move(w);
  model.bias = b;
  return model;
}

inline LinearModel train(const Dataset& data, const TrainConfig& cfg) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return train(data, rows, cfg);
}

inline nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"cost", cfg.cost},
          {"epochs", cfg.epochs},
          {"learning_rate", cfg.learning_rate},
          {"seed", cfg.seed},
          {"class_weighting",
           cfg.class_weighting == ClassWeighting::Balanced ? "balanced"
                                                           : "none"},
          {"degree2_expansion", cfg.degree2_expansion},
          {"batch_size", cfg.batch_size}};
}

/// Missing fields keep their defaults.
inline TrainConfig train_config_from_json(const nlohmann::json& j,
                                          TrainConfig cfg = {}) {
  cfg.cost = j.value("cost", cfg.cost);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("class_weighting")) {
    const auto s = j.at("class_weighting").get<std::string>();
    if (s == "balanced")
      cfg.class_weighting = ClassWeighting::Balanced;
    else if (s == "none")
      cfg.class_weighting = ClassWeighting::None;
    else
      throw Error(ErrorCode::InvalidArgument,
                  "class_weighting must be `balanced` or `none`");
  }
  cfg.degree2_expansion = j.value("degree2_expansion", cfg.degree2_expansion);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  validate(cfg);
  return cfg;
}

inline nlohmann::json to_json(const LinearModel& m) {
  return {{"schema", m.schema},
          {"weights", m.weights},
          {"bias", m.bias},
          {"standardization",
           {{"mean", m.standardization.mean},
            {"stddev", m.standardization.stddev}}},
          {"config", to_json(m.config)}};
}

inline LinearModel model_from_json(const nlohmann::json& j) {
  LinearModel m;
  m.schema = j.at("schema").get<std::vector<std::string>>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.standardization.mean =
      j.at("standardization").at("mean").get<std::vector<double>>();
  m.standardization.stddev =
      j.at("standardization").at("stddev").get<std::vector<double>>();
  m.config = train_config_from_json(j.at("config"));
  const auto d = m.schema.size();
  const auto dim = m.config.degree2_expansion ? d + d * (d + 1) / 2 : d;
  if (m.weights.size() != dim || m.standardization.mean.size() != dim ||
      m.standardization.stddev.size() != dim)
    throw Error(ErrorCode::SchemaMismatch,
                "model weights do not match its schema");
  return m;
}

}  // namespace rpm
