#include "cryfl/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cryfl/error.hpp"
#include "cryfl/rng.hpp"

namespace cryfl {

namespace {

void check_dims(const SvmModel& model, std::size_t feature_dim) {
  if (model.weights.size() != feature_dim + 1)
    throw Error(Errc::DimensionMismatch, "model has " + std::to_string(model.weights.size()) +
                                             " weights, input has " + std::to_string(feature_dim) + " features");
}

void check_label(int y) {
  if (y != 1 && y != -1) throw Error(Errc::InvalidLabel, "label " + std::to_string(y) + " is not -1 or +1");
}

double squared_norm(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

}  // namespace

double margin_score(const SvmModel& model, std::span<const double> x) {
  check_dims(model, x.size());
  double s = model.weights.back();
  for (std::size_t j = 0; j < x.size(); ++j) s += model.weights[j] * x[j];
  return s;
}

double hinge_loss(const SvmModel& model, std::span<const double> x, int y) {
  check_label(y);
  return std::max(0.0, 1.0 - y * margin_score(model, x));
}

double objective(const SvmModel& model, std::span<const LabeledExample> data) {
  if (data.empty()) throw Error(Errc::EmptyDataset, "objective of an empty dataset");
  double loss = 0.0;
  for (const auto& ex : data) loss += hinge_loss(model, ex.features, ex.label);
  return 0.5 * model.lambda * squared_norm(model.weights) + loss / static_cast<double>(data.size());
}

std::vector<double> subgradient(const SvmModel& model, std::span<const LabeledExample> batch) {
  if (batch.empty()) throw Error(Errc::EmptyDataset, "subgradient of an empty batch");
  const std::size_t dim = model.weights.size();
  std::vector<double> hinge(dim, 0.0);
  for (const auto& ex : batch) {
    check_label(ex.label);
    if (ex.label * margin_score(model, ex.features) < 1.0) {
      for (std::size_t j = 0; j + 1 < dim; ++j) hinge[j] -= ex.label * ex.features[j];
      hinge[dim - 1] -= ex.label;
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  std::vector<double> g(dim);
  for (std::size_t j = 0; j < dim; ++j) g[j] = model.lambda * model.weights[j] + inv * hinge[j];
  return g;
}

void adam_step(AdamState& state, std::span<const double> grad, std::vector<double>& weights) {
  if (grad.size() != weights.size() || state.m.size() != weights.size() || state.v.size() != weights.size())
    throw Error(Errc::DimensionMismatch, "gradient, weights and optimizer state differ in length");
  for (double g : grad)
    if (!std::isfinite(g)) throw Error(Errc::NonFiniteGradient, "gradient contains a non-finite value");

  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t j = 0; j < weights.size(); ++j) {
    state.m[j] = state.beta1 * state.m[j] + (1.0 - state.beta1) * grad[j];
    state.v[j] = state.beta2 * state.v[j] + (1.0 - state.beta2) * grad[j] * grad[j];
    const double m_hat = state.m[j] / c1;
    const double v_hat = state.v[j] / c2;
    weights[j] -= state.alpha * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

std::pair<SvmModel, LossTrace> train_local(const SvmModel& model, std::span<const LabeledExample> data,
                                           const TrainConfig& cfg) {
  if (data.empty()) throw Error(Errc::EmptyDataset, "cannot train on an empty dataset");
  if (cfg.epochs < 0 || cfg.batch_size < 1) throw Error(Errc::InvalidConfig, "need epochs >= 0 and batch_size >= 1");
  for (const auto& ex : data) {
    check_dims(model, ex.features.size());
    check_label(ex.label);
  }

  SvmModel w = model;
  w.lambda = cfg.lambda;
  LossTrace trace;
  if (cfg.epochs == 0) return {model, trace};

  AdamState adam = AdamState::fresh(w.weights.size(), cfg.alpha, cfg.beta1, cfg.beta2, cfg.epsilon);
  const std::size_t n = data.size();
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  std::vector<std::size_t> order(n);
  std::vector<LabeledExample> batch;
  batch.reserve(batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.seed, {stream_tag("epoch"), static_cast<std::uint64_t>(epoch)}));
    rng.shuffle(order);
    for (std::size_t b = 0; b < n; b += batch_size) {
      batch.clear();
      for (std::size_t i = b; i < std::min(n, b + batch_size); ++i) batch.push_back(data[order[i]]);
      const auto g = subgradient(w, batch);
      adam_step(adam, g, w.weights);
    }
    trace.push_back(objective(w, data));
  }
  return {w, trace};
}

Prediction predict(const SvmModel& model, std::span<const double> x) {
  const double s = margin_score(model, x);
  return {s >= 0.0 ? kAsphyxia : kNormal, s};
}

double accuracy(const SvmModel& model, std::span<const LabeledExample> data) {
  if (data.empty()) throw Error(Errc::EmptyDataset, "accuracy of an empty dataset");
  std::size_t correct = 0;
  for (const auto& ex : data) correct += predict(model, ex.features).label == ex.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace cryfl
