#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cryfl/features.hpp"

namespace cryfl {

inline constexpr int kAsphyxia = 1;
inline constexpr int kNormal = -1;

struct LabeledExample {
  FeatureVector features;
  int label = kNormal;  // +1 asphyxia, -1 normal
  std::string source_id;
};

using Dataset = std::vector<LabeledExample>;

// Linear classifier h(x) = w . [x, 1]; the last weight is the bias and is
// regularized along with the rest.
struct SvmModel {
  std::vector<double> weights;
  double lambda = 1e-3;

  static SvmModel zeros(std::size_t feature_dim, double lambda) {
    return SvmModel{std::vector<double>(feature_dim + 1, 0.0), lambda};
  }
  std::size_t feature_dim() const { return weights.empty() ? 0 : weights.size() - 1; }
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t t = 0;
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState fresh(std::size_t dim, double alpha = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                         double epsilon = 1e-8) {
    return AdamState{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0, alpha, beta1, beta2, epsilon};
  }
};

struct TrainConfig {
  int epochs = 5;
  int batch_size = 32;
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double lambda = 1e-3;
  std::uint64_t seed = 0;
};

// Objective value after each epoch.
using LossTrace = std::vector<double>;

// w . [x, 1]
double margin_score(const SvmModel& model, std::span<const double> x);

double hinge_loss(const SvmModel& model, std::span<const double> x, int y);

// (lambda / 2) ||w||^2 + mean hinge loss.
double objective(const SvmModel& model, std::span<const LabeledExample> data);

// lambda w + mean over margin violators (y w.x~ < 1) of -y x~.
std::vector<double> subgradient(const SvmModel& model, std::span<const LabeledExample> batch);

// Increments t, then applies the bias-corrected Adam update to `weights`.
void adam_step(AdamState& state, std::span<const double> grad, std::vector<double>& weights);

// Mini-batch Adam over `cfg.epochs` shuffled passes starting from a fresh
// optimizer state. Epoch e shuffles with the stream derived from (cfg.seed, e).
std::pair<SvmModel, LossTrace> train_local(const SvmModel& model, std::span<const LabeledExample> data,
                                           const TrainConfig& cfg);

struct Prediction {
  int label = kAsphyxia;
  double score = 0.0;
};

// Score 0 is labeled asphyxia.
Prediction predict(const SvmModel& model, std::span<const double> x);

double accuracy(const SvmModel& model, std::span<const LabeledExample> data);

}  // namespace cryfl
