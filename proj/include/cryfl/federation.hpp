#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cryfl/svm.hpp"

namespace cryfl {

// One virtual hospital.
struct Silo {
  int id = 0;
  Dataset data;

  std::size_t size() const { return data.size(); }
};

enum class PartitionKind { IidEqual, Dirichlet };

struct PartitionStrategy {
  PartitionKind kind = PartitionKind::IidEqual;
  double dirichlet_alpha = 0.5;

  static PartitionStrategy iid() { return {}; }
  static PartitionStrategy dirichlet(double alpha) { return {PartitionKind::Dirichlet, alpha}; }
};

struct FedConfig {
  int num_silos = 10;
  int rounds = 50;
  int local_epochs = 5;
  double client_fraction = 1.0;
  PartitionStrategy partition;
  std::uint64_t seed = 0;
  TrainConfig train_cfg;
  bool early_stop = false;
  double early_stop_tol = 1e-6;
  int early_stop_patience = 5;
};

struct RoundRecord {
  int round = 0;
  std::vector<int> selected_ids;
  std::vector<double> global_weights;
  double train_loss = 0.0;
  double avg_train_accuracy = 0.0;
};

struct WeightUpdate {
  int silo_id = 0;
  std::vector<double> weights;
  std::size_t n = 0;
};

// Silos keep their examples in original dataset order.
std::vector<Silo> partition_dataset(const Dataset& data, int num_silos, const PartitionStrategy& strategy,
                                    std::uint64_t seed);

// Sorted by silo id. Deterministic in (seed, round).
std::vector<const Silo*> select_clients(std::span<const Silo> silos, double fraction, std::uint64_t seed, int round);

// Seed of the local-training stream for one client in one round.
std::uint64_t client_seed(std::uint64_t seed, int round, int silo_id);

// Sum over clients of (n_k / n) w_k with n the total over the given updates,
// accumulated in ascending silo id order.
std::vector<double> aggregate(std::vector<WeightUpdate> updates);

// Evaluates `weights` over every silo: regularized objective on the union and
// mean per-silo accuracy.
std::pair<double, double> evaluate_global(const SvmModel& model, std::span<const Silo> silos);

std::pair<std::vector<double>, RoundRecord> run_round(const std::vector<double>& global_weights,
                                                      std::span<const Silo> silos, const FedConfig& cfg,
                                                      int round_index);

struct FederatedResult {
  SvmModel model;
  std::vector<RoundRecord> history;
};

FederatedResult run_federated_training(const Dataset& data, const FedConfig& cfg);

// Centralized training under the federated batch schedule: `rounds` segments
// of `local_epochs` epochs, each from a fresh optimizer state seeded as the
// single silo 0 would be. Matches a one-silo federation bitwise.
std::pair<SvmModel, LossTrace> train_matched_centralized(const Dataset& data, const FedConfig& cfg);

}  // namespace cryfl
