#include "cryfl/federation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cryfl/error.hpp"
#include "cryfl/rng.hpp"

namespace cryfl {

namespace {

std::vector<Silo> build_silos(const Dataset& data, std::vector<std::vector<std::size_t>>& members) {
  std::vector<Silo> silos(members.size());
  for (std::size_t s = 0; s < members.size(); ++s) {
    std::sort(members[s].begin(), members[s].end());
    silos[s].id = static_cast<int>(s);
    silos[s].data.reserve(members[s].size());
    for (auto i : members[s]) silos[s].data.push_back(data[i]);
  }
  return silos;
}

void assign_iid(std::size_t n, std::size_t k, Rng& rng, std::vector<std::vector<std::size_t>>& members) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx);
  const std::size_t base = n / k;
  const std::size_t rem = n % k;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t take = base + (s < rem ? 1 : 0);
    members[s].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos), idx.begin() + static_cast<std::ptrdiff_t>(pos + take));
    pos += take;
  }
}

void assign_dirichlet(const Dataset& data, std::size_t k, double alpha, Rng& rng,
                      std::vector<std::vector<std::size_t>>& members) {
  if (!(alpha > 0.0)) throw Error(Errc::InvalidConfig, "Dirichlet alpha must be > 0");
  for (int cls : {kNormal, kAsphyxia}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data[i].label == cls) idx.push_back(i);
    if (idx.empty()) continue;
    rng.shuffle(idx);
    std::vector<double> p(k);
    for (auto& v : p) v = rng.gamma(alpha);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    double cum = 0.0;
    std::size_t start = 0;
    for (std::size_t s = 0; s < k; ++s) {
      cum += p[s] / total;
      const std::size_t stop =
          s + 1 == k ? idx.size()
                     : std::min(idx.size(), static_cast<std::size_t>(std::llround(cum * static_cast<double>(idx.size()))));
      for (std::size_t i = start; i < std::max(start, stop); ++i) members[s].push_back(idx[i]);
      start = std::max(start, stop);
    }
  }
  // Repair: every silo must hold at least one example.
  for (std::size_t s = 0; s < k; ++s) {
    if (!members[s].empty()) continue;
    std::size_t largest = 0;
    for (std::size_t t = 1; t < k; ++t)
      if (members[t].size() > members[largest].size()) largest = t;
    members[s].push_back(members[largest].back());
    members[largest].pop_back();
  }
}

}  // namespace

std::vector<Silo> partition_dataset(const Dataset& data, int num_silos, const PartitionStrategy& strategy,
                                    std::uint64_t seed) {
  if (num_silos < 1) throw Error(Errc::InvalidConfig, "need at least one silo");
  const auto k = static_cast<std::size_t>(num_silos);
  if (data.size() < k)
    throw Error(Errc::NotEnoughData,
                std::to_string(data.size()) + " examples cannot fill " + std::to_string(num_silos) + " silos");
  Rng rng(derive_seed(seed, {stream_tag("partition")}));
  std::vector<std::vector<std::size_t>> members(k);
  if (strategy.kind == PartitionKind::IidEqual)
    assign_iid(data.size(), k, rng, members);
  else
    assign_dirichlet(data, k, strategy.dirichlet_alpha, rng, members);
  return build_silos(data, members);
}

std::vector<const Silo*> select_clients(std::span<const Silo> silos, double fraction, std::uint64_t seed, int round) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(Errc::InvalidConfig, "client fraction must be in (0, 1]");
  const std::size_t n = silos.size();
  const auto wanted = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  const std::size_t m = std::clamp<std::size_t>(wanted, 1, std::max<std::size_t>(1, n));

  std::vector<const Silo*> chosen;
  chosen.reserve(m);
  if (m >= n) {
    for (const auto& s : silos) chosen.push_back(&s);
  } else {
    std::vector<std::size_t> pos(n);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    Rng rng(derive_seed(seed, {stream_tag("select"), static_cast<std::uint64_t>(round)}));
    for (std::size_t i = 0; i < m; ++i) std::swap(pos[i], pos[i + static_cast<std::size_t>(rng.below(n - i))]);
    for (std::size_t i = 0; i < m; ++i) chosen.push_back(&silos[pos[i]]);
  }
  std::sort(chosen.begin(), chosen.end(), [](const Silo* a, const Silo* b) { return a->id < b->id; });
  return chosen;
}

std::uint64_t client_seed(std::uint64_t seed, int round, int silo_id) {
  return derive_seed(seed, {stream_tag("client"), static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(silo_id)});
}

std::vector<double> aggregate(std::vector<WeightUpdate> updates) {
  if (updates.empty()) throw Error(Errc::EmptyDataset, "nothing to aggregate");
  std::sort(updates.begin(), updates.end(), [](const auto& a, const auto& b) { return a.silo_id < b.silo_id; });
  const std::size_t dim = updates.front().weights.size();
  std::size_t total = 0;
  for (const auto& u : updates) {
    if (u.weights.size() != dim) throw Error(Errc::DimensionMismatch, "client updates differ in dimension");
    total += u.n;
  }
  if (total == 0) throw Error(Errc::EmptyDataset, "clients report no data");

  std::vector<double> out(dim, 0.0);
  std::vector<double> lo = updates.front().weights;
  std::vector<double> hi = lo;
  for (const auto& u : updates) {
    const double share = static_cast<double>(u.n) / static_cast<double>(total);
    for (std::size_t j = 0; j < dim; ++j) {
      out[j] += share * u.weights[j];
      lo[j] = std::min(lo[j], u.weights[j]);
      hi[j] = std::max(hi[j], u.weights[j]);
    }
  }
  // The shares sum to 1 only up to rounding; keep the result in the hull.
  for (std::size_t j = 0; j < dim; ++j) out[j] = std::clamp(out[j], lo[j], hi[j]);
  return out;
}

std::pair<double, double> evaluate_global(const SvmModel& model, std::span<const Silo> silos) {
  if (silos.empty()) throw Error(Errc::EmptyDataset, "no silos to evaluate");
  Dataset all;
  double acc = 0.0;
  for (const auto& s : silos) {
    all.insert(all.end(), s.data.begin(), s.data.end());
    acc += accuracy(model, s.data);
  }
  return {objective(model, all), acc / static_cast<double>(silos.size())};
}

std::pair<std::vector<double>, RoundRecord> run_round(const std::vector<double>& global_weights,
                                                      std::span<const Silo> silos, const FedConfig& cfg,
                                                      int round_index) {
  if (silos.empty()) throw Error(Errc::EmptyDataset, "no silos");
  const auto selected = select_clients(silos, cfg.client_fraction, cfg.seed, round_index);

  std::vector<WeightUpdate> updates;
  updates.reserve(selected.size());
  for (const Silo* silo : selected) {
    TrainConfig tc = cfg.train_cfg;
    tc.epochs = cfg.local_epochs;
    tc.seed = client_seed(cfg.seed, round_index, silo->id);
    auto [local, trace] = train_local(SvmModel{global_weights, tc.lambda}, silo->data, tc);
    updates.push_back({silo->id, std::move(local.weights), silo->size()});
  }

  RoundRecord rec;
  rec.round = round_index;
  for (const Silo* s : selected) rec.selected_ids.push_back(s->id);
  rec.global_weights = aggregate(std::move(updates));
  const auto [loss, acc] = evaluate_global(SvmModel{rec.global_weights, cfg.train_cfg.lambda}, silos);
  rec.train_loss = loss;
  rec.avg_train_accuracy = acc;
  return {rec.global_weights, rec};
}

FederatedResult run_federated_training(const Dataset& data, const FedConfig& cfg) {
  if (data.empty()) throw Error(Errc::EmptyDataset, "no training data");
  if (cfg.rounds < 0 || cfg.local_epochs < 0) throw Error(Errc::InvalidConfig, "rounds and local_epochs must be >= 0");
  FederatedResult result;
  result.model = SvmModel::zeros(data.front().features.size(), cfg.train_cfg.lambda);
  if (cfg.rounds == 0) return result;

  const auto silos = partition_dataset(data, cfg.num_silos, cfg.partition, cfg.seed);
  int stalled = 0;
  for (int r = 0; r < cfg.rounds; ++r) {
    auto [weights, rec] = run_round(result.model.weights, silos, cfg, r);
    result.model.weights = std::move(weights);
    if (cfg.early_stop && !result.history.empty()) {
      stalled = result.history.back().train_loss - rec.train_loss < cfg.early_stop_tol ? stalled + 1 : 0;
    }
    result.history.push_back(std::move(rec));
    if (cfg.early_stop && stalled >= cfg.early_stop_patience) break;
  }
  return result;
}

std::pair<SvmModel, LossTrace> train_matched_centralized(const Dataset& data, const FedConfig& cfg) {
  if (data.empty()) throw Error(Errc::EmptyDataset, "no training data");
  SvmModel model = SvmModel::zeros(data.front().features.size(), cfg.train_cfg.lambda);
  LossTrace trace;
  for (int r = 0; r < cfg.rounds; ++r) {
    TrainConfig tc = cfg.train_cfg;
    tc.epochs = cfg.local_epochs;
    tc.seed = client_seed(cfg.seed, r, 0);
    auto [next, t] = train_local(model, data, tc);
    model = std::move(next);
    trace.insert(trace.end(), t.begin(), t.end());
  }
  return {model, trace};
}

}  // namespace cryfl
