#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cryfl/audio.hpp"
#include "cryfl/dataset.hpp"
#include "cryfl/error.hpp"
#include "cryfl/federation.hpp"
#include "cryfl/features.hpp"
#include "cryfl/forest.hpp"
#include "cryfl/svm.hpp"

namespace py = pybind11;
using namespace cryfl;

namespace {

using PyExample = std::pair<std::vector<double>, int>;

Dataset to_dataset(const std::vector<PyExample>& rows) {
  Dataset d;
  d.reserve(rows.size());
  for (const auto& [x, y] : rows) d.push_back({x, y, {}});
  return d;
}

}  // namespace

PYBIND11_MODULE(_cryfl, m) {
  m.doc() = "Federated linear-SVM infant-cry screening pipeline";

  py::register_exception<Error>(m, "CryflError", PyExc_ValueError);

  py::class_<AudioClip>(m, "AudioClip")
      .def(py::init<>())
      .def(py::init([](std::vector<double> samples, int rate) { return AudioClip{std::move(samples), rate}; }),
           py::arg("samples"), py::arg("sample_rate_hz") = kCanonicalRateHz)
      .def_readwrite("samples", &AudioClip::samples)
      .def_readwrite("sample_rate_hz", &AudioClip::sample_rate_hz)
      .def_property_readonly("duration_seconds", &AudioClip::duration_seconds);

  py::class_<FilterSpec>(m, "FilterSpec")
      .def(py::init([](double lo, double hi, int order) { return FilterSpec{lo, hi, order}; }),
           py::arg("low_cut_hz") = 100.0, py::arg("high_cut_hz") = 4000.0, py::arg("order") = 4)
      .def_readwrite("low_cut_hz", &FilterSpec::low_cut_hz)
      .def_readwrite("high_cut_hz", &FilterSpec::high_cut_hz)
      .def_readwrite("order", &FilterSpec::order);

  py::class_<SecondOrderSection>(m, "SecondOrderSection")
      .def_readonly("b0", &SecondOrderSection::b0)
      .def_readonly("b1", &SecondOrderSection::b1)
      .def_readonly("b2", &SecondOrderSection::b2)
      .def_readonly("a1", &SecondOrderSection::a1)
      .def_readonly("a2", &SecondOrderSection::a2);

  py::class_<VadConfig>(m, "VadConfig")
      .def(py::init<>())
      .def_readwrite("frame_ms", &VadConfig::frame_ms)
      .def_readwrite("energy_threshold_db", &VadConfig::energy_threshold_db)
      .def_readwrite("hangover_frames", &VadConfig::hangover_frames);

  py::class_<RirFilter>(m, "RirFilter")
      .def_readonly("taps", &RirFilter::taps)
      .def_readonly("sample_rate_hz", &RirFilter::sample_rate_hz);

  m.def("resample", &resample, py::arg("clip"), py::arg("target_rate_hz"));
  m.def("design_butterworth_bandpass", &design_butterworth_bandpass, py::arg("spec"), py::arg("sample_rate_hz"));
  m.def("cascade_magnitude",
        [](const std::vector<SecondOrderSection>& s, double f, int rate) { return cascade_magnitude(s, f, rate); });
  m.def("apply_filter", [](const AudioClip& c, const std::vector<SecondOrderSection>& s) { return apply_filter(c, s); });
  m.def(
      "detect_voice_activity",
      [](const AudioClip& c, const VadConfig& cfg) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& s : detect_voice_activity(c, cfg)) out.emplace_back(s.start, s.end);
        return out;
      },
      py::arg("clip"), py::arg("cfg") = VadConfig{});
  m.def("tanh_distortion", &tanh_distortion, py::arg("clip"), py::arg("gain"));
  m.def("prepare_rir", &prepare_rir, py::arg("raw"), py::arg("flip_time_axis") = false, py::arg("tail_samples") = 0);
  m.def("convolve_rir", &convolve_rir);
  m.def("synthesize_rir", &synthesize_rir, py::arg("duration_s"), py::arg("rt60_s"), py::arg("seed"),
        py::arg("sample_rate_hz") = kCanonicalRateHz);

  py::class_<MfccConfig>(m, "MfccConfig")
      .def(py::init<>())
      .def_readwrite("frame_ms", &MfccConfig::frame_ms)
      .def_readwrite("hop_ms", &MfccConfig::hop_ms)
      .def_readwrite("n_mels", &MfccConfig::n_mels)
      .def_readwrite("n_coeffs", &MfccConfig::n_coeffs)
      .def_readwrite("fmin_hz", &MfccConfig::fmin_hz)
      .def_readwrite("fmax_hz", &MfccConfig::fmax_hz)
      .def_readwrite("log_floor", &MfccConfig::log_floor);

  m.def("power_spectrum", [](const std::vector<double>& frame) { return power_spectrum(frame); });
  m.def("mfcc", &mfcc, py::arg("clip"), py::arg("cfg") = MfccConfig{});

  py::class_<ForestConfig>(m, "ForestConfig")
      .def(py::init<>())
      .def_readwrite("n_trees", &ForestConfig::n_trees)
      .def_readwrite("max_depth", &ForestConfig::max_depth)
      .def_readwrite("min_samples_leaf", &ForestConfig::min_samples_leaf)
      .def_readwrite("features_per_split", &ForestConfig::features_per_split)
      .def_readwrite("seed", &ForestConfig::seed);

  py::class_<RandomForest>(m, "RandomForest")
      .def("predict", [](const RandomForest& f, const std::vector<double>& x) { return f.predict(x); })
      .def_property_readonly("n_trees", [](const RandomForest& f) { return f.trees.size(); });

  py::class_<FeatureSelector>(m, "FeatureSelector")
      .def_readonly("selected_indices", &FeatureSelector::selected_indices)
      .def_readonly("importances", &FeatureSelector::importances);

  m.def(
      "train_random_forest",
      [](const std::vector<std::vector<double>>& x, const std::vector<int>& y, const ForestConfig& cfg) {
        return train_random_forest(x, y, cfg);
      },
      py::arg("features"), py::arg("labels"), py::arg("cfg") = ForestConfig{});
  m.def("select_features", &select_features, py::arg("forest"), py::arg("k"));
  m.def("apply_selector", [](const std::vector<double>& v, const FeatureSelector& s) { return apply_selector(v, s); });

  py::class_<SvmModel>(m, "SvmModel")
      .def(py::init([](std::vector<double> w, double lambda) { return SvmModel{std::move(w), lambda}; }),
           py::arg("weights"), py::arg("lambda_") = 1e-3)
      .def_static("zeros", &SvmModel::zeros, py::arg("feature_dim"), py::arg("lambda_") = 1e-3)
      .def_readwrite("weights", &SvmModel::weights)
      .def_readwrite("lambda_", &SvmModel::lambda);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("alpha", &TrainConfig::alpha)
      .def_readwrite("beta1", &TrainConfig::beta1)
      .def_readwrite("beta2", &TrainConfig::beta2)
      .def_readwrite("epsilon", &TrainConfig::epsilon)
      .def_readwrite("lambda_", &TrainConfig::lambda)
      .def_readwrite("seed", &TrainConfig::seed);

  m.def("hinge_loss", [](const SvmModel& w, const std::vector<double>& x, int y) { return hinge_loss(w, x, y); });
  m.def("objective", [](const SvmModel& w, const std::vector<PyExample>& d) { return objective(w, to_dataset(d)); });
  m.def("subgradient",
        [](const SvmModel& w, const std::vector<PyExample>& d) { return subgradient(w, to_dataset(d)); });
  m.def(
      "train_local",
      [](const SvmModel& w, const std::vector<PyExample>& d, const TrainConfig& cfg) {
        return train_local(w, to_dataset(d), cfg);
      },
      py::arg("model"), py::arg("data"), py::arg("cfg") = TrainConfig{});
  m.def("predict", [](const SvmModel& w, const std::vector<double>& x) {
    const auto p = predict(w, x);
    return std::make_pair(p.label, p.score);
  });

  m.def(
      "aggregate",
      [](const std::vector<std::pair<std::vector<double>, std::size_t>>& updates) {
        std::vector<WeightUpdate> u;
        int id = 0;
        for (const auto& [w, n] : updates) u.push_back({id++, w, n});
        return aggregate(std::move(u));
      },
      py::arg("updates"));

  py::class_<FedConfig>(m, "FedConfig")
      .def(py::init<>())
      .def_readwrite("num_silos", &FedConfig::num_silos)
      .def_readwrite("rounds", &FedConfig::rounds)
      .def_readwrite("local_epochs", &FedConfig::local_epochs)
      .def_readwrite("client_fraction", &FedConfig::client_fraction)
      .def_readwrite("seed", &FedConfig::seed)
      .def_readwrite("train_cfg", &FedConfig::train_cfg)
      .def_property(
          "dirichlet_alpha",
          [](const FedConfig& c) -> py::object {
            if (c.partition.kind == PartitionKind::IidEqual) return py::none();
            return py::float_(c.partition.dirichlet_alpha);
          },
          [](FedConfig& c, py::object a) {
            c.partition = a.is_none() ? PartitionStrategy::iid() : PartitionStrategy::dirichlet(a.cast<double>());
          });

  py::class_<RoundRecord>(m, "RoundRecord")
      .def_readonly("round", &RoundRecord::round)
      .def_readonly("selected_ids", &RoundRecord::selected_ids)
      .def_readonly("global_weights", &RoundRecord::global_weights)
      .def_readonly("train_loss", &RoundRecord::train_loss)
      .def_readonly("avg_train_accuracy", &RoundRecord::avg_train_accuracy);

  m.def("run_federated_training", [](const std::vector<PyExample>& d, const FedConfig& cfg) {
    auto r = run_federated_training(to_dataset(d), cfg);
    return std::make_pair(r.model, r.history);
  });

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("sensitivity", &MetricsReport::sensitivity)
      .def_readonly("specificity", &MetricsReport::specificity)
      .def_readonly("uar", &MetricsReport::uar)
      .def_readonly("accuracy", &MetricsReport::accuracy);

  m.def("metrics", [](const std::vector<int>& predictions, const std::vector<int>& labels) {
    return metrics(confusion(predictions, labels));
  });

  py::class_<SynthConfig>(m, "SynthConfig")
      .def(py::init<>())
      .def_readwrite("n_normal", &SynthConfig::n_normal)
      .def_readwrite("n_asphyxia", &SynthConfig::n_asphyxia)
      .def_readwrite("asphyxia_noise_db", &SynthConfig::asphyxia_noise_db)
      .def_readwrite("seed", &SynthConfig::seed);

  m.def("generate_synthetic_corpus", [](const SynthConfig& cfg) {
    std::vector<std::tuple<AudioClip, int, double>> out;
    for (auto& c : generate_synthetic_corpus(cfg)) out.emplace_back(std::move(c.item.clip), c.item.label, c.f0_hz);
    return out;
  });
}
