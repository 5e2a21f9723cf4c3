// Command-line front end: synth, features, train-central, train-fed, eval,
// diagnose. Exit codes: 0 success, 1 usage error, 2 data error, 3 internal.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cryfl/commands.hpp"
#include "cryfl/error.hpp"

namespace {

using namespace cryfl;
using namespace cryfl::cli;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Long names in kebab-case plus a snake_case alias so config files can use
// the field names directly.
std::string names(const std::string& kebab) {
  std::string snake = kebab;
  for (char& c : snake)
    if (c == '-') c = '_';
  return snake == kebab ? "--" + kebab : "--" + kebab + ",--" + snake;
}

CLI::App* subcommand(CLI::App& app, const char* name, const char* help) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", "key = value file; command-line flags take precedence");
  return sub;
}

// CLI11 only reads config files for the root app, so subcommand files are
// applied here: a key fills its option unless the flag was given explicitly.
void apply_config(CLI::App* sub) {
  const CLI::Option* config = sub->get_option("--config");
  if (config->count() == 0) return;
  const auto path = config->as<std::string>();
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(path);
  } catch (const CLI::FileError& err) {
    throw Error(Errc::IoError, err.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && item.parents != std::vector<std::string>{sub->get_name()}) continue;
    CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config")
      throw Error(Errc::InvalidConfig, path + ": unknown key '" + item.fullname() + "'");
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

void add_mfcc(CLI::App* sub, MfccConfig& m) {
  sub->add_option(names("frame-ms"), m.frame_ms, "MFCC frame length (ms)")->capture_default_str();
  sub->add_option(names("hop-ms"), m.hop_ms, "MFCC hop (ms)")->capture_default_str();
  sub->add_option(names("n-mels"), m.n_mels, "mel filters")->capture_default_str();
  sub->add_option(names("n-coeffs"), m.n_coeffs, "cepstral coefficients kept")->capture_default_str();
  sub->add_option(names("fmin-hz"), m.fmin_hz)->capture_default_str();
  sub->add_option(names("fmax-hz"), m.fmax_hz)->capture_default_str();
}

void add_train(CLI::App* sub, TrainConfig& t, bool with_epochs) {
  if (with_epochs) sub->add_option(names("epochs"), t.epochs, "epochs per training segment")->capture_default_str();
  sub->add_option(names("batch-size"), t.batch_size)->capture_default_str();
  sub->add_option("--alpha,--learning-rate,--learning_rate", t.alpha, "Adam step size")->capture_default_str();
  sub->add_option(names("beta1"), t.beta1)->capture_default_str();
  sub->add_option(names("beta2"), t.beta2)->capture_default_str();
  sub->add_option(names("epsilon"), t.epsilon)->capture_default_str();
  sub->add_option(names("lambda"), t.lambda, "L2 regularization strength")->capture_default_str();
}

void add_selection(CLI::App* sub, SelectionOptions& s) {
  sub->add_option(names("select-k"), s.k, "MFCCs kept by forest selection (0 = all)")->capture_default_str();
  sub->add_option(names("n-trees"), s.forest.n_trees)->capture_default_str();
  sub->add_option(names("max-depth"), s.forest.max_depth)->capture_default_str();
  sub->add_option(names("min-samples-leaf"), s.forest.min_samples_leaf)->capture_default_str();
  sub->add_option(names("features-per-split"), s.forest.features_per_split, "0 = ceil(sqrt(D))")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated infant-cry screening pipeline"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "global seed for every randomized step")->capture_default_str();

  SynthOptions synth;
  auto* s = subcommand(app, "synth", "Generate a labeled synthetic cry corpus");
  s->add_option(names("n-normal"), synth.synth.n_normal)->capture_default_str();
  s->add_option(names("n-asphyxia"), synth.synth.n_asphyxia)->capture_default_str();
  s->add_option(names("asphyxia-noise-db"), synth.synth.asphyxia_noise_db)->capture_default_str();
  s->add_option("--out", synth.out, "output corpus directory")->required();

  FeaturesOptions feat;
  std::string selector_path;
  auto* f = subcommand(app, "features", "Extract MFCC feature CSV from a corpus");
  f->add_option("--corpus", feat.corpus, "directory with normal/ and asphyxia/ WAVs")->required();
  f->add_option("--out", feat.out)->required();
  f->add_option("--selector", selector_path, "selector JSON reducing the columns");
  f->add_flag("--augment", feat.augment, "add one tanh-distorted and one reverberated copy per clip");
  add_mfcc(f, feat.mfcc);

  CentralOptions central;
  auto* c = subcommand(app, "train-central", "Train a centralized linear SVM");
  c->add_option("--features", central.features)->required();
  c->add_option("--out", central.out)->required();
  c->add_option(names("rounds"), central.rounds, "training segments, each with a fresh optimizer")
      ->capture_default_str();
  c->add_option(names("test-fraction"), central.test_fraction)->capture_default_str();
  add_train(c, central.train, true);
  add_selection(c, central.selection);

  FedOptions fed;
  std::string partition = "iid";
  auto* t = subcommand(app, "train-fed", "Simulate FedAvg training across silos");
  t->add_option("--features", fed.features)->required();
  t->add_option("--out", fed.out)->required();
  t->add_option(names("num-silos"), fed.fed.num_silos)->capture_default_str();
  t->add_option(names("rounds"), fed.fed.rounds)->capture_default_str();
  t->add_option(names("local-epochs") + ",--epochs", fed.fed.local_epochs)->capture_default_str();
  t->add_option(names("client-fraction"), fed.fed.client_fraction)->capture_default_str();
  t->add_option(names("partition"), partition, "iid or dirichlet")->capture_default_str();
  t->add_option(names("dirichlet-alpha"), fed.fed.partition.dirichlet_alpha)->capture_default_str();
  t->add_flag(names("early-stop"), fed.fed.early_stop);
  t->add_option(names("test-fraction"), fed.test_fraction)->capture_default_str();
  add_train(t, fed.fed.train_cfg, false);
  add_selection(t, fed.selection);

  EvalOptions eval;
  std::string eval_out;
  auto* e = subcommand(app, "eval", "Evaluate a model on a feature CSV");
  e->add_option("--features", eval.features)->required();
  e->add_option("--model", eval.model)->required();
  e->add_option("--out", eval_out);

  DiagnoseOptions diag;
  auto* d = subcommand(app, "diagnose", "Classify one recording; JSON report on stdout");
  d->add_option("--wav", diag.wav)->required();
  d->add_option("--model", diag.model)->required();
  d->add_option(names("threshold"), diag.threshold, "positive-window fraction for an asphyxia verdict")
      ->capture_default_str();
  d->add_option(names("vad-threshold-db"), diag.vad.energy_threshold_db)->capture_default_str();
  d->add_option(names("vad-frame-ms"), diag.vad.frame_ms)->capture_default_str();
  d->add_option(names("vad-hangover"), diag.vad.hangover_frames)->capture_default_str();
  d->add_option(names("low-cut-hz"), diag.filter.low_cut_hz)->capture_default_str();
  d->add_option(names("high-cut-hz"), diag.filter.high_cut_hz)->capture_default_str();
  d->add_option(names("filter-order"), diag.filter.order)->capture_default_str();
  add_mfcc(d, diag.mfcc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) apply_config(sub);
    if (s->parsed()) {
      synth.seed = seed;
      cmd_synth(synth);
    } else if (f->parsed()) {
      feat.seed = seed;
      if (!selector_path.empty()) feat.selector = selector_path;
      for (const auto& skip : cmd_features(feat))
        std::cerr << "skipped " << skip.path.string() << ": " << skip.reason << "\n";
    } else if (c->parsed()) {
      central.seed = seed;
      cmd_train_central(central);
    } else if (t->parsed()) {
      fed.seed = seed;
      if (partition == "dirichlet")
        fed.fed.partition.kind = PartitionKind::Dirichlet;
      else if (partition != "iid")
        throw Error(Errc::InvalidConfig, "partition must be iid or dirichlet");
      cmd_train_fed(fed);
    } else if (e->parsed()) {
      if (!eval_out.empty()) eval.out = eval_out;
      std::cout << metrics_json(cmd_eval(eval));
    } else if (d->parsed()) {
      try {
        std::cout << diagnosis_json(cmd_diagnose(diag));
      } catch (const Error& err) {
        if (err.code() != Errc::NoVoiceDetected) throw;
        std::cout << no_voice_json(diag.wav.string());
        return kExitData;
      }
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return err.code() == Errc::InvalidConfig ? kExitUsage : kExitData;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
