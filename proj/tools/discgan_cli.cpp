// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

// discgan command-line tool. One JSON document goes to stdout; logs and
// errors go to stderr. Exit codes: 0 ok, 2 usage or input error, 3 numerical
// abort.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "discgan/dgan.hpp"

namespace {

using discgan::DataError;
using discgan::cli::RunConfig;

// Reads a flat key=value file into "--key=value" arguments. Blank lines and
// lines starting with '#' are skipped.
std::vector<std::string> config_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file " + path);
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "compare") {
      if (value == "true" || value == "1") out.push_back("--compare");
      continue;
    }
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

// Splices config-file arguments in right after the subcommand name so that
// later command-line flags override them.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  const auto extra = config_args(path);
  const std::size_t at = args.empty() ? 0 : 1;
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
  return args;
}

void add_training_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--clip", cfg.clip, "Embedding weight clip constant")->check(CLI::PositiveNumber);
  sub->add_option("--batch-real", cfg.batch_real, "Real batch size");
  sub->add_option("--batch-gen", cfg.batch_gen, "Generated batch size");
  sub->add_option("--critic-steps", cfg.critic_steps, "Embedding steps per generator step (0 fixes it)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--embed-dim", cfg.embed_dim, "Embedding output dimension");
}

void add_ring_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--ring-p", cfg.ring_p, "Ring component count");
  sub->add_option("--ring-r", cfg.ring_r, "Ring radius");
  sub->add_option("--ring-sigma", cfg.ring_sigma, "Ring component standard deviation");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Discrepancy-based GAN training, ensemble weighting and evaluation"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--config", "Flat key=value file; command-line flags take precedence");

  auto* disc = app.add_subcommand("disc", "Discrepancy between two sample files");
  disc->add_option("files", cfg.inputs, "real.csv gen.csv")->required()->check(CLI::ExistingFile);

  auto* train = app.add_subcommand("train-dgan", "Train a toy generator on the ring");
  train->add_option("--out-dir", cfg.out_dir, "Existing directory for checkpoints and traces")->required();
  train->add_option("--real", cfg.real_path, "Real samples inside the unit ball (default: ring)");
  train->add_option("--eta", cfg.eta, "Learning rate");
  train->add_option("--steps", cfg.steps, "Generator steps");
  train->add_option("--optimizer", cfg.optimizer, "adam or sgd");
  train->add_option("--samples", cfg.samples, "Rows in the post-training sample dump");
  add_training_flags(train, cfg);
  add_ring_flags(train, cfg);

  auto* mix = app.add_subcommand("mix-edgan", "Learn mixture weights for pre-trained generators");
  mix->add_option("files", cfg.inputs, "real.csv gen1.csv [gen2.csv ...]")->required()->check(CLI::ExistingFile);
  mix->add_option("--eta", cfg.eta, "Base step size (0 picks one from the data)");
  mix->add_option("--steps", cfg.steps, "Subgradient iterations");
  mix->add_flag("--compare", cfg.compare, "Also report single-generator and uniform discrepancies");

  auto* probe = app.add_subcommand("probe", "Empirical checks of the generalization guarantees");
  probe->add_option("kind", cfg.probe_kind, "decay, continuity, theorem1 or theorem4")
      ->required()
      ->check(CLI::IsMember({"decay", "continuity", "theorem1", "theorem4"}));
  probe->add_option("--out-dir", cfg.out_dir, "Directory for <kind>.csv plot data");
  probe->add_option("--grid-res", cfg.grid_res, "Simplex lattice spacing for the theorem4 oracle");
  probe->add_option("--ns", cfg.ns, "Sample sizes")->delimiter(',');
  probe->add_option("--eps", cfg.eps, "Perturbation sizes for the continuity probe")->delimiter(',');
  probe->add_option("--repeats", cfg.repeats, "Repeats per sample size (decay)");
  probe->add_option("--trials", cfg.trials, "Hypothesis pairs per instance (theorem1)");
  probe->add_option("--instances", cfg.instances, "Random instances (theorem1)");
  probe->add_option("--seeds", cfg.seeds, "Seeds per sample size (theorem4)");
  probe->add_option("--steps", cfg.steps, "Subgradient iterations (theorem4)");
  add_training_flags(probe, cfg);
  add_ring_flags(probe, cfg);

  auto* eval = app.add_subcommand("eval", "Likelihood metrics of generated samples");
  eval->add_option("files", cfg.inputs, "real.csv gen.csv")->required()->check(CLI::ExistingFile);
  eval->add_option("--folds", cfg.folds, "Cross-validation folds for KDE bandwidths");
  add_ring_flags(eval, cfg);

  for (auto* sub : {disc, train, mix, probe, eval}) {
    sub->add_option("--seed", cfg.seed, "Random seed");
  }

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return discgan::cli::kExitUsage;
  }
  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return discgan::cli::kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    return discgan::cli::dispatch(cfg, std::cout);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return discgan::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
