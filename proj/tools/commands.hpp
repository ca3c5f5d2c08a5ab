// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_TOOLS_COMMANDS_HPP_
#define DISCGAN_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "discgan/datagen.hpp"

namespace discgan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Everything a subcommand may read. Unset optionals fall back to the
/// subcommand's own default.
struct RunConfig {
  std::string command;
  std::string probe_kind;
  std::vector<std::string> inputs;
  std::string real_path;
  std::string out_dir;

  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  std::optional<int> steps;
  double clip = 0.5;
  std::size_t batch_real = 64;
  std::size_t batch_gen = 64;
  int critic_steps = 3;
  std::size_t embed_dim = 8;
  std::string optimizer = "adam";
  std::size_t samples = 1000;

  double grid_res = 0.01;
  bool compare = false;

  std::optional<std::size_t> ring_p;
  std::optional<double> ring_r;
  std::optional<double> ring_sigma;
  int folds = 5;

  std::vector<std::size_t> ns;
  std::vector<double> eps;
  int repeats = 10;
  int trials = 100;
  int instances = 20;
  int seeds = 10;

  std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }
  bool ring_given() const { return ring_p || ring_r || ring_sigma; }
  RingSpec ring() const;
};

/// Checks the knobs the subcommand uses. Throws DataError.
void validate(const RunConfig& cfg);

/// Each writes exactly one JSON document to `out` and returns the exit code.
/// Input problems surface as DataError.
int cmd_disc(const RunConfig& cfg, std::ostream& out);
int cmd_train_dgan(const RunConfig& cfg, std::ostream& out);
int cmd_mix_edgan(const RunConfig& cfg, std::ostream& out);
int cmd_probe(const RunConfig& cfg, std::ostream& out);
int cmd_eval(const RunConfig& cfg, std::ostream& out);

int dispatch(const RunConfig& cfg, std::ostream& out);

}  // namespace discgan::cli

#endif  // DISCGAN_TOOLS_COMMANDS_HPP_
