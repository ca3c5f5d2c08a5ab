// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_RNG_HPP_
#define DISCGAN_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace discgan {

/// Seeded random stream backed by std::mt19937_64.
///
/// The engine's output sequence is fixed by the C++ standard, but the
/// standard distributions are not, so every variate is derived here from raw
/// 64-bit draws: uniforms use the top 53 bits, normals use Box-Muller.
/// Identical seeds therefore give identical sequences on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer on [0, n).
  std::size_t index(std::size_t n);
  double normal();

  /// Uniform random unit vector in R^d.
  std::vector<double> unit_vector(std::size_t d);

  /// Independent child stream; `offset` selects which one.
  RngStream derive(std::uint64_t offset) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer, used to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace discgan

#endif  // DISCGAN_RNG_HPP_
