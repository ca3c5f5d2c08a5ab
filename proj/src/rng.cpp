// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "discgan/rng.hpp"

#include <cmath>
#include <numbers>

#include "discgan/matrix.hpp"

namespace discgan {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return engine_();
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t RngStream::index(std::size_t n) {
  if (n == 0) throw DataError("index range must be positive");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

std::vector<double> RngStream::unit_vector(std::size_t d) {
  std::vector<double> v(d);
  double n = 0.0;
  while (n < 1e-300) {
    for (auto& x : v) x = normal();
    n = norm2(v);
  }
  for (auto& x : v) x /= n;
  return v;
}

RngStream RngStream::derive(std::uint64_t offset) const {
  return RngStream(mix_seed(seed_ ^ mix_seed(offset + 0x632be59bd9b4e019ULL)));
}

}  // namespace discgan
