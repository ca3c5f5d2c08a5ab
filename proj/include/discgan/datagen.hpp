// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_DATAGEN_HPP_
#define DISCGAN_DATAGEN_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "discgan/matrix.hpp"
#include "discgan/rng.hpp"

namespace discgan {

/// Equal-weight mixture of `components` isotropic Gaussians with standard
/// deviation `sigma`, centred at radius * (cos 2 pi k/p, sin 2 pi k/p).
struct RingSpec {
  std::size_t components = 9;
  double radius = 1.0;
  double sigma = 0.05;

  void validate() const;
  std::vector<double> mean(std::size_t k) const;
  /// Bound used to map ring samples into the unit ball: radius + 6 sigma.
  double unit_bound() const { return radius + 6.0 * sigma; }
};

/// Returns n fresh samples, one per row, on each call.
using Sampler = std::function<SampleMatrix(std::size_t n)>;

/// n draws from the full ring. Samples are not clipped.
SampleMatrix sample_ring(const RingSpec& spec, std::size_t n, RngStream& rng);

/// n draws restricted to the listed components, chosen uniformly among them.
SampleMatrix sample_ring_modes(const RingSpec& spec, std::span<const std::size_t> modes,
                               std::size_t n, RngStream& rng);

/// log of the ring mixture density at x, computed with a max shift.
double ring_log_density(const RingSpec& spec, std::span<const double> x);

/// Sampler over a subset of ring components. Owns its random stream.
Sampler mode_limited_sampler(const RingSpec& spec, std::vector<std::size_t> modes,
                             RngStream rng);

/// Sampler over the full ring. Owns its random stream.
Sampler ring_sampler(const RingSpec& spec, RngStream rng);

/// Standard normal latent noise of dimension `dim`. Owns its random stream.
Sampler gaussian_sampler(std::size_t dim, RngStream rng);

/// Divides every sample by `bound`. The rare row still outside the unit ball
/// afterwards (a tail draw beyond the bound) is pulled radially onto it.
SampleMatrix rescale_to_unit_ball(const SampleMatrix& x, double bound);

/// Wraps a sampler so its draws come out rescaled by `bound`.
Sampler rescaled(Sampler inner, double bound);

/// CSV without header, one sample per row, values written with 17
/// significant digits.
void save_samples(const SampleMatrix& x, const std::string& path);
std::string samples_to_csv(const SampleMatrix& x);

/// Parses a sample CSV. Errors name the offending line.
SampleMatrix load_samples(const std::string& path,
                          std::optional<std::size_t> expected_dim = std::nullopt);
SampleMatrix parse_samples_csv(const std::string& text,
                               std::optional<std::size_t> expected_dim = std::nullopt);

}  // namespace discgan

#endif  // DISCGAN_DATAGEN_HPP_
