// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_EVALUATION_HPP_
#define DISCGAN_EVALUATION_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "discgan/datagen.hpp"
#include "discgan/edgan.hpp"
#include "discgan/matrix.hpp"

namespace discgan {

/// Gaussian-kernel density estimate with an isotropic bandwidth.
struct KdeModel {
  SampleMatrix train;
  double bandwidth = 1.0;

  std::size_t dim() const { return train.cols(); }
  void validate() const;
};

/// log[(1/N) sum_i (2 pi h^2)^(-d/2) exp(-|x - x_i|^2 / 2h^2)]
double kde_log_density(const KdeModel& model, std::span<const double> x);

/// 20 bandwidths log-spaced over [0.005, 1.0] times the data scale (root mean
/// per-coordinate variance).
std::vector<double> default_bandwidth_grid(const SampleMatrix& x);

/// k-fold cross-validated choice among `candidates`: maximizes held-out mean
/// log-likelihood, ties going to the smallest bandwidth. Folds come from a
/// seeded shuffle.
double cv_bandwidth(const SampleMatrix& x, std::span<const double> candidates, int folds = 5,
                    std::uint64_t seed = 0);

/// Per-point log densities are floored here before averaging.
inline constexpr double kLogDensityFloor = -1e6;

struct LikelihoodReport {
  /// Mean log density of the real samples under a KDE of the generated ones.
  double L_Sr = 0.0;
  /// Mean log density of the generated samples under the truth: the analytic
  /// ring density when given, else a KDE of the real samples.
  double L_Stheta = 0.0;
  std::size_t n_real = 0;
  std::size_t n_generated = 0;
  double bandwidth_generated = 0.0;
  std::optional<double> bandwidth_real;
  bool analytic_truth = false;
};

struct LikelihoodOptions {
  int folds = 5;
  std::uint64_t seed = 0;
};

LikelihoodReport likelihood_report(const SampleMatrix& real, const SampleMatrix& generated,
                                   const std::optional<RingSpec>& truth = std::nullopt,
                                   const LikelihoodOptions& opts = {});

std::string likelihood_report_json(const LikelihoodReport& r);

struct MixtureScores {
  double L_Sr = 0.0;
  double L_Stheta = 0.0;
};

/// Likelihood metrics for every mixture of a fixed set of generator sample
/// pools. The mixture density is sum_k alpha_k p_k with p_k a KDE of pool k
/// (own cross-validated bandwidth), so L(S_r) needs no resampling. L(S_theta)
/// is linear in alpha: sum_k alpha_k times the mean truth log density over
/// pool k, the truth being the ring density when given, else a KDE of the
/// real samples.
class MixtureLikelihood {
 public:
  MixtureLikelihood(const SampleMatrix& real, const std::vector<SampleMatrix>& pools,
                    const std::optional<RingSpec>& truth = std::nullopt,
                    const LikelihoodOptions& opts = {});

  std::size_t size() const { return pool_truth_.size(); }
  MixtureScores evaluate(std::span<const double> alpha) const;

 private:
  // log p_k at each real point, [k][i].
  std::vector<std::vector<double>> real_logp_;
  std::vector<double> pool_truth_;
};

/// The ensemble toy: a ring truth, p mode-limited base generators, mixture
/// weights fitted on Fourier-feature embeddings of the rescaled samples, and
/// likelihood scores for the fitted, uniform and single-generator mixtures.
struct ToyEnsembleOptions {
  RingSpec ring;
  std::vector<std::vector<std::size_t>> modes{
      {0, 1, 2, 3, 4}, {2, 3, 4, 5, 6}, {4, 5, 6, 7, 8}, {6, 7, 8, 0}, {8, 0, 1, 2}};
  std::size_t samples = 1000;
  std::size_t features = 32;
  double lengthscale = 0.3;
  /// Score L(S_theta) with the analytic ring density instead of a KDE of the
  /// real samples.
  bool analytic_truth = false;
  EdganOptions edgan;
};

struct ToyEnsembleResult {
  std::vector<double> alpha;
  MixtureScores edgan;
  MixtureScores uniform;
  std::vector<MixtureScores> singles;
};

ToyEnsembleResult run_toy_ensemble(const ToyEnsembleOptions& opts, std::uint64_t seed);

/// Draws n samples from a fixed distribution using the given stream.
using DrawFn = std::function<SampleMatrix(std::size_t n, RngStream& rng)>;

struct DecayResult {
  /// (n, mean discrepancy over repeats)
  std::vector<std::pair<std::size_t, double>> points;
  /// Least-squares slope of log mean discrepancy against log n.
  double slope = 0.0;
};

/// Compares two independent size-n draws of the same distribution, whose
/// population discrepancy is zero, and fits how the empirical value decays.
DecayResult decay_probe(const DrawFn& draw, const std::vector<std::size_t>& ns, int repeats,
                        std::uint64_t seed);

/// Least-squares slope of y on x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace discgan

#endif  // DISCGAN_EVALUATION_HPP_
