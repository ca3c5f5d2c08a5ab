// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_EDGAN_HPP_
#define DISCGAN_EDGAN_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "discgan/datagen.hpp"
#include "discgan/discrepancy.hpp"
#include "discgan/linalg.hpp"

namespace discgan {

/// Embedded samples of p pre-trained generators and of the real data.
struct EnsembleInputs {
  std::vector<SampleMatrix> generators;
  SampleMatrix real;

  void validate() const;
  std::size_t dim() const { return real.cols(); }
  std::size_t size() const { return generators.size(); }
};

/// A point on the probability simplex with the objective trace that led to it.
struct MixtureWeights {
  std::vector<double> alpha;
  std::vector<std::pair<int, double>> objective_trace;

  std::size_t p() const { return alpha.size(); }
};

struct EnsembleObjective {
  double F = 0.0;
  std::vector<double> direction;
  int sign = 1;
  bool converged = true;
};

/// Second-moment matrices of the inputs, computed once. M(alpha) is affine
/// in alpha, so every evaluation afterwards is a weighted sum.
class EnsembleProblem {
 public:
  explicit EnsembleProblem(const EnsembleInputs& inputs, DiscOptions opts = {});

  std::size_t size() const { return gen_cov_.size(); }
  std::size_t dim() const { return real_cov_.dim(); }
  const std::vector<SymMatrix>& generator_covariances() const { return gen_cov_; }
  const SymMatrix& real_covariance() const { return real_cov_; }

  /// sum_k alpha_k C_k - C_r
  SymMatrix matrix(std::span<const double> alpha) const;
  /// F(alpha) = ||M(alpha)||_2 with the dominant eigenvector and its sign.
  EnsembleObjective objective(std::span<const double> alpha) const;
  /// Component k of the subgradient: s v^T C_k v.
  std::vector<double> subgradient(const EnsembleObjective& obj) const;

 private:
  std::vector<SymMatrix> gen_cov_;
  SymMatrix real_cov_;
  DiscOptions opts_;
};

SymMatrix mixture_cov_diff(std::span<const double> alpha, const EnsembleInputs& inputs);
EnsembleObjective ensemble_objective(std::span<const double> alpha, const EnsembleInputs& inputs);

/// Euclidean projection onto {a : a_k >= 0, sum a_k = 1} by sorting and
/// thresholding. Rounding residue in the sum is added to the largest entry.
std::vector<double> simplex_project(std::span<const double> v);

struct EdganOptions {
  int iters = 2000;
  /// Base step; <= 0 selects 0.5 / max_k ||C_k||_2.
  double eta0 = 0.0;
  std::uint64_t seed = 0x5eed;
};

/// Projected subgradient descent on F(alpha) from the uniform mixture with
/// step eta0 / sqrt(t). Returns the best iterate seen.
MixtureWeights edgan_optimize(const EnsembleInputs& inputs, const EdganOptions& opts = {});
MixtureWeights edgan_optimize(const EnsembleProblem& problem, const EdganOptions& opts = {});

struct GridMinimum {
  std::vector<double> alpha;
  double F = 0.0;
};

/// Exhaustive search over the simplex lattice with spacing `resolution`.
GridMinimum grid_minimize(const EnsembleProblem& problem, double resolution);

/// Draws n rows from the alpha-mixture of the generator sample pools (each
/// row picks a generator by alpha, then a uniform row of that pool).
SampleMatrix resample_mixture(const EnsembleInputs& inputs, std::span<const double> alpha,
                              std::size_t n, RngStream& rng);

struct Theorem4Options {
  double grid_resolution = 0.01;
  std::size_t eval_size = 20000;
  int seeds = 10;
  EdganOptions edgan;
};

struct Theorem4Point {
  std::size_t n = 0;
  double median_gap = 0.0;
  std::vector<double> gaps;
};

/// For each n and seed: learn alpha on fresh size-n samples, then compare
/// F(alpha_hat) with the grid optimum on one large held-out set drawn first.
/// Gap = |F_eval(alpha_hat) - F_eval(alpha_grid)|.
std::vector<Theorem4Point> theorem4_probe(std::vector<Sampler> generators, Sampler real,
                                          const std::vector<std::size_t>& ns,
                                          const Theorem4Options& opts = {});

/// Fixed random Fourier feature map phi(x) = sqrt(1/D) cos(W x + b), with W
/// entries N(0, 1/lengthscale^2) and b uniform in [0, 2 pi). Outputs lie in
/// the unit ball. Used as a non-trained embedding when fitting mixture
/// weights: second moments of phi see far more of a distribution's shape
/// than second moments of x.
struct FourierFeatures {
  Matrix w;  // features x in
  std::vector<double> b;

  std::size_t in_dim() const { return w.cols(); }
  std::size_t out_dim() const { return w.rows(); }
  SampleMatrix apply(const SampleMatrix& x) const;
};

FourierFeatures make_fourier_features(std::size_t in_dim, std::size_t features,
                                      double lengthscale, RngStream& rng);

/// {"alpha":[...],"objective":F,"disc":2F,"iters":N}
std::string mixture_weights_json(const MixtureWeights& w, double objective, int iters);

}  // namespace discgan

#endif  // DISCGAN_EDGAN_HPP_
