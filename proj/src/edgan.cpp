// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "discgan/edgan.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include <json.hpp>

namespace discgan {

void EnsembleInputs::validate() const {
  if (generators.empty()) throw DataError("at least one generator sample set is required");
  validate_samples(real);
  for (std::size_t k = 0; k < generators.size(); ++k) {
    validate_samples(generators[k]);
    if (generators[k].cols() != real.cols()) {
      throw DataError("generator " + std::to_string(k) + " has d=" +
                      std::to_string(generators[k].cols()) + ", real samples have d=" +
                      std::to_string(real.cols()));
    }
  }
}

EnsembleProblem::EnsembleProblem(const EnsembleInputs& inputs, DiscOptions opts)
    : real_cov_((inputs.validate(), uncentered_covariance(inputs.real))), opts_(opts) {
  gen_cov_.reserve(inputs.generators.size());
  for (const auto& x : inputs.generators) gen_cov_.push_back(uncentered_covariance(x));
}

SymMatrix EnsembleProblem::matrix(std::span<const double> alpha) const {
  if (alpha.size() != gen_cov_.size()) {
    throw DataError("mixture has " + std::to_string(alpha.size()) + " weights for " +
                    std::to_string(gen_cov_.size()) + " generators");
  }
  SymMatrix m(dim());
  for (std::size_t k = 0; k < gen_cov_.size(); ++k) m.add_scaled(gen_cov_[k], alpha[k]);
  m.add_scaled(real_cov_, -1.0);
  return m;
}

EnsembleObjective EnsembleProblem::objective(std::span<const double> alpha) const {
  const DiscResult dr = discrepancy_from_matrix(matrix(alpha), opts_);
  return {std::abs(dr.spectral), dr.direction, dr.sign, dr.converged};
}

std::vector<double> EnsembleProblem::subgradient(const EnsembleObjective& obj) const {
  std::vector<double> g(gen_cov_.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] = obj.sign * gen_cov_[k].quadratic_form(obj.direction);
  }
  return g;
}

SymMatrix mixture_cov_diff(std::span<const double> alpha, const EnsembleInputs& inputs) {
  return EnsembleProblem(inputs).matrix(alpha);
}

EnsembleObjective ensemble_objective(std::span<const double> alpha, const EnsembleInputs& inputs) {
  return EnsembleProblem(inputs).objective(alpha);
}

std::vector<double> simplex_project(std::span<const double> v) {
  if (v.empty()) throw DataError("cannot project an empty vector onto the simplex");
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::max(v[k] - tau, 0.0);
  const double sum = std::accumulate(out.begin(), out.end(), 0.0);
  const auto top = std::max_element(out.begin(), out.end());
  *top += 1.0 - sum;
  return out;
}

MixtureWeights edgan_optimize(const EnsembleProblem& problem, const EdganOptions& opts) {
  if (opts.iters < 1) throw DataError("iterations must be >= 1");
  const std::size_t p = problem.size();
  std::vector<double> alpha(p, 1.0 / static_cast<double>(p));

  MixtureWeights best;
  EnsembleObjective obj = problem.objective(alpha);
  best.alpha = alpha;
  best.objective_trace.emplace_back(0, obj.F);
  if (p == 1) return best;

  double eta0 = opts.eta0;
  if (eta0 <= 0.0) {
    double scale = 0.0;
    for (const auto& c : problem.generator_covariances()) {
      RngStream rng(opts.seed);
      scale = std::max(scale, std::abs(dominant_eigpair(c, rng).pair.value));
    }
    eta0 = scale > 0.0 ? 0.5 / scale : 0.5;
  }

  double best_f = obj.F;
  for (int t = 1; t <= opts.iters; ++t) {
    const std::vector<double> g = problem.subgradient(obj);
    const double eta = eta0 / std::sqrt(static_cast<double>(t));
    for (std::size_t k = 0; k < p; ++k) alpha[k] -= eta * g[k];
    alpha = simplex_project(alpha);
    obj = problem.objective(alpha);
    best.objective_trace.emplace_back(t, obj.F);
    if (obj.F < best_f) {
      best_f = obj.F;
      best.alpha = alpha;
    }
  }
  return best;
}

MixtureWeights edgan_optimize(const EnsembleInputs& inputs, const EdganOptions& opts) {
  return edgan_optimize(EnsembleProblem(inputs, DiscOptions{{}, opts.seed}), opts);
}

namespace {

void enumerate_lattice(std::size_t p, int total, std::vector<int>& cur,
                       const std::function<void(const std::vector<int>&)>& fn) {
  if (cur.size() + 1 == p) {
    const int used = std::accumulate(cur.begin(), cur.end(), 0);
    cur.push_back(total - used);
    fn(cur);
    cur.pop_back();
    return;
  }
  const int used = std::accumulate(cur.begin(), cur.end(), 0);
  for (int k = 0; k <= total - used; ++k) {
    cur.push_back(k);
    enumerate_lattice(p, total, cur, fn);
    cur.pop_back();
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

GridMinimum grid_minimize(const EnsembleProblem& problem, double resolution) {
  if (!(resolution > 0.0) || resolution > 1.0) throw DataError("grid resolution must be in (0, 1]");
  const int total = static_cast<int>(std::lround(1.0 / resolution));
  const std::size_t p = problem.size();
  GridMinimum best{std::vector<double>(p), std::numeric_limits<double>::infinity()};
  std::vector<int> cur;
  std::vector<double> alpha(p);
  enumerate_lattice(p, total, cur, [&](const std::vector<int>& counts) {
    for (std::size_t k = 0; k < p; ++k) alpha[k] = counts[k] / static_cast<double>(total);
    const double f = problem.objective(alpha).F;
    if (f < best.F) {
      best.F = f;
      best.alpha = alpha;
    }
  });
  return best;
}

SampleMatrix resample_mixture(const EnsembleInputs& inputs, std::span<const double> alpha,
                              std::size_t n, RngStream& rng) {
  inputs.validate();
  if (alpha.size() != inputs.size()) throw DataError("mixture weight count mismatch");
  SampleMatrix out(n, inputs.dim());
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform(), acc = 0.0;
    std::size_t k = 0;
    for (; k + 1 < alpha.size(); ++k) {
      acc += alpha[k];
      if (u < acc) break;
    }
    const SampleMatrix& pool = inputs.generators[k];
    const auto src = pool.row(rng.index(pool.rows()));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

std::vector<Theorem4Point> theorem4_probe(std::vector<Sampler> generators, Sampler real,
                                          const std::vector<std::size_t>& ns,
                                          const Theorem4Options& opts) {
  if (generators.empty()) throw DataError("at least one generator is required");
  if (generators.size() > 3) throw DataError("generalization probe supports at most 3 generators");
  if (opts.seeds < 1) throw DataError("seed count must be >= 1");
  EnsembleInputs eval;
  for (auto& g : generators) eval.generators.push_back(g(opts.eval_size));
  eval.real = real(opts.eval_size);
  const EnsembleProblem eval_problem(eval);
  const GridMinimum grid = grid_minimize(eval_problem, opts.grid_resolution);

  std::vector<Theorem4Point> out;
  for (std::size_t n : ns) {
    if (n < 1) throw DataError("training size must be >= 1");
    Theorem4Point pt{n, 0.0, {}};
    for (int s = 0; s < opts.seeds; ++s) {
      EnsembleInputs train;
      for (auto& g : generators) train.generators.push_back(g(n));
      train.real = real(n);
      const MixtureWeights w = edgan_optimize(train, opts.edgan);
      pt.gaps.push_back(std::abs(eval_problem.objective(w.alpha).F - grid.F));
    }
    pt.median_gap = median(pt.gaps);
    out.push_back(std::move(pt));
  }
  return out;
}

SampleMatrix FourierFeatures::apply(const SampleMatrix& x) const {
  if (x.cols() != in_dim()) {
    throw DataError("feature map expects d=" + std::to_string(in_dim()) + ", got d=" +
                    std::to_string(x.cols()));
  }
  SampleMatrix out(x.rows(), out_dim());
  const double scale = 1.0 / std::sqrt(static_cast<double>(out_dim()));
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t f = 0; f < out_dim(); ++f) {
      out(i, f) = scale * std::cos(dot(w.row(f), x.row(i)) + b[f]);
    }
  }
  return out;
}

FourierFeatures make_fourier_features(std::size_t in_dim, std::size_t features,
                                      double lengthscale, RngStream& rng) {
  if (in_dim < 1 || features < 1) throw DataError("feature map dimensions must be >= 1");
  if (!(lengthscale > 0.0)) throw DataError("lengthscale must be positive");
  FourierFeatures ff{Matrix(features, in_dim), std::vector<double>(features)};
  for (double& v : ff.w.data()) v = rng.normal() / lengthscale;
  for (double& v : ff.b) v = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return ff;
}

std::string mixture_weights_json(const MixtureWeights& w, double objective, int iters) {
  nlohmann::ordered_json j;
  j["alpha"] = w.alpha;
  j["objective"] = objective;
  j["disc"] = 2.0 * objective;
  j["iters"] = iters;
  return j.dump();
}

}  // namespace discgan
