// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "discgan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "discgan/discrepancy.hpp"

namespace discgan {

void KdeModel::validate() const {
  validate_samples(train);
  if (!(bandwidth > 0.0)) throw DataError("bandwidth must be positive");
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// log mean_i exp(-sq_i / 2h^2) - (d/2) log(2 pi h^2), from squared distances.
double log_kernel_mean(std::span<const double> sq, double h, std::size_t d) {
  const double inv = 1.0 / (2.0 * h * h);
  double mx = -std::numeric_limits<double>::infinity();
  for (double s : sq) mx = std::max(mx, -s * inv);
  double acc = 0.0;
  for (double s : sq) acc += std::exp(-s * inv - mx);
  return mx + std::log(acc / static_cast<double>(sq.size())) -
         0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi * h * h);
}

double floored_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::max(x, kLogDensityFloor);
  return s / static_cast<double>(v.size());
}

double mean_log_density(const KdeModel& model, const SampleMatrix& pts) {
  std::vector<double> vals(pts.rows());
  for (std::size_t i = 0; i < pts.rows(); ++i) vals[i] = kde_log_density(model, pts.row(i));
  return floored_mean(vals);
}

}  // namespace

double kde_log_density(const KdeModel& model, std::span<const double> x) {
  model.validate();
  if (x.size() != model.dim()) throw DataError("point dimension does not match KDE");
  std::vector<double> sq(model.train.rows());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = sq_dist(model.train.row(i), x);
  return log_kernel_mean(sq, model.bandwidth, model.dim());
}

std::vector<double> default_bandwidth_grid(const SampleMatrix& x) {
  validate_samples(x);
  double var = 0.0;
  const double n = static_cast<double>(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double m = 0.0, s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) m += x(i, j);
    m /= n;
    for (std::size_t i = 0; i < x.rows(); ++i) s += (x(i, j) - m) * (x(i, j) - m);
    var += s / n;
  }
  double scale = std::sqrt(var / static_cast<double>(x.cols()));
  if (!(scale > 0.0)) scale = 1.0;
  std::vector<double> grid(20);
  const double lo = std::log(0.005), hi = std::log(1.0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid[k] = scale * std::exp(lo + (hi - lo) * static_cast<double>(k) / 19.0);
  }
  return grid;
}

double cv_bandwidth(const SampleMatrix& x, std::span<const double> candidates, int folds,
                    std::uint64_t seed) {
  validate_samples(x);
  if (candidates.empty()) throw DataError("bandwidth candidate list is empty");
  for (double h : candidates) {
    if (!(h > 0.0)) throw DataError("bandwidth candidates must be positive");
  }
  if (folds < 2) throw DataError("cross-validation needs at least 2 folds");
  if (candidates.size() == 1) return candidates[0];
  const std::size_t n = x.rows();
  if (n < static_cast<std::size_t>(folds)) throw DataError("fewer samples than folds");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  RngStream rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
  std::vector<int> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[perm[pos]] = static_cast<int>(pos % folds);

  // Squared distances from every point to the points outside its fold.
  std::vector<std::vector<double>> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (fold[j] != fold[i]) sq[i].push_back(sq_dist(x.row(i), x.row(j)));
    }
  }

  std::vector<double> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  double best_h = sorted.front(), best_score = -std::numeric_limits<double>::infinity();
  std::vector<double> vals(n);
  for (double h : sorted) {
    for (std::size_t i = 0; i < n; ++i) vals[i] = log_kernel_mean(sq[i], h, x.cols());
    const double score = floored_mean(vals);
    if (score > best_score) {
      best_score = score;
      best_h = h;
    }
  }
  return best_h;
}

LikelihoodReport likelihood_report(const SampleMatrix& real, const SampleMatrix& generated,
                                   const std::optional<RingSpec>& truth,
                                   const LikelihoodOptions& opts) {
  validate_samples(real);
  validate_samples(generated);
  if (real.cols() != generated.cols()) {
    throw DataError("dimension mismatch: real d=" + std::to_string(real.cols()) +
                    ", generated d=" + std::to_string(generated.cols()));
  }
  LikelihoodReport r;
  r.n_real = real.rows();
  r.n_generated = generated.rows();

  const auto grid_gen = default_bandwidth_grid(generated);
  r.bandwidth_generated = cv_bandwidth(generated, grid_gen, opts.folds, opts.seed);
  r.L_Sr = mean_log_density(KdeModel{generated, r.bandwidth_generated}, real);

  if (truth) {
    if (generated.cols() != 2) throw DataError("ring truth density needs d=2");
    std::vector<double> vals(generated.rows());
    for (std::size_t i = 0; i < generated.rows(); ++i) {
      vals[i] = ring_log_density(*truth, generated.row(i));
    }
    r.L_Stheta = floored_mean(vals);
    r.analytic_truth = true;
  } else {
    const auto grid_real = default_bandwidth_grid(real);
    r.bandwidth_real = cv_bandwidth(real, grid_real, opts.folds, opts.seed);
    r.L_Stheta = mean_log_density(KdeModel{real, *r.bandwidth_real}, generated);
  }
  return r;
}

std::string likelihood_report_json(const LikelihoodReport& r) {
  nlohmann::ordered_json j;
  j["L_Sr"] = r.L_Sr;
  j["L_Stheta"] = r.L_Stheta;
  j["n_real"] = r.n_real;
  j["n_generated"] = r.n_generated;
  j["bandwidth_generated"] = r.bandwidth_generated;
  if (r.bandwidth_real) {
    j["bandwidth_real"] = *r.bandwidth_real;
  } else {
    j["bandwidth_real"] = nullptr;
  }
  j["analytic_truth"] = r.analytic_truth;
  return j.dump();
}

MixtureLikelihood::MixtureLikelihood(const SampleMatrix& real,
                                     const std::vector<SampleMatrix>& pools,
                                     const std::optional<RingSpec>& truth,
                                     const LikelihoodOptions& opts) {
  validate_samples(real);
  if (pools.empty()) throw DataError("at least one generator sample set is required");
  if (truth && real.cols() != 2) throw DataError("ring truth density needs d=2");
  std::optional<KdeModel> real_kde;
  if (!truth) real_kde = KdeModel{real, cv_bandwidth(real, default_bandwidth_grid(real),
                                                     opts.folds, opts.seed)};
  for (const auto& pool : pools) {
    validate_samples(pool);
    if (pool.cols() != real.cols()) {
      throw DataError("dimension mismatch: real d=" + std::to_string(real.cols()) +
                      ", generated d=" + std::to_string(pool.cols()));
    }
    const KdeModel model{pool, cv_bandwidth(pool, default_bandwidth_grid(pool), opts.folds,
                                            opts.seed)};
    std::vector<double> logp(real.rows());
    for (std::size_t i = 0; i < real.rows(); ++i) logp[i] = kde_log_density(model, real.row(i));
    real_logp_.push_back(std::move(logp));

    std::vector<double> t(pool.rows());
    for (std::size_t i = 0; i < pool.rows(); ++i) {
      t[i] = truth ? ring_log_density(*truth, pool.row(i)) : kde_log_density(*real_kde, pool.row(i));
    }
    pool_truth_.push_back(floored_mean(t));
  }
}

MixtureScores MixtureLikelihood::evaluate(std::span<const double> alpha) const {
  if (alpha.size() != size()) throw DataError("mixture weight count mismatch");
  MixtureScores s;
  const std::size_t n = real_logp_.front().size();
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < size(); ++k) {
      if (alpha[k] > 0.0) mx = std::max(mx, real_logp_[k][i]);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      if (alpha[k] > 0.0) acc += alpha[k] * std::exp(real_logp_[k][i] - mx);
    }
    vals[i] = mx + std::log(acc);
  }
  s.L_Sr = floored_mean(vals);
  for (std::size_t k = 0; k < size(); ++k) s.L_Stheta += alpha[k] * pool_truth_[k];
  return s;
}

ToyEnsembleResult run_toy_ensemble(const ToyEnsembleOptions& opts, std::uint64_t seed) {
  opts.ring.validate();
  const std::size_t p = opts.modes.size();
  if (p == 0) throw DataError("at least one base generator is required");
  RngStream root(seed);
  RngStream real_rng = root.derive(100);
  const SampleMatrix real = sample_ring(opts.ring, opts.samples, real_rng);
  std::vector<SampleMatrix> pools;
  for (std::size_t k = 0; k < p; ++k) {
    RngStream g = root.derive(k);
    pools.push_back(sample_ring_modes(opts.ring, opts.modes[k], opts.samples, g));
  }

  RngStream feat_rng = root.derive(200);
  const FourierFeatures ff =
      make_fourier_features(2, opts.features, opts.lengthscale, feat_rng);
  const double bound = opts.ring.unit_bound();
  EnsembleInputs in;
  for (const auto& pool : pools) in.generators.push_back(ff.apply(rescale_to_unit_ball(pool, bound)));
  in.real = ff.apply(rescale_to_unit_ball(real, bound));

  ToyEnsembleResult r;
  r.alpha = edgan_optimize(in, opts.edgan).alpha;
  const MixtureLikelihood ml(real, pools,
                             opts.analytic_truth ? std::optional<RingSpec>(opts.ring) : std::nullopt);
  r.edgan = ml.evaluate(r.alpha);
  r.uniform = ml.evaluate(std::vector<double>(p, 1.0 / static_cast<double>(p)));
  for (std::size_t k = 0; k < p; ++k) {
    std::vector<double> corner(p, 0.0);
    corner[k] = 1.0;
    r.singles.push_back(ml.evaluate(corner));
  }
  return r;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DataError("slope fit needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DataError("slope fit needs distinct x values");
  return sxy / sxx;
}

DecayResult decay_probe(const DrawFn& draw, const std::vector<std::size_t>& ns, int repeats,
                        std::uint64_t seed) {
  std::vector<std::size_t> distinct = ns;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 4) throw DataError("decay probe needs >= 4 distinct sample sizes");
  if (repeats < 5) throw DataError("decay probe needs >= 5 repeats");

  DecayResult res;
  std::vector<double> lx, ly;
  RngStream root(seed);
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    const std::size_t n = ns[idx];
    if (n < 1) throw DataError("sample sizes must be >= 1");
    RngStream rng = root.derive(idx);
    double acc = 0.0;
    for (int r = 0; r < repeats; ++r) {
      const SampleMatrix a = draw(n, rng);
      const SampleMatrix b = draw(n, rng);
      acc += empirical_discrepancy(a, b).value;
    }
    const double mean = acc / repeats;
    res.points.emplace_back(n, mean);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(mean));
  }
  res.slope = fit_slope(lx, ly);
  return res;
}

}  // namespace discgan
