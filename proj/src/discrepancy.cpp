// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "discgan/discrepancy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "discgan/rng.hpp"

namespace discgan {

SymMatrix cov_diff(const SampleMatrix& xr, const SampleMatrix& xg) {
  if (xr.empty() || xg.empty()) throw DataError("empty sample");
  if (xr.cols() != xg.cols()) {
    throw DataError("dimension mismatch: real samples have d=" + std::to_string(xr.cols()) +
                    ", generated samples have d=" + std::to_string(xg.cols()));
  }
  return uncentered_covariance(xg) - uncentered_covariance(xr);
}

DiscResult discrepancy_from_matrix(const SymMatrix& m, const DiscOptions& opts) {
  RngStream rng(opts.seed);
  PowerResult pr = dominant_eigpair(m, rng, opts.power);
  DiscResult r;
  r.spectral = pr.pair.value;
  r.value = 2.0 * std::abs(pr.pair.value);
  r.sign = pr.pair.value < 0.0 ? -1 : 1;
  r.direction = std::move(pr.pair.vector);
  r.converged = pr.converged;
  return r;
}

DiscResult empirical_discrepancy(const SampleMatrix& xr, const SampleMatrix& xg,
                                 const DiscOptions& opts) {
  return discrepancy_from_matrix(cov_diff(xr, xg), opts);
}

namespace {

// Labeling of up to 128 pooled points, bit i set when point i is classified 1.
using Mask = std::array<std::uint64_t, 2>;

void set_bit(Mask& m, std::size_t i) { m[i / 64] |= std::uint64_t{1} << (i % 64); }
bool get_bit(const Mask& m, std::size_t i) { return (m[i / 64] >> (i % 64)) & 1U; }

// Complements give the same objective value, so keep the representative
// with point 0 unlabeled.
Mask canonical(Mask m, const Mask& all) {
  if (get_bit(m, 0)) {
    m[0] = ~m[0] & all[0];
    m[1] = ~m[1] & all[1];
  }
  return m;
}

}  // namespace

double disc_zero_one_linear_2d(const SampleMatrix& p, const SampleMatrix& q) {
  if (p.empty() || q.empty()) throw DataError("empty sample");
  if (p.cols() != 2 || q.cols() != 2) throw DataError("zero-one discrepancy requires d=2");
  if (p.rows() > kZeroOneMaxPoints || q.rows() > kZeroOneMaxPoints) {
    throw DataError("exhaustive size limit");
  }
  validate_samples(p);
  validate_samples(q);

  const std::size_t np = p.rows(), nq = q.rows(), n = np + nq;
  const Matrix pts = vstack(p, q);
  Mask all{0, 0}, pmask{0, 0}, qmask{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    set_bit(all, i);
    set_bit(i < np ? pmask : qmask, i);
  }

  std::vector<Mask> labelings;
  labelings.push_back(Mask{0, 0});

  std::vector<std::pair<double, std::size_t>> on_line;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double tx = pts(b, 0) - pts(a, 0), ty = pts(b, 1) - pts(a, 1);
      if (tx == 0.0 && ty == 0.0) continue;
      Mask base{0, 0};
      on_line.clear();
      for (std::size_t k = 0; k < n; ++k) {
        const double dx = pts(k, 0) - pts(a, 0), dy = pts(k, 1) - pts(a, 1);
        const double side = tx * dy - ty * dx;
        if (side > 0.0) {
          set_bit(base, k);
        } else if (side == 0.0) {
          on_line.emplace_back(tx * dx + ty * dy, k);
        }
      }
      std::sort(on_line.begin(), on_line.end());
      // Split the collinear points between distinct positions along the line;
      // a slight rotation sends one part to each side.
      std::vector<std::size_t> cuts{0};
      for (std::size_t i = 1; i < on_line.size(); ++i) {
        if (on_line[i].first != on_line[i - 1].first) cuts.push_back(i);
      }
      cuts.push_back(on_line.size());
      for (std::size_t cut : cuts) {
        Mask prefix_up = base, suffix_up = base;
        for (std::size_t i = 0; i < on_line.size(); ++i) {
          set_bit(i < cut ? prefix_up : suffix_up, on_line[i].second);
        }
        labelings.push_back(canonical(prefix_up, all));
        labelings.push_back(canonical(suffix_up, all));
      }
    }
  }
  std::sort(labelings.begin(), labelings.end());
  labelings.erase(std::unique(labelings.begin(), labelings.end()), labelings.end());

  // |cp/np - cq/nq| maximized in integer arithmetic as |cp*nq - cq*np|.
  const auto inp = static_cast<long long>(np), inq = static_cast<long long>(nq);
  long long best = 0;
  for (std::size_t i = 0; i < labelings.size(); ++i) {
    const Mask& li = labelings[i];
    for (std::size_t j = i + 1; j < labelings.size(); ++j) {
      const Mask& lj = labelings[j];
      const std::uint64_t x0 = li[0] ^ lj[0], x1 = li[1] ^ lj[1];
      const long long cp = std::popcount(x0 & pmask[0]) + std::popcount(x1 & pmask[1]);
      const long long cq = std::popcount(x0 & qmask[0]) + std::popcount(x1 & qmask[1]);
      best = std::max(best, std::llabs(cp * inq - cq * inp));
    }
  }
  return static_cast<double>(best) / static_cast<double>(inp * inq);
}

double mean_squared_disagreement(const SampleMatrix& x, std::span<const double> h,
                                 std::span<const double> f) {
  if (x.empty()) throw DataError("empty sample");
  if (h.size() != x.cols() || f.size() != x.cols()) {
    throw DataError("hypothesis dimension does not match samples");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double diff = dot(x.row(i), h) - dot(x.row(i), f);
    s += diff * diff;
  }
  return s / static_cast<double>(x.rows());
}

double squared_loss_sup_discrepancy(const SampleMatrix& xr, const SampleMatrix& xg) {
  return 2.0 * empirical_discrepancy(xr, xg).value;
}

double theorem1_gap(const SampleMatrix& xr, const SampleMatrix& xg, int trials,
                    std::uint64_t seed) {
  if (trials < 1) throw DataError("trials must be >= 1");
  const double disc = squared_loss_sup_discrepancy(xr, xg);
  RngStream rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const auto h = rng.unit_vector(xr.cols());
    const auto f = rng.unit_vector(xr.cols());
    const double slack =
        mean_squared_disagreement(xg, h, f) + disc - mean_squared_disagreement(xr, h, f);
    worst = std::min(worst, slack);
  }
  return worst;
}

}  // namespace discgan
