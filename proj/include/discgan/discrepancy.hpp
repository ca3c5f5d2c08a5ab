// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_DISCREPANCY_HPP_
#define DISCGAN_DISCREPANCY_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "discgan/linalg.hpp"
#include "discgan/matrix.hpp"

namespace discgan {

/// Squared-loss discrepancy over linear hypotheses with |w| <= 1, together
/// with the eigen information needed to differentiate it.
struct DiscResult {
  /// 2 * |spectral|.
  double value = 0.0;
  /// Signed dominant eigenvalue of cov(Xg) - cov(Xr).
  double spectral = 0.0;
  std::vector<double> direction;
  /// sign(spectral), +1 when spectral == 0.
  int sign = 1;
  bool converged = true;
};

struct DiscOptions {
  PowerOptions power;
  /// Seeds the random start of the power iteration.
  std::uint64_t seed = 0x5eed;
};

/// cov(Xg) - cov(Xr), both uncentered.
SymMatrix cov_diff(const SampleMatrix& xr, const SampleMatrix& xg);

/// 2 || (1/n) Xg^T Xg - (1/m) Xr^T Xr ||_2, computed by power iteration.
DiscResult empirical_discrepancy(const SampleMatrix& xr, const SampleMatrix& xg,
                                 const DiscOptions& opts = {});

/// Same, starting from a precomputed difference matrix.
DiscResult discrepancy_from_matrix(const SymMatrix& m, const DiscOptions& opts = {});

/// Largest sample count per side accepted by disc_zero_one_linear_2d.
inline constexpr std::size_t kZeroOneMaxPoints = 64;

/// Discrepancy of two planar empirical measures under the 0-1 loss with
/// halfplane classifiers: the max over classifier pairs (h, h') of
/// |P(h != h') - Q(h != h')|.
///
/// Every labeling a halfplane can induce on the pooled points is produced by
/// a line through two of them, nudged so that the points lying on it split
/// into a prefix and a suffix along the line. The labelings are enumerated,
/// deduplicated up to complement (the objective does not see complements),
/// and the max is taken over all pairs exactly.
double disc_zero_one_linear_2d(const SampleMatrix& p, const SampleMatrix& q);

/// Squared loss between two linear hypotheses averaged over the rows of x:
/// mean_i (h.x_i - f.x_i)^2.
double mean_squared_disagreement(const SampleMatrix& x, std::span<const double> h,
                                 std::span<const double> f);

/// The supremum, over w and w' in the closed unit ball, of
/// |E_r (w.x - w'.x)^2 - E_g (w.x - w'.x)^2|.
///
/// Substituting u = w - w' gives sup over |u| <= 2 of |u^T M u| = 4 ||M||_2,
/// attained at w = v, w' = -v for the top eigenvector v. This is twice the
/// value reported by empirical_discrepancy, whose normalization is 2 ||M||_2.
double squared_loss_sup_discrepancy(const SampleMatrix& xr, const SampleMatrix& xg);

/// Slack of the transfer inequality
///   E_r l(h, f) <= E_g l(h, f) + disc(r, g)
/// minimized over `trials` random pairs of unit-norm linear hypotheses, with
/// disc the supremum from squared_loss_sup_discrepancy. Returns the min over
/// pairs of E_g l + disc - E_r l, which is >= 0 up to rounding.
double theorem1_gap(const SampleMatrix& xr, const SampleMatrix& xg, int trials,
                    std::uint64_t seed);

}  // namespace discgan

#endif  // DISCGAN_DISCREPANCY_HPP_
