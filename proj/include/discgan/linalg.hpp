// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_LINALG_HPP_
#define DISCGAN_LINALG_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "discgan/matrix.hpp"
#include "discgan/rng.hpp"

namespace discgan {

/// Dense symmetric matrix. Construction rejects inputs whose asymmetry
/// exceeds 1e-12 (scaled by entry magnitude when larger than one) and stores
/// the exactly symmetrized average.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t dim);
  explicit SymMatrix(Matrix entries);
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t dim() const { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const Matrix& entries() const { return entries_; }

  /// Sets entries (i, j) and (j, i) together.
  void set(std::size_t i, std::size_t j, double value);

  /// this += scale * other
  void add_scaled(const SymMatrix& other, double scale);

  std::vector<double> apply(std::span<const double> v) const;
  void apply(std::span<const double> v, std::span<double> out) const;
  double quadratic_form(std::span<const double> v) const;
  double max_abs() const;
  bool is_zero() const { return max_abs() == 0.0; }

 private:
  Matrix entries_;
};

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);

struct EigPair {
  double value = 0.0;
  std::vector<double> vector;
};

/// (1/n) X^T X without mean subtraction. Rows are accumulated in order so the
/// result is bit-reproducible.
SymMatrix uncentered_covariance(const SampleMatrix& x);

struct PowerOptions {
  /// Stop once successive eigenvalue estimates differ by less than this (and
  /// the Ritz residual is below 1e-6 relative).
  double tol = 1e-10;
  /// Zero selects the default budget of 100 * dim + 1000 iterations.
  int max_iter = 0;
};

struct PowerResult {
  EigPair pair;
  bool converged = false;
  /// Set when the matrix is identically zero; value is 0 and the vector is
  /// the random starting vector.
  bool degenerate = false;
  int iterations = 0;
};

/// Eigenpair of the eigenvalue of largest absolute value.
///
/// Plain power iteration v <- Mv/|Mv| from a random unit start drawn from
/// `rng`. At every step the estimate is read off by Rayleigh-Ritz on the
/// two-dimensional space span{v, Mv}. That space captures both members of a
/// near tie |l1| ~ |l2| (including the opposite-sign case where v itself
/// oscillates), so the returned value and vector stay accurate where the
/// plain Rayleigh quotient would stall. Costs one product with M per step.
PowerResult dominant_eigpair(const SymMatrix& m, RngStream& rng, PowerOptions opts = {});

/// Largest dimension accepted by jacobi_eig.
inline constexpr std::size_t kJacobiMaxDim = 64;

/// Full eigendecomposition by cyclic Jacobi rotations, eigenvalues sorted
/// descending. Slow and exact; meant as a test oracle.
std::vector<EigPair> jacobi_eig(const SymMatrix& m);

}  // namespace discgan

#endif  // DISCGAN_LINALG_HPP_
