// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "discgan/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace discgan {

namespace {

// Ritz residual |My - theta y| required, relative to |theta|, before the
// eigenvalue-change test may stop the iteration.
constexpr double kResidualTol = 1e-6;
constexpr std::size_t kIterPerDim = 100, kIterBase = 1000;

Matrix checked_symmetric(Matrix m) {
  if (m.rows() != m.cols()) throw DataError("symmetric matrix must be square, got " + shape_string(m));
  if (m.rows() == 0) throw DataError("symmetric matrix must have dim >= 1");
  const std::size_t d = m.rows();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double a = m(i, j), b = m(j, i);
      const double scale = std::max({1.0, std::abs(a), std::abs(b)});
      if (!(std::abs(a - b) <= 1e-12 * scale)) {
        throw DataError("matrix is not symmetric at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
      }
      const double avg = 0.5 * (a + b);
      m(i, j) = avg;
      m(j, i) = avg;
    }
  }
  return m;
}

}  // namespace

SymMatrix::SymMatrix(std::size_t dim) : entries_(dim, dim) {
  if (dim == 0) throw DataError("symmetric matrix must have dim >= 1");
}

SymMatrix::SymMatrix(Matrix entries) : entries_(checked_symmetric(std::move(entries))) {}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : entries_(checked_symmetric(Matrix(rows))) {}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
  entries_(i, j) = value;
  entries_(j, i) = value;
}

void SymMatrix::add_scaled(const SymMatrix& other, double scale) {
  if (other.dim() != dim()) throw DataError("symmetric matrix dimension mismatch");
  auto& a = entries_.data();
  const auto& b = other.entries_.data();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
}

void SymMatrix::apply(std::span<const double> v, std::span<double> out) const {
  const std::size_t d = dim();
  for (std::size_t i = 0; i < d; ++i) out[i] = dot(entries_.row(i), v);
}

std::vector<double> SymMatrix::apply(std::span<const double> v) const {
  std::vector<double> out(dim());
  apply(v, out);
  return out;
}

double SymMatrix::quadratic_form(std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += v[i] * dot(entries_.row(i), v);
  return s;
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double x : entries_.data()) m = std::max(m, std::abs(x));
  return m;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix c = a;
  c.add_scaled(b, -1.0);
  return c;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix c = a;
  c.add_scaled(b, 1.0);
  return c;
}

SymMatrix uncentered_covariance(const SampleMatrix& x) {
  if (x.empty()) throw DataError("empty sample");
  const std::size_t n = x.rows(), d = x.cols();
  Matrix acc(d, d);
  for (std::size_t r = 0; r < n; ++r) {
    auto row = x.row(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = row[i];
      for (std::size_t j = i; j < d; ++j) acc(i, j) += xi * row[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      acc(i, j) *= inv_n;
      acc(j, i) = acc(i, j);
    }
  }
  return SymMatrix(std::move(acc));
}

PowerResult dominant_eigpair(const SymMatrix& m, RngStream& rng, PowerOptions opts) {
  if (!(opts.tol > 0.0)) throw DataError("power iteration tolerance must be positive");
  if (opts.max_iter < 0) throw DataError("power iteration max_iter must be >= 1");
  const std::size_t d = m.dim();
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(kIterPerDim * d + kIterBase);

  PowerResult res;
  std::vector<double> v = rng.unit_vector(d);
  if (m.is_zero()) {
    res.pair = {0.0, std::move(v)};
    res.degenerate = true;
    res.converged = true;
    return res;
  }
  if (d == 1) {
    res.pair = {m(0, 0), {1.0}};
    res.converged = true;
    res.iterations = 1;
    return res;
  }

  std::vector<double> mv = m.apply(v);
  std::vector<double> mmv(d), q(d), mq(d), ritz(d);
  double prev = std::numeric_limits<double>::quiet_NaN();
  double theta = 0.0;

  for (int it = 1; it <= max_iter; ++it) {
    res.iterations = it;
    const double a = dot(v, mv);
    const double nw = norm2(mv);
    if (nw == 0.0) {
      // Start landed in the null space.
      v = rng.unit_vector(d);
      m.apply(v, mv);
      continue;
    }
    m.apply(mv, mmv);

    for (std::size_t i = 0; i < d; ++i) q[i] = mv[i] - a * v[i];
    const double beta = norm2(q);
    double residual = 0.0;
    if (beta <= 1e-14 * nw) {
      theta = a;
      ritz = v;
    } else {
      // Rayleigh-Ritz on span{v, Mv}; M q = (M Mv - a Mv) / beta.
      for (std::size_t i = 0; i < d; ++i) {
        q[i] /= beta;
        mq[i] = (mmv[i] - a * mv[i]) / beta;
      }
      const double t11 = a, t12 = beta, t22 = dot(q, mq);
      const double mid = 0.5 * (t11 + t22);
      const double rad = std::hypot(0.5 * (t11 - t22), t12);
      const double hi = mid + rad, lo = mid - rad;
      theta = std::abs(hi) >= std::abs(lo) ? hi : lo;
      // Eigenvector of the 2x2 block; take the better conditioned formula.
      double c1 = t12, c2 = theta - t11;
      const double e1 = theta - t22, e2 = t12;
      if (std::hypot(e1, e2) > std::hypot(c1, c2)) {
        c1 = e1;
        c2 = e2;
      }
      const double cn = std::hypot(c1, c2);
      for (std::size_t i = 0; i < d; ++i) ritz[i] = (c1 * v[i] + c2 * q[i]) / cn;
      double r2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double ri = (c1 * mv[i] + c2 * mq[i]) / cn - theta * ritz[i];
        r2 += ri * ri;
      }
      residual = std::sqrt(r2);
    }

    res.pair.value = theta;
    res.pair.vector = ritz;
    if (std::abs(theta - prev) < opts.tol && residual <= kResidualTol * std::abs(theta)) {
      res.converged = true;
      break;
    }
    prev = theta;

    for (std::size_t i = 0; i < d; ++i) {
      v[i] = mv[i] / nw;
      mv[i] = mmv[i] / nw;
    }
  }
  const double rn = norm2(res.pair.vector);
  for (auto& x : res.pair.vector) x /= rn;
  return res;
}

std::vector<EigPair> jacobi_eig(const SymMatrix& m) {
  const std::size_t d = m.dim();
  if (d > kJacobiMaxDim) throw DataError("oracle size limit");

  Matrix a = m.entries();
  Matrix v(d, d);
  for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

  double frob = 0.0;
  for (double x : a.data()) frob += x * x;
  frob = std::sqrt(frob);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += 2.0 * a(p, q) * a(p, q);
    off = std::sqrt(off);
    if (off == 0.0 || off <= 1e-15 * frob) break;

    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double th = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (th >= 0.0 ? 1.0 : -1.0) / (std::abs(th) + std::sqrt(th * th + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  std::vector<EigPair> out;
  out.reserve(d);
  for (std::size_t idx : order) {
    EigPair e{a(idx, idx), std::vector<double>(d)};
    for (std::size_t k = 0; k < d; ++k) e.vector[k] = v(k, idx);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace discgan
