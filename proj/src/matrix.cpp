// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "discgan/matrix.hpp"

#include <cmath>

namespace discgan {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DataError("matrix data size " + std::to_string(data_.size()) +
                    " does not match shape " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DataError("ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

void validate_samples(const SampleMatrix& x, UnitBallCheck check) {
  if (x.empty()) throw DataError("empty sample");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto r = x.row(i);
    double sq = 0.0;
    for (double v : r) {
      if (!std::isfinite(v)) {
        throw DataError("non-finite entry in sample row " + std::to_string(i));
      }
      sq += v * v;
    }
    if (check == UnitBallCheck::on && std::sqrt(sq) > 1.0 + 1e-12) {
      throw DataError("sample row " + std::to_string(i) + " lies outside the unit ball");
    }
  }
}

SampleMatrix make_samples(std::size_t rows, std::size_t cols, std::vector<double> data,
                          UnitBallCheck check) {
  SampleMatrix x(rows, cols, std::move(data));
  validate_samples(x, check);
  return x;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DataError("matmul shape mismatch " + shape_string(a) + " * " + shape_string(b));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw DataError("vstack column mismatch " + shape_string(a) + " / " + shape_string(b));
  }
  std::vector<double> data = a.data();
  data.insert(data.end(), b.data().begin(), b.data().end());
  return Matrix(a.rows() + b.rows(), a.cols(), std::move(data));
}

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace discgan
