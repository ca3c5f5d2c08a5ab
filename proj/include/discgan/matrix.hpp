// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_MATRIX_HPP_
#define DISCGAN_MATRIX_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace discgan {

/// Raised on malformed inputs: shape mismatches, non-finite values, bad files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Samples are stored one per row. The alias marks intent at call sites.
using SampleMatrix = Matrix;

enum class UnitBallCheck { off, on };

/// Validates a sample matrix: nonempty, all entries finite and, when
/// requested, every row inside the closed unit ball (with 1e-12 slack).
void validate_samples(const SampleMatrix& x, UnitBallCheck check = UnitBallCheck::off);

/// Builds a validated sample matrix.
SampleMatrix make_samples(std::size_t rows, std::size_t cols, std::vector<double> data,
                          UnitBallCheck check = UnitBallCheck::off);

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Stacks the rows of `a` on top of the rows of `b`.
Matrix vstack(const Matrix& a, const Matrix& b);

std::string shape_string(const Matrix& m);

}  // namespace discgan

#endif  // DISCGAN_MATRIX_HPP_
