// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "discgan/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "discgan/format.hpp"

namespace discgan {

void RingSpec::validate() const {
  if (components < 1) throw DataError("ring needs at least one component");
  if (!(radius > 0.0)) throw DataError("ring radius must be positive");
  if (!(sigma > 0.0)) throw DataError("ring sigma must be positive");
}

std::vector<double> RingSpec::mean(std::size_t k) const {
  const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(components);
  return {radius * std::cos(ang), radius * std::sin(ang)};
}

SampleMatrix sample_ring_modes(const RingSpec& spec, std::span<const std::size_t> modes,
                               std::size_t n, RngStream& rng) {
  spec.validate();
  if (modes.empty()) throw DataError("mode subset must be nonempty");
  for (std::size_t k : modes) {
    if (k >= spec.components) throw DataError("mode index " + std::to_string(k) + " out of range");
  }
  if (n < 1) throw DataError("sample count must be >= 1");
  std::vector<std::vector<double>> means;
  for (std::size_t k : modes) means.push_back(spec.mean(k));
  SampleMatrix x(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& mu = means[rng.index(means.size())];
    x(i, 0) = mu[0] + spec.sigma * rng.normal();
    x(i, 1) = mu[1] + spec.sigma * rng.normal();
  }
  return x;
}

SampleMatrix sample_ring(const RingSpec& spec, std::size_t n, RngStream& rng) {
  spec.validate();
  std::vector<std::size_t> all(spec.components);
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return sample_ring_modes(spec, all, n, rng);
}

double ring_log_density(const RingSpec& spec, std::span<const double> x) {
  spec.validate();
  if (x.size() != 2) throw DataError("ring density is defined on R^2");
  const double s2 = spec.sigma * spec.sigma;
  std::vector<double> terms(spec.components);
  for (std::size_t k = 0; k < spec.components; ++k) {
    const auto mu = spec.mean(k);
    const double dx = x[0] - mu[0], dy = x[1] - mu[1];
    terms[k] = -(dx * dx + dy * dy) / (2.0 * s2);
  }
  const double mx = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s / static_cast<double>(spec.components)) -
         std::log(2.0 * std::numbers::pi * s2);
}

Sampler mode_limited_sampler(const RingSpec& spec, std::vector<std::size_t> modes,
                             RngStream rng) {
  spec.validate();
  if (modes.empty()) throw DataError("mode subset must be nonempty");
  for (std::size_t k : modes) {
    if (k >= spec.components) throw DataError("mode index " + std::to_string(k) + " out of range");
  }
  return [spec, modes = std::move(modes), rng = std::move(rng)](std::size_t n) mutable {
    return sample_ring_modes(spec, modes, n, rng);
  };
}

Sampler ring_sampler(const RingSpec& spec, RngStream rng) {
  spec.validate();
  return [spec, rng = std::move(rng)](std::size_t n) mutable { return sample_ring(spec, n, rng); };
}

Sampler gaussian_sampler(std::size_t dim, RngStream rng) {
  if (dim < 1) throw DataError("noise dimension must be >= 1");
  return [dim, rng = std::move(rng)](std::size_t n) mutable {
    SampleMatrix z(n, dim);
    for (double& v : z.data()) v = rng.normal();
    return z;
  };
}

SampleMatrix rescale_to_unit_ball(const SampleMatrix& x, double bound) {
  if (!(bound > 0.0)) throw DataError("rescale bound must be positive");
  SampleMatrix y = x;
  for (double& v : y.data()) v /= bound;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    auto r = y.row(i);
    const double n = norm2(r);
    if (n > 1.0)
      for (double& v : r) v /= n;
  }
  return y;
}

Sampler rescaled(Sampler inner, double bound) {
  return [inner = std::move(inner), bound](std::size_t n) {
    return rescale_to_unit_ball(inner(n), bound);
  };
}

std::string samples_to_csv(const SampleMatrix& x) {
  std::string s;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      if (j) s += ',';
      s += format_double(x(i, j));
    }
    s += '\n';
  }
  return s;
}

void save_samples(const SampleMatrix& x, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << samples_to_csv(x);
  if (!out) throw DataError("write failed for " + path);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

SampleMatrix parse_samples_csv(const std::string& text, std::optional<std::size_t> expected_dim) {
  std::vector<double> data;
  std::size_t cols = 0, rows = 0, lineno = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;
    std::size_t count = 0;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
          !std::isfinite(v)) {
        throw DataError("line " + std::to_string(lineno) + ": non-numeric field '" +
                        std::string(field) + "'");
      }
      data.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw DataError("line " + std::to_string(lineno) + ": ragged row with " +
                      std::to_string(count) + " fields, expected " + std::to_string(cols));
    }
    if (expected_dim && count != *expected_dim) {
      throw DataError("line " + std::to_string(lineno) + ": dimension " + std::to_string(count) +
                      " does not match expected " + std::to_string(*expected_dim));
    }
    ++rows;
  }
  if (rows == 0) throw DataError("empty sample");
  return SampleMatrix(rows, cols, std::move(data));
}

SampleMatrix load_samples(const std::string& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_samples_csv(ss.str(), expected_dim);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace discgan
