// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_FORMAT_HPP_
#define DISCGAN_FORMAT_HPP_

#include <cstdio>
#include <string>

namespace discgan {

/// 17 significant digits: enough to round-trip any double exactly.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace discgan

#endif  // DISCGAN_FORMAT_HPP_
