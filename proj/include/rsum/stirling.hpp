// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace rsum {

// Stirling number of the second kind {n, k}: the number of ways to partition
// an n-set into k non-empty blocks. Exact; throws OverflowError if the value
// does not fit in 64 bits (n > 60 is rejected up front).
std::uint64_t stirling2(int n, int k);

// Floating-point accumulation of the same recurrence, valid for any n.
double stirling2_approx(int n, int k);

// Row {k, 0}, ..., {k, k} as Scalar; used to turn falling-factorial moments
// into raw moments via x^k = sum_j {k, j} (x)_j.
template <typename Scalar>
std::vector<Scalar> stirling2_row(int k) {
  std::vector<Scalar> row(static_cast<std::size_t>(k) + 1, Scalar(0));
  row[0] = Scalar(1);
  for (int n = 1; n <= k; ++n) {
    for (int j = n; j >= 1; --j) row[j] = Scalar(j) * row[j] + row[j - 1];
    row[0] = Scalar(0);
  }
  return row;
}

// Binomial coefficient C(n, k) as double.
double binomial(int n, int k);

}  // namespace rsum
