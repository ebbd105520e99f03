// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/stirling.hpp"

#include <algorithm>
#include <string>

#include "rsum/errors.hpp"

namespace rsum {

namespace {

void check_indices(int n, int k) {
  if (n < 0 || k < 0) throw DomainError("stirling2: negative index");
}

}  // namespace

std::uint64_t stirling2(int n, int k) {
  check_indices(n, k);
  if (n > 60) {
    throw OverflowError("stirling2: n = " + std::to_string(n) +
                        " beyond exact range; use stirling2_approx");
  }
  if (k > n) return 0;
  // row[j] holds {m, j} for the current m
  std::vector<std::uint64_t> row(static_cast<std::size_t>(k) + 1, 0);
  row[0] = 1;
  for (int m = 1; m <= n; ++m) {
    const int top = m < k ? m : k;
    // only {m, j} with j >= k - (n - m) can still reach {n, k}
    const int bottom = std::max(1, k - (n - m));
    for (int j = top; j >= bottom; --j) {
      std::uint64_t scaled = 0;
      std::uint64_t sum = 0;
      if (__builtin_mul_overflow(static_cast<std::uint64_t>(j), row[j], &scaled) ||
          __builtin_add_overflow(scaled, row[j - 1], &sum)) {
        throw OverflowError("stirling2(" + std::to_string(n) + ", " + std::to_string(k) +
                            ") overflows 64 bits");
      }
      row[j] = sum;
    }
    row[0] = 0;
  }
  return row[k];
}

double stirling2_approx(int n, int k) {
  check_indices(n, k);
  if (k > n) return 0.0;
  return stirling2_row<double>(n)[k];
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace rsum
