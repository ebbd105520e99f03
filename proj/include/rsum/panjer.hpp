// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

// Recursion engines for Panjer (a, b) counts with integer-valued severities:
// the aggregate pmf of S_N, the restricted count moments m_k(l) and the
// restricted component moments chi_{k+}(l).

#pragma once

#include <vector>

#include "rsum/distributions.hpp"
#include "rsum/tables.hpp"

namespace rsum {

// a * P(X = 0) at or above 1 - this is treated as divergent.
inline constexpr double kDivergenceMargin = 1e-12;

// Cumulative aggregate mass the automatic l_max must reach.
inline constexpr double kAutoEllMaxMass = 1.0 - 1e-10;

// P(S_N = l) for l = 0..ell_max.
RestrictedMomentTable aggregate_pmf(const CountModel& count, const SeverityModel& severity,
                                    int ell_max);

// P(S_{N+1} = l): the S_N table convolved with the severity pmf, truncated at
// the same l_max. Tagged as the order-0 component_moment_plus table.
RestrictedMomentTable aggregate_pmf_plus_one(const RestrictedMomentTable& aggregate,
                                             const SeverityModel& severity);

// m_j(l) = E[N^j; S_N = l] for j = 0..k, filled jointly: outer loop over l,
// inner loop over ascending order.
std::vector<RestrictedMomentTable> restricted_count_moments(const CountModel& count,
                                                            const SeverityModel& severity, int k,
                                                            int ell_max);

// chi_{k+}(l) = E[X_1^k; S_{N+1} = l] for k >= 1. The order-1 table drives
// the b-term of the recursion and is computed alongside.
RestrictedMomentTable restricted_component_moment_plus(const CountModel& count,
                                                       const SeverityModel& severity, int k,
                                                       int ell_max);

// Smallest l whose cumulative aggregate mass reaches kAutoEllMaxMass, capped
// at hard_limit.
int auto_ell_max(const CountModel& count, const SeverityModel& severity, int hard_limit);

}  // namespace rsum
