// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

// Generating-function route: G_{m_k} and G_{chi_k} built from pgf
// derivatives and Stirling numbers, inverted on the unit circle. Works for
// any count distribution, Panjer or not.

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>

#include "rsum/distributions.hpp"
#include "rsum/stirling.hpp"
#include "rsum/tables.hpp"

namespace rsum {

// Generating function evaluated on the unit circle, u -> G(e^{iu}), in
// extended precision.
struct UnitCircleFunction {
  using Complex = std::complex<long double>;

  struct Descriptor {
    std::string construction;
    int k = 0;
    Target target = Target::count_moment;
    // Certified bound on |G(e^{iu})|: E[N^k], E[X_1^k], or +inf if unknown.
    double bound = 0.0;
  };

  std::function<Complex(long double)> evaluator;
  Descriptor descriptor;

  Complex operator()(long double u) const { return evaluator(u); }
};

struct InversionConfig {
  // 0 selects the smallest power of two >= aliasing_guard * (l_max + 1).
  int grid_size = 0;
  int aliasing_guard = 2;
  double mass_check_tolerance = 1e-8;

  int resolved_grid_size(int ell_max) const;
  // Throws DomainError unless grid >= aliasing_guard * (l_max + 1).
  void validate(int ell_max) const;
};

// E[N^k z^N] = sum_{j=1}^k {k, j} z^j G_N^{(j)}(z); G_N(z) for k = 0.
template <typename Scalar>
std::complex<Scalar> count_tilted_moment(const CountModel& count, int k, std::complex<Scalar> z) {
  if (k == 0) return count_pgf_deriv(count, 0, z);
  const auto s = stirling2_row<Scalar>(k);
  std::complex<Scalar> sum(0);
  std::complex<Scalar> zj(1);
  for (int j = 1; j <= k; ++j) {
    zj *= z;
    sum += s[j] * zj * count_pgf_deriv(count, j, z);
  }
  return sum;
}

// E[X^k z^X] = sum_{j=1}^k {k, j} z^j G_X^{(j)}(z); G_X(z) for k = 0.
template <typename Scalar>
std::complex<Scalar> severity_tilted_moment(const SeverityModel& severity, int k,
                                            std::complex<Scalar> z) {
  if (k == 0) return severity_pgf_deriv(severity, 0, z);
  const auto s = stirling2_row<Scalar>(k);
  std::complex<Scalar> sum(0);
  std::complex<Scalar> zj(1);
  for (int j = 1; j <= k; ++j) {
    zj *= z;
    sum += s[j] * zj * severity_pgf_deriv(severity, j, z);
  }
  return sum;
}

// E[N^k s^N] for real s in [0, 1]; this is m_k(0) at s = P(X_1 = 0).
double tilted_count_moment(const CountModel& count, int k, double s);

// G_{m_k}(e^{iu}) = sum_j {k, j} G_X^j G_N^{(j)}(G_X).
UnitCircleFunction gf_count_moment(const CountModel& count, const SeverityModel& severity, int k);

enum class ComponentMode {
  // chi_k with the N = 0 term handled exactly: an atom q_0 E[X^k] at l = 0
  // plus E[X^k z^X] (G_{S_N} - q_0) / G_X.
  corrected,
  // E[X^k z^X] G_{S_N} / G_X as commonly written; differs from corrected by
  // q_0 terms only.
  paper_literal,
  // chi_{k+}: E[X^k z^X] G_{S_N}.
  plus_one,
};

std::string to_string(ComponentMode mode);

// |G_X(e^{iu})| below this trips the singularity guard in paper_literal mode.
inline constexpr double kSingularityGuard = 1e-10;

UnitCircleFunction gf_component_moment(const CountModel& count, const SeverityModel& severity,
                                       int k, ComponentMode mode = ComponentMode::corrected);

// M-point trapezoid rule on the circle, i.e. a discrete Fourier transform,
// accumulated in long double with pairwise summation. The result at l is
// the sum over r >= 0 of the true coefficient at l + r M.
RestrictedMomentTable invert_unit_circle(const UnitCircleFunction& f, int ell_max,
                                         const InversionConfig& config = {});

struct StabilityReport {
  double rel_tol = 0.0;
  // [0, end) is the small-l region where the routes disagree; empty when
  // nothing left of the reference mode disagrees.
  std::optional<int> unstable_prefix_end;
  // First l right of the mode that disagrees, if any.
  std::optional<int> tail_disagreement_start;
  int reference_mode = 0;
  // Agreement on defined entries of [prefix end, l_max].
  int suffix_count = 0;
  double suffix_max_rel = 0.0;
  double suffix_mean_rel = 0.0;
};

// Compares a Fourier-route table with a recursion-route reference and writes
// the prefix end into fourier.diagnostics.unstable_prefix. Entries with a
// reference value below value_floor are excluded from the suffix statistics.
StabilityReport stability_scan(RestrictedMomentTable& fourier,
                               const RestrictedMomentTable& recursion, double rel_tol,
                               double value_floor = kDefaultMassFloor);

// Same scan on conditional curves; the reference curve's masses locate the
// mode and its defined flags select the suffix entries.
StabilityReport stability_scan(const PredictionCurve& fourier, const PredictionCurve& recursion,
                               double rel_tol);

}  // namespace rsum
