// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

// Continuous severities: Fourier-Stieltjes transforms of
// m_k(x) = E[N^k; S_N <= x] and chi_k(x) = E[X_1^k; S_N <= x], and their
// pointwise inversion by truncated oscillatory quadrature.

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rsum/distributions.hpp"
#include "rsum/transform.hpp"

namespace rsum {

struct FstFunction {
  std::function<std::complex<double>(double)> evaluator;
  // Limit of the underlying function at +infinity.
  double total_mass = 0.0;
  // Point mass at x = 0 carried by the function (q_0 for m_0, q_0 E[X^k]
  // for the corrected chi_k, zero otherwise). Removed before integrating.
  double atom_at_zero = 0.0;
  // |f(u) - atom| = O(|u|^-p); drives the automatic truncation.
  std::optional<double> decay_exponent;
  // Set when the evaluator relies on finite-difference cf derivatives.
  bool approximate = false;
  std::string descriptor;

  std::complex<double> operator()(double u) const { return evaluator(u); }
};

struct QuadratureConfig {
  // Upper integration limit; chosen automatically when empty.
  std::optional<double> truncation;
  int panels_per_period = 8;
  double abs_tol = 1e-6;
  double rel_tol = 1e-10;
  // Ceiling for the automatic truncation search.
  double max_truncation = 1e7;
  // Subdivision depth for panels whose halves disagree with the whole.
  int max_depth = 8;

  void validate() const;
};

struct FstInversion {
  double x = 0.0;
  double value = 0.0;
  bool converged = true;
  double truncation = 0.0;
  // Bound on the neglected integral beyond the truncation point.
  double tail_bound = 0.0;
  // Sum of panel-level disagreement estimates.
  double quadrature_error = 0.0;
  // How far the raw value fell outside [0, total_mass] before clamping.
  double clamped_by = 0.0;
};

// phi_{m_k}(u) by the order recursion
// (1 - a phi) phi_{m_k} = sum_{j<k} (a C(k, j) + b C(k-1, j)) phi_{m_j} phi,
// seeded with phi_{m_0} = G_N(phi).
FstFunction fst_count_moment_panjer(const CountModel& count, const SeverityModel& severity, int k);

// sum_j {k, j} phi^j G_N^{(j)}(phi) for any count.
FstFunction fst_count_moment_general(const CountModel& count, const SeverityModel& severity,
                                     int k);

// Transform of chi_k (or chi_{k+} with plus_one) built from i^{-k} phi^{(k)}.
FstFunction fst_component_moment(const CountModel& count, const SeverityModel& severity, int k,
                                 bool plus_one, ComponentMode mode = ComponentMode::corrected);

// Closed forms for a Poisson(lambda) count:
// m_1 <-> lambda phi e^{lambda(phi - 1)}, m_2 <-> lambda^2 phi^2 e^{lambda(phi - 1)} + m_1.
FstFunction fst_poisson_m1(double lambda, const SeverityModel& severity);
FstFunction fst_poisson_m2(double lambda, const SeverityModel& severity);

// F(x) = atom + (1/pi) int_0^T Re[(e^{-ixt} - 1)/(-it) (f(t) - atom)] dt,
// clamped to [0, total_mass].
FstInversion invert_fst(const FstFunction& f, double x, const QuadratureConfig& config = {});

// Same for a grid of x; transform values at the quadrature nodes are shared.
std::vector<FstInversion> invert_fst_grid(const FstFunction& f, const std::vector<double>& xs,
                                          const QuadratureConfig& config = {});

struct ContinuousPredictionRow {
  double x = 0.0;
  double restricted = 0.0;  // m_k(x)
  double mass = 0.0;        // P(S_N <= x)
  double value = 0.0;       // E[N^k | S_N <= x]; NaN below the mass floor
  bool defined = false;
  bool converged = true;
};

// E[N^k | S_N <= x] on a grid. Panjer counts use the order recursion.
std::vector<ContinuousPredictionRow> continuous_predict(const CountModel& count,
                                                        const SeverityModel& severity, int k,
                                                        const std::vector<double>& xs,
                                                        const QuadratureConfig& config = {},
                                                        double mass_floor = kDefaultMassFloor);

}  // namespace rsum
