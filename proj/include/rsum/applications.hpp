// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

// Increment predictors for two claim processes: the Poisson shot-noise
// process M(t) = sum_{i <= N(t)} L_i(t - T_i) with compound Poisson payout
// streams, and the compound Polya process.

#pragma once

#include <complex>
#include <functional>

#include "rsum/distributions.hpp"
#include "rsum/tables.hpp"
#include "rsum/transform.hpp"

namespace rsum {

struct ShotNoiseSpec {
  double lambda = 1.0;  // arrival intensity
  double gamma = 1.0;   // jump intensity of each payout stream
  SeverityModel jump_law = SeverityModel::degenerate(1.0);
  double t = 1.0;  // observation horizon
  double s = 1.0;  // prediction horizon

  void validate() const;
};

enum class ShotNoiseMode {
  // Claims arriving in (t, t+s] pay out for a Uniform(0, s) duration.
  derived,
  // Uses E[L_1(t + s - U)], U ~ Uniform(0, t), for the new-arrival term.
  paper_literal,
};

struct ShotNoiseCoefficients {
  double mean_new_arrivals = 0.0;      // E[N(s)] = lambda s
  double levy_increment_mean = 0.0;    // E[L_1(s)] = gamma s E[Y]
  double new_arrival_payout = 0.0;     // mean payout of one new arrival by t + s
  double payout_at_shifted_age = 0.0;  // E[L_1(t + s - U)] = gamma (s + t/2) E[Y]
};

ShotNoiseCoefficients shotnoise_coefficients(const ShotNoiseSpec& spec,
                                             ShotNoiseMode mode = ShotNoiseMode::derived);

// cf of X_1 = L(t - U), U ~ Uniform(0, t):
// (e^{gamma t (phi_Y - 1)} - 1) / (gamma t (phi_Y - 1)).
std::complex<double> shotnoise_component_cf(const ShotNoiseSpec& spec, double u);

// (e^{gamma (t-1)(phi_Y - 1)} - e^{gamma t (phi_Y - 1)}) / (gamma (1 - phi_Y)), the
// alternative form; equal to the derived cf at t = 1 only.
std::complex<double> shotnoise_component_cf_paper(const ShotNoiseSpec& spec, double u);

// pgf of X_1 at a point of the closed unit disk.
std::complex<long double> shotnoise_component_pgf(const ShotNoiseSpec& spec,
                                                  std::complex<long double> z);

// Law of X_1 on [0, ell_max] by unit-circle inversion of its pgf.
RestrictedMomentTable shotnoise_component_pmf(const ShotNoiseSpec& spec, int ell_max,
                                              const InversionConfig& config = {});

struct ShotNoisePrediction {
  PredictionCurve increment;  // E[M(t, t+s] | M(t) = l]
  PredictionCurve count;      // E[N(t) | M(t) = l]
  ShotNoiseCoefficients coefficients;
  RestrictedMomentTable component_pmf;
  RestrictedMomentTable mass;  // P(M(t) = l)
};

// E[M(t, t+s] | M(t) = l] = lambda s * new-arrival payout
//                           + gamma s E[Y] * E[N(t) | M(t) = l],
// with E[N(t) | M(t) = l] from the Panjer recursion on Poisson(lambda t).
ShotNoisePrediction shotnoise_predict(const ShotNoiseSpec& spec, int ell_max,
                                      const InversionConfig& config = {},
                                      ShotNoiseMode mode = ShotNoiseMode::derived,
                                      double mass_floor = kDefaultMassFloor);

// lambda gamma E[Y] (t s + s^2 / 2).
double shotnoise_unconditional_increment(const ShotNoiseSpec& spec);

struct PolyaSpec {
  double alpha = 1.0;
  double beta = 1.0;
  // Lambda(t); must be nondecreasing with Lambda(0) = 0.
  std::function<double(double)> cumulative_intensity = [](double t) { return t; };
  SeverityModel severity = SeverityModel::degenerate(1.0);
  double t = 1.0;
  double s = 1.0;

  void validate() const;
};

// Marginal law of the count at horizon t.
CountModel polya_count_model(const PolyaSpec& spec);

// E[N(t, t+s] | N(t) = m] = Lambda(t, t+s] (alpha + m) / (Lambda(t) + beta).
double polya_count_increment(const PolyaSpec& spec, double m);

struct PolyaPrediction {
  PredictionCurve increment;  // E[Z(t, t+s] | Z(t) = l]
  PredictionCurve count;      // E[N(t) | Z(t) = l]
  RestrictedMomentTable mass;  // P(Z(t) = l)
  double slope = 0.0;          // E[X] Lambda(t, t+s] / (Lambda(t) + beta)
};

// E[X] Lambda(t, t+s] / (Lambda(t) + beta) (alpha + E[N(t) | Z(t) = l]) with
// the inner conditional from the generating-function route.
PolyaPrediction polya_predict(const PolyaSpec& spec, int ell_max,
                              const InversionConfig& config = {},
                              double mass_floor = kDefaultMassFloor);

// E[X] Lambda(t, t+s] alpha / beta.
double polya_unconditional_increment(const PolyaSpec& spec);

}  // namespace rsum
