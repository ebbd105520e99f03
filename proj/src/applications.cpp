// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/applications.hpp"

#include <cmath>
#include <vector>

#include "rsum/errors.hpp"
#include "rsum/panjer.hpp"

namespace rsum {

namespace {

// Below this |a| the ratio (e^a - 1) / a is taken from its Taylor series.
constexpr double kTaylorSwitch = 1e-4;

template <typename Scalar>
std::complex<Scalar> expm1_ratio(std::complex<Scalar> a) {
  if (std::abs(a) < Scalar(kTaylorSwitch)) {
    return Scalar(1) + a / Scalar(2) + a * a / Scalar(6) + a * a * a / Scalar(24);
  }
  return (std::exp(a) - Scalar(1)) / a;
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void ShotNoiseSpec::validate() const {
  if (!positive_finite(lambda)) throw DomainError("shot-noise: lambda must be positive");
  if (!positive_finite(gamma)) throw DomainError("shot-noise: gamma must be positive");
  if (!positive_finite(t)) throw DomainError("shot-noise: t must be positive");
  if (!(std::isfinite(s) && s >= 0.0)) throw DomainError("shot-noise: s must be nonnegative");
  if (!jump_law.is_discrete()) {
    throw DomainError("shot-noise: jump law " + jump_law.describe() + " is not integer-valued");
  }
}

ShotNoiseCoefficients shotnoise_coefficients(const ShotNoiseSpec& spec, ShotNoiseMode mode) {
  spec.validate();
  const double ey = severity_moment(spec.jump_law, 1);
  ShotNoiseCoefficients c;
  c.mean_new_arrivals = spec.lambda * spec.s;
  c.levy_increment_mean = spec.gamma * spec.s * ey;
  c.payout_at_shifted_age = spec.gamma * (spec.s + 0.5 * spec.t) * ey;
  c.new_arrival_payout =
      mode == ShotNoiseMode::derived ? 0.5 * spec.gamma * spec.s * ey : c.payout_at_shifted_age;
  return c;
}

std::complex<double> shotnoise_component_cf(const ShotNoiseSpec& spec, double u) {
  spec.validate();
  const std::complex<double> phi = severity_cf(spec.jump_law, u);
  return expm1_ratio(spec.gamma * spec.t * (phi - 1.0));
}

std::complex<double> shotnoise_component_cf_paper(const ShotNoiseSpec& spec, double u) {
  spec.validate();
  const std::complex<double> phi = severity_cf(spec.jump_law, u);
  const std::complex<double> d = spec.gamma * (1.0 - phi);
  if (std::abs(d) < kTaylorSwitch) return expm1_ratio(spec.gamma * spec.t * (phi - 1.0));
  return (std::exp(spec.gamma * (spec.t - 1.0) * (phi - 1.0)) -
          std::exp(spec.gamma * spec.t * (phi - 1.0))) /
         d;
}

std::complex<long double> shotnoise_component_pgf(const ShotNoiseSpec& spec,
                                                  std::complex<long double> z) {
  const std::complex<long double> w = severity_pgf_deriv<long double>(spec.jump_law, 0, z);
  const long double scale = static_cast<long double>(spec.gamma) * spec.t;
  return expm1_ratio(scale * (w - 1.0L));
}

RestrictedMomentTable shotnoise_component_pmf(const ShotNoiseSpec& spec, int ell_max,
                                              const InversionConfig& config) {
  spec.validate();
  UnitCircleFunction f;
  f.descriptor.construction = "(exp(gamma t (G_Y - 1)) - 1) / (gamma t (G_Y - 1))";
  f.descriptor.k = 0;
  f.descriptor.target = Target::component_pmf;
  f.descriptor.bound = 1.0;
  f.evaluator = [spec](long double u) {
    return shotnoise_component_pgf(spec, std::polar(1.0L, u));
  };
  return invert_unit_circle(f, ell_max, config);
}

double shotnoise_unconditional_increment(const ShotNoiseSpec& spec) {
  spec.validate();
  const double ey = severity_moment(spec.jump_law, 1);
  return spec.lambda * spec.gamma * ey * (spec.t * spec.s + 0.5 * spec.s * spec.s);
}

ShotNoisePrediction shotnoise_predict(const ShotNoiseSpec& spec, int ell_max,
                                      const InversionConfig& config, ShotNoiseMode mode,
                                      double mass_floor) {
  spec.validate();
  ShotNoisePrediction out;
  out.coefficients = shotnoise_coefficients(spec, mode);
  out.component_pmf = shotnoise_component_pmf(spec, ell_max, config);

  const Eigen::VectorXd& p = out.component_pmf.values;
  const double deficit = out.component_pmf.diagnostics.mass_deficit;
  const SeverityModel component = SeverityModel::custom_pmf(
      std::vector<double>(p.data(), p.data() + p.size()), std::abs(deficit) + 1e-10);
  const CountModel arrivals = CountModel::poisson(spec.lambda * spec.t);
  auto tables = restricted_count_moments(arrivals, component, 1, ell_max);
  out.mass = tables[0];
  out.count = to_prediction_curve(tables[1], tables[0], mass_floor);

  const double base = out.coefficients.mean_new_arrivals * out.coefficients.new_arrival_payout;
  out.increment = out.count;
  for (PredictionEntry& e : out.increment.entries) {
    e.value = base + out.coefficients.levy_increment_mean * e.value;
  }
  return out;
}

void PolyaSpec::validate() const {
  if (!positive_finite(alpha)) throw DomainError("polya: alpha must be positive");
  if (!positive_finite(beta)) throw DomainError("polya: beta must be positive");
  if (!cumulative_intensity) throw DomainError("polya: missing cumulative intensity");
  if (!positive_finite(t)) throw DomainError("polya: t must be positive");
  if (!(std::isfinite(s) && s >= 0.0)) throw DomainError("polya: s must be nonnegative");
  if (std::abs(cumulative_intensity(0.0)) > 1e-12) throw DomainError("polya: Lambda(0) must be 0");
  const double lt = cumulative_intensity(t);
  const double lts = cumulative_intensity(t + s);
  if (!(std::isfinite(lt) && lt >= 0.0) || !(std::isfinite(lts) && lts >= lt)) {
    throw DomainError("polya: Lambda must be finite and nondecreasing");
  }
  if (!severity.is_discrete()) {
    throw DomainError("polya: severity " + severity.describe() + " is not integer-valued");
  }
}

CountModel polya_count_model(const PolyaSpec& spec) {
  spec.validate();
  return CountModel::mixed_poisson_gamma(spec.alpha, spec.beta, spec.cumulative_intensity(spec.t));
}

double polya_count_increment(const PolyaSpec& spec, double m) {
  spec.validate();
  if (!(m >= 0.0)) throw DomainError("polya: observed count must be nonnegative");
  const double lt = spec.cumulative_intensity(spec.t);
  const double dl = spec.cumulative_intensity(spec.t + spec.s) - lt;
  return dl * (spec.alpha + m) / (lt + spec.beta);
}

double polya_unconditional_increment(const PolyaSpec& spec) {
  spec.validate();
  const double dl = spec.cumulative_intensity(spec.t + spec.s) - spec.cumulative_intensity(spec.t);
  return severity_moment(spec.severity, 1) * dl * spec.alpha / spec.beta;
}

PolyaPrediction polya_predict(const PolyaSpec& spec, int ell_max, const InversionConfig& config,
                              double mass_floor) {
  const CountModel count = polya_count_model(spec);
  const double lt = spec.cumulative_intensity(spec.t);
  const double dl = spec.cumulative_intensity(spec.t + spec.s) - lt;
  PolyaPrediction out;
  out.slope = severity_moment(spec.severity, 1) * dl / (lt + spec.beta);
  out.mass = invert_unit_circle(gf_count_moment(count, spec.severity, 0), ell_max, config);
  const RestrictedMomentTable m1 =
      invert_unit_circle(gf_count_moment(count, spec.severity, 1), ell_max, config);
  out.count = to_prediction_curve(m1, out.mass, mass_floor);
  out.increment = out.count;
  for (PredictionEntry& e : out.increment.entries) e.value = out.slope * (spec.alpha + e.value);
  return out;
}

}  // namespace rsum
