// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "rsum/errors.hpp"

namespace rsum {

namespace {

using LD = long double;
using CLD = std::complex<long double>;

LD pairwise_sum(const LD* x, std::size_t n) {
  if (n <= 32) {
    LD s = 0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

// Number of series terms for (G_N(g) - q_0) / g when |g| is small.
constexpr int kSeriesTerms = 48;
constexpr LD kSeriesRadius = 0.25L;

double count_mean_power(const CountModel& count, int k) {
  if (k == 0) return 1.0;
  return count_moment(count, k);
}

}  // namespace

int InversionConfig::resolved_grid_size(int ell_max) const {
  if (grid_size > 0) return grid_size;
  const long need = static_cast<long>(aliasing_guard) * (static_cast<long>(ell_max) + 1);
  const unsigned long m = std::bit_ceil(static_cast<unsigned long>(std::max(2L, need)));
  if (m > static_cast<unsigned long>(std::numeric_limits<int>::max())) {
    throw DomainError("inversion grid too large for l_max = " + std::to_string(ell_max));
  }
  return static_cast<int>(m);
}

void InversionConfig::validate(int ell_max) const {
  if (ell_max < 0) throw DomainError("inversion: l_max must be nonnegative");
  if (aliasing_guard < 1) throw DomainError("inversion: aliasing guard must be >= 1");
  if (grid_size < 0) throw DomainError("inversion: grid size must be >= 0");
  const long m = resolved_grid_size(ell_max);
  const long need = static_cast<long>(aliasing_guard) * (static_cast<long>(ell_max) + 1);
  if (m < need) {
    throw DomainError("inversion: grid size " + std::to_string(m) + " is below aliasing_guard * (l_max + 1) = " +
                      std::to_string(need));
  }
}

double tilted_count_moment(const CountModel& count, int k, double s) {
  if (k < 0) throw DomainError("tilted_count_moment: k must be nonnegative");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("tilted_count_moment: s must lie in [0, 1]");
  return count_tilted_moment<double>(count, k, std::complex<double>(s, 0.0)).real();
}

UnitCircleFunction gf_count_moment(const CountModel& count, const SeverityModel& severity,
                                   int k) {
  if (k < 0) throw DomainError("gf_count_moment: k must be nonnegative");
  if (!severity.is_discrete()) {
    throw DomainError("gf_count_moment: severity " + severity.describe() + " is not integer-valued");
  }
  UnitCircleFunction f;
  f.descriptor.construction = "G_m" + std::to_string(k) + " = sum_j S(k,j) G_X^j G_N^(j)(G_X)";
  f.descriptor.k = k;
  f.descriptor.target = Target::count_moment;
  f.descriptor.bound = count_mean_power(count, k);
  f.evaluator = [count, severity, k](LD u) {
    const CLD z = std::polar(1.0L, u);
    const CLD g = severity_pgf_deriv<LD>(severity, 0, z);
    return count_tilted_moment<LD>(count, k, g);
  };
  return f;
}

std::string to_string(ComponentMode mode) {
  switch (mode) {
    case ComponentMode::corrected: return "corrected";
    case ComponentMode::paper_literal: return "paper_literal";
    case ComponentMode::plus_one: return "plus_one";
  }
  return "unknown";
}

UnitCircleFunction gf_component_moment(const CountModel& count, const SeverityModel& severity,
                                       int k, ComponentMode mode) {
  if (k < 0) throw DomainError("gf_component_moment: k must be nonnegative");
  if (!severity.is_discrete()) {
    throw DomainError("gf_component_moment: severity " + severity.describe() +
                      " is not integer-valued");
  }
  UnitCircleFunction f;
  f.descriptor.k = k;
  const double xk = k == 0 ? 1.0 : severity_moment(severity, k);
  switch (mode) {
    case ComponentMode::plus_one: {
      f.descriptor.construction = "E[X^k z^X] G_N(G_X)";
      f.descriptor.target = Target::component_moment_plus;
      f.descriptor.bound = xk;
      f.evaluator = [count, severity, k](LD u) {
        const CLD z = std::polar(1.0L, u);
        const CLD g = severity_pgf_deriv<LD>(severity, 0, z);
        return severity_tilted_moment<LD>(severity, k, z) * count_pgf_deriv<LD>(count, 0, g);
      };
      break;
    }
    case ComponentMode::paper_literal: {
      f.descriptor.construction = "E[X^k z^X] G_N(G_X) / G_X";
      f.descriptor.target = Target::component_moment;
      f.descriptor.bound = std::numeric_limits<double>::infinity();
      f.evaluator = [count, severity, k](LD u) {
        const CLD z = std::polar(1.0L, u);
        const CLD g = severity_pgf_deriv<LD>(severity, 0, z);
        if (std::abs(g) < static_cast<LD>(kSingularityGuard)) {
          throw SingularityError("gf_component_moment: |G_X(e^{iu})| = " +
                                 std::to_string(static_cast<double>(std::abs(g))) +
                                 " at u = " + std::to_string(static_cast<double>(u)));
        }
        return severity_tilted_moment<LD>(severity, k, z) * count_pgf_deriv<LD>(count, 0, g) / g;
      };
      break;
    }
    case ComponentMode::corrected: {
      f.descriptor.construction = "q0 E[X^k] + E[X^k z^X] (G_N(G_X) - q0) / G_X";
      f.descriptor.target = Target::component_moment;
      f.descriptor.bound = xk;
      const Eigen::VectorXd q = count_pmf_table(count, kSeriesTerms);
      std::vector<LD> coeffs(kSeriesTerms);
      for (int n = 1; n <= kSeriesTerms; ++n) coeffs[n - 1] = static_cast<LD>(q[n]);
      const LD q0 = static_cast<LD>(q[0]);
      const LD atom = q0 * static_cast<LD>(xk);
      f.evaluator = [count, severity, k, coeffs, q0, atom](LD u) {
        const CLD z = std::polar(1.0L, u);
        const CLD g = severity_pgf_deriv<LD>(severity, 0, z);
        CLD ratio;
        if (std::abs(g) < kSeriesRadius) {
          ratio = CLD(0);
          for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) ratio = ratio * g + *it;
        } else {
          ratio = (count_pgf_deriv<LD>(count, 0, g) - q0) / g;
        }
        return atom + severity_tilted_moment<LD>(severity, k, z) * ratio;
      };
      break;
    }
  }
  return f;
}

RestrictedMomentTable invert_unit_circle(const UnitCircleFunction& f, int ell_max,
                                         const InversionConfig& config) {
  config.validate(ell_max);
  if (!f.evaluator) throw DomainError("invert_unit_circle: empty generating function");
  const int M = config.resolved_grid_size(ell_max);
  const LD two_pi = 2.0L * std::numbers::pi_v<long double>;

  std::vector<CLD> samples(static_cast<std::size_t>(M));
  std::vector<CLD> twiddle(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) {
    // u in (-pi, pi]
    const int jj = j <= M / 2 ? j : j - M;
    const LD u = two_pi * static_cast<LD>(jj) / static_cast<LD>(M);
    samples[j] = f(u);
    if (!std::isfinite(samples[j].real()) || !std::isfinite(samples[j].imag())) {
      throw NumericalError("invert_unit_circle: non-finite generating function value at u = " +
                           std::to_string(static_cast<double>(u)));
    }
    twiddle[j] = std::polar(1.0L, -u);
  }

  RestrictedMomentTable t;
  t.k = f.descriptor.k;
  t.target = f.descriptor.target;
  t.method = Method::fourier;
  t.values.resize(ell_max + 1);
  std::vector<LD> re(static_cast<std::size_t>(M));
  std::vector<LD> im(static_cast<std::size_t>(M));
  LD max_imag = 0;
  for (int l = 0; l <= ell_max; ++l) {
    long idx = 0;
    for (int j = 0; j < M; ++j) {
      const CLD term = samples[j] * twiddle[idx];
      re[j] = term.real();
      im[j] = term.imag();
      idx += l;
      if (idx >= M) idx %= M;
    }
    const LD value = pairwise_sum(re.data(), re.size()) / M;
    const LD imag = pairwise_sum(im.data(), im.size()) / M;
    max_imag = std::max(max_imag, std::abs(imag));
    t.values[l] = static_cast<double>(value);
  }
  t.diagnostics.max_imag_residue = static_cast<double>(max_imag);
  t.diagnostics.grid = GridInfo{M, config.aliasing_guard};

  const bool mass_table = t.k == 0 && t.target != Target::component_moment;
  clamp_negative(t);
  if (mass_table) {
    t.diagnostics.mass_deficit = 1.0 - t.values.sum();
    t.diagnostics.mass_check_failed =
        std::abs(t.diagnostics.mass_deficit) > config.mass_check_tolerance;
  }
  return t;
}

namespace {

StabilityReport scan(const std::vector<double>& f, const std::vector<double>& r,
                     const std::vector<double>& mass, const std::vector<bool>& defined,
                     double rel_tol) {
  if (!(rel_tol > 0.0)) throw DomainError("stability_scan: rel_tol must be positive");
  if (f.size() != r.size()) {
    throw DomainError("stability_scan: tables have " + std::to_string(f.size()) + " and " +
                      std::to_string(r.size()) + " entries");
  }
  StabilityReport rep;
  rep.rel_tol = rel_tol;
  const int n = static_cast<int>(r.size());
  if (n == 0) return rep;
  rep.reference_mode = static_cast<int>(std::max_element(mass.begin(), mass.end()) - mass.begin());

  auto comparable = [&](int l) { return std::isfinite(r[l]) && r[l] != 0.0; };
  auto disagree = [&](int l) {
    if (!std::isfinite(f[l])) return true;
    return std::abs(f[l] - r[l]) > rel_tol * std::abs(r[l]);
  };

  for (int l = rep.reference_mode - 1; l >= 0; --l) {
    if (comparable(l) && disagree(l)) {
      rep.unstable_prefix_end = l + 1;
      break;
    }
  }
  for (int l = rep.reference_mode; l < n; ++l) {
    if (comparable(l) && disagree(l)) {
      rep.tail_disagreement_start = l;
      break;
    }
  }
  const int start = rep.unstable_prefix_end.value_or(0);
  double sum = 0.0;
  for (int l = start; l < n; ++l) {
    if (!defined[l] || !comparable(l)) continue;
    const double rel = std::isfinite(f[l]) ? std::abs(f[l] - r[l]) / std::abs(r[l])
                                           : std::numeric_limits<double>::infinity();
    rep.suffix_max_rel = std::max(rep.suffix_max_rel, rel);
    sum += rel;
    ++rep.suffix_count;
  }
  if (rep.suffix_count > 0) rep.suffix_mean_rel = sum / rep.suffix_count;
  return rep;
}

}  // namespace

StabilityReport stability_scan(RestrictedMomentTable& fourier,
                               const RestrictedMomentTable& recursion, double rel_tol,
                               double value_floor) {
  const std::size_t n = static_cast<std::size_t>(recursion.values.size());
  if (static_cast<std::size_t>(fourier.values.size()) != n) {
    throw DomainError("stability_scan: table lengths differ");
  }
  std::vector<double> f(n), r(n), mass(n);
  std::vector<bool> defined(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = fourier.values[static_cast<Eigen::Index>(i)];
    r[i] = recursion.values[static_cast<Eigen::Index>(i)];
    mass[i] = std::abs(r[i]);
    defined[i] = mass[i] >= value_floor;
  }
  StabilityReport rep = scan(f, r, mass, defined, rel_tol);
  fourier.diagnostics.unstable_prefix = rep.unstable_prefix_end;
  return rep;
}

StabilityReport stability_scan(const PredictionCurve& fourier, const PredictionCurve& recursion,
                               double rel_tol) {
  const std::size_t n = recursion.entries.size();
  if (fourier.entries.size() != n) throw DomainError("stability_scan: curve lengths differ");
  std::vector<double> f(n), r(n), mass(n);
  std::vector<bool> defined(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = fourier.entries[i].value;
    r[i] = recursion.entries[i].value;
    mass[i] = recursion.entries[i].mass;
    defined[i] = recursion.entries[i].defined;
  }
  return scan(f, r, mass, defined, rel_tol);
}

}  // namespace rsum
