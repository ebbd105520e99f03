// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/continuous.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "rsum/errors.hpp"
#include "rsum/stirling.hpp"

namespace rsum {

namespace {

using C = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr int kGaussOrder = 15;
constexpr int kSeriesTerms = 48;
constexpr double kSeriesRadius = 0.25;
constexpr int kEnvelopeSamples = 257;
constexpr double kInitialTruncation = 16.0;

struct GaussRule {
  std::array<double, kGaussOrder> node{};
  std::array<double, kGaussOrder> weight{};
};

// Legendre roots by Newton iteration from the Chebyshev guesses.
GaussRule make_gauss_rule() {
  GaussRule r;
  const int n = kGaussOrder;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.node[i] = x;
    r.weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = make_gauss_rule();
  return rule;
}

void require_continuous(const SeverityModel& severity, const char* who) {
  if (!severity.is_continuous()) {
    throw DomainError(std::string(who) + ": severity " + severity.describe() +
                      " is not continuous");
  }
}

// E[X^k e^{iuX}] = i^{-k} phi^{(k)}(u).
C tilted_severity(const SeverityModel& severity, int k, double u) {
  if (k == 0) return severity_cf(severity, u);
  C ik(1.0, 0.0);
  for (int i = 0; i < k; ++i) ik *= C(0.0, -1.0);
  return ik * severity_cf_deriv(severity, k, u);
}

// Re[(e^{-ixt} - 1)/(-it) g] written without cancellation near t = 0.
double kernel(double x, double t, C g) {
  const double s = std::sin(0.5 * x * t);
  return (g.real() * std::sin(x * t) + g.imag() * 2.0 * s * s) / t;
}

class GridIntegrator {
 public:
  GridIntegrator(const FstFunction& f, const std::vector<double>& xs, const QuadratureConfig& cfg,
                 double truncation)
      : f_(f), xs_(xs), cfg_(cfg), T_(truncation) {}

  // Integrals over [0, T] for every x, plus disagreement estimates.
  void run(std::vector<double>& integral, std::vector<double>& error) {
    integral.assign(xs_.size(), 0.0);
    error.assign(xs_.size(), 0.0);
    double xmax = 1.0;
    for (double x : xs_) xmax = std::max(xmax, x);
    const double width = 2.0 * kPi / (xmax * cfg_.panels_per_period);
    const long panels = std::max(1L, static_cast<long>(std::ceil(T_ / width)));
    const double h = T_ / static_cast<double>(panels);

    // Node offsets from the panel start: whole panel, left half, right half.
    const GaussRule& r = gauss_rule();
    std::array<double, 3 * kGaussOrder> offset{}, weight{};
    for (int i = 0; i < kGaussOrder; ++i) {
      offset[i] = 0.5 * h * (1.0 + r.node[i]);
      offset[kGaussOrder + i] = 0.25 * h * (1.0 + r.node[i]);
      offset[2 * kGaussOrder + i] = 0.5 * h + 0.25 * h * (1.0 + r.node[i]);
      weight[i] = 0.5 * h * r.weight[i];
      weight[kGaussOrder + i] = 0.25 * h * r.weight[i];
      weight[2 * kGaussOrder + i] = 0.25 * h * r.weight[i];
    }
    // cos and sin of x * offset, per x.
    std::vector<std::array<double, 3 * kGaussOrder>> co(xs_.size()), so(xs_.size());
    for (std::size_t q = 0; q < xs_.size(); ++q) {
      for (int i = 0; i < 3 * kGaussOrder; ++i) {
        co[q][i] = std::cos(xs_[q] * offset[i]);
        so[q][i] = std::sin(xs_[q] * offset[i]);
      }
    }

    std::array<double, 3 * kGaussOrder> gre{}, gim{}, invt{};
    std::vector<std::size_t> refine;
    for (long p = 0; p < panels; ++p) {
      const double a = h * static_cast<double>(p);
      const double b = a + h;
      for (int i = 0; i < 3 * kGaussOrder; ++i) {
        const double t = a + offset[i];
        const C g = f_(t) - f_.atom_at_zero;
        gre[i] = g.real();
        gim[i] = g.imag();
        invt[i] = 1.0 / t;
      }
      const double tol = 0.5 * cfg_.abs_tol * kPi * h / T_;
      refine.clear();
      for (std::size_t q = 0; q < xs_.size(); ++q) {
        const double x = xs_[q];
        double est[3] = {0.0, 0.0, 0.0};
        if (x * b < 1.0) {
          for (int i = 0; i < 3 * kGaussOrder; ++i) {
            est[i / kGaussOrder] +=
                weight[i] * kernel(x, a + offset[i], C(gre[i], gim[i]));
          }
        } else {
          const double ca = std::cos(x * a), sa = std::sin(x * a);
          for (int i = 0; i < 3 * kGaussOrder; ++i) {
            const double sn = sa * co[q][i] + ca * so[q][i];
            const double cs = ca * co[q][i] - sa * so[q][i];
            est[i / kGaussOrder] += weight[i] * (gre[i] * sn + gim[i] * (1.0 - cs)) * invt[i];
          }
        }
        const double whole = est[0];
        const double halves = est[1] + est[2];
        const double diff = std::abs(whole - halves);
        if (diff > std::max(tol, cfg_.rel_tol * std::abs(halves)) && cfg_.max_depth > 0) {
          refine.push_back(q);
        } else {
          integral[q] += halves;
          error[q] += diff;
        }
      }
      if (!refine.empty()) {
        const double m = 0.5 * (a + b);
        panel(a, m, 1, refine, integral, error);
        panel(m, b, 1, refine, integral, error);
      }
    }
  }

 private:
  void sample(double a, double b, std::array<C, kGaussOrder>& g,
              std::array<double, kGaussOrder>& t) const {
    const GaussRule& r = gauss_rule();
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (int i = 0; i < kGaussOrder; ++i) {
      t[i] = c + hw * r.node[i];
      g[i] = f_(t[i]) - f_.atom_at_zero;
    }
  }

  static double apply(double x, double a, double b, const std::array<C, kGaussOrder>& g,
                      const std::array<double, kGaussOrder>& t) {
    const GaussRule& r = gauss_rule();
    double s = 0.0;
    for (int i = 0; i < kGaussOrder; ++i) s += r.weight[i] * kernel(x, t[i], g[i]);
    return 0.5 * (b - a) * s;
  }

  // Subdivision for the x indices whose whole-panel and half-panel
  // estimates disagree.
  void panel(double a, double b, int depth, const std::vector<std::size_t>& which,
             std::vector<double>& integral, std::vector<double>& error) {
    std::array<C, kGaussOrder> gw, gl, gr;
    std::array<double, kGaussOrder> tw, tl, tr;
    const double m = 0.5 * (a + b);
    sample(a, b, gw, tw);
    sample(a, m, gl, tl);
    sample(m, b, gr, tr);
    const double tol = 0.5 * cfg_.abs_tol * kPi * (b - a) / T_;
    std::vector<std::size_t> refine;
    for (std::size_t i : which) {
      const double x = xs_[i];
      const double w = apply(x, a, b, gw, tw);
      const double h = apply(x, a, m, gl, tl) + apply(x, m, b, gr, tr);
      const double diff = std::abs(w - h);
      if (diff > std::max(tol, cfg_.rel_tol * std::abs(h)) && depth < cfg_.max_depth) {
        refine.push_back(i);
      } else {
        integral[i] += h;
        error[i] += diff;
      }
    }
    if (!refine.empty()) {
      panel(a, m, depth + 1, refine, integral, error);
      panel(m, b, depth + 1, refine, integral, error);
    }
  }

  const FstFunction& f_;
  const std::vector<double>& xs_;
  const QuadratureConfig& cfg_;
  double T_;
};

// Bound on (1/pi) int_T^inf |kernel| |g| using the sampled envelope of g on
// [T, 2T] and the decay exponent.
double tail_bound(const FstFunction& f, double T) {
  double env = 0.0;
  for (int i = 0; i < kEnvelopeSamples; ++i) {
    const double t = T * (1.0 + static_cast<double>(i) / (kEnvelopeSamples - 1));
    env = std::max(env, std::abs(f(t) - f.atom_at_zero));
  }
  if (f.decay_exponent && *f.decay_exponent > 0.0) {
    return 2.0 * env / (kPi * *f.decay_exponent);
  }
  // no decay information: the envelope itself, reported but not certified
  return env * std::max(1.0, 1.0 / T) / kPi;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (panels_per_period < 8) throw DomainError("quadrature: panels_per_period must be >= 8");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw DomainError("quadrature: tolerances must be positive");
  }
  if (truncation && !(*truncation > 0.0 && std::isfinite(*truncation))) {
    throw DomainError("quadrature: truncation must be positive and finite");
  }
  if (!(max_truncation > 0.0)) throw DomainError("quadrature: max_truncation must be positive");
  if (max_depth < 0) throw DomainError("quadrature: max_depth must be >= 0");
}

FstFunction fst_count_moment_panjer(const CountModel& count, const SeverityModel& severity,
                                    int k) {
  require_continuous(severity, "fst_count_moment_panjer");
  if (k < 0) throw DomainError("fst_count_moment_panjer: k must be nonnegative");
  const auto ab = count.panjer_params();
  if (!ab) {
    throw DomainError("fst_count_moment_panjer: count " + count.describe() +
                      " is not in the Panjer (a, b) class");
  }
  std::vector<double> coef;  // row-major (n, j) for j < n <= k
  for (int n = 1; n <= k; ++n)
    for (int j = 0; j < n; ++j) coef.push_back(ab->a * binomial(n, j) + ab->b * binomial(n - 1, j));
  FstFunction f;
  f.descriptor = "panjer order recursion, k=" + std::to_string(k) + ", " + count.describe() +
                 " x " + severity.describe();
  f.total_mass = k == 0 ? 1.0 : count_moment(count, k);
  f.atom_at_zero = k == 0 ? count_pmf(count, 0) : 0.0;
  f.decay_exponent = severity_cf_decay_exponent(severity);
  const double a = ab->a;
  f.evaluator = [count, severity, k, coef, a](double u) {
    const C phi = severity_cf(severity, u);
    std::vector<C> m(static_cast<std::size_t>(k) + 1);
    m[0] = count_pgf_deriv<double>(count, 0, phi);
    const C denom = 1.0 - a * phi;
    if (std::abs(denom) < 1e-12) {
      throw SingularityError("fst_count_moment_panjer: 1 - a phi(u) vanishes at u = " +
                             std::to_string(u));
    }
    std::size_t idx = 0;
    for (int n = 1; n <= k; ++n) {
      C sum(0.0, 0.0);
      for (int j = 0; j < n; ++j) sum += coef[idx++] * m[j];
      m[n] = sum * phi / denom;
    }
    return m[k];
  };
  return f;
}

FstFunction fst_count_moment_general(const CountModel& count, const SeverityModel& severity,
                                     int k) {
  require_continuous(severity, "fst_count_moment_general");
  if (k < 0) throw DomainError("fst_count_moment_general: k must be nonnegative");
  FstFunction f;
  f.descriptor = "sum_j S(k,j) phi^j G_N^(j)(phi), k=" + std::to_string(k) + ", " +
                 count.describe() + " x " + severity.describe();
  f.total_mass = k == 0 ? 1.0 : count_moment(count, k);
  f.atom_at_zero = k == 0 ? count_pmf(count, 0) : 0.0;
  f.decay_exponent = severity_cf_decay_exponent(severity);
  f.evaluator = [count, severity, k](double u) {
    return count_tilted_moment<double>(count, k, severity_cf(severity, u));
  };
  return f;
}

FstFunction fst_component_moment(const CountModel& count, const SeverityModel& severity, int k,
                                 bool plus_one, ComponentMode mode) {
  require_continuous(severity, "fst_component_moment");
  if (k < 0) throw DomainError("fst_component_moment: k must be nonnegative");
  if (plus_one) mode = ComponentMode::plus_one;
  const double xk = k == 0 ? 1.0 : severity_moment(severity, k);
  FstFunction f;
  f.descriptor = "component k=" + std::to_string(k) + " (" + to_string(mode) + "), " +
                 count.describe() + " x " + severity.describe();
  f.total_mass = xk;
  f.decay_exponent = severity_cf_decay_exponent(severity);
  f.approximate = k > 0 && !severity_cf_deriv_is_exact(severity, k);
  switch (mode) {
    case ComponentMode::plus_one:
      f.atom_at_zero = 0.0;
      f.evaluator = [count, severity, k](double u) {
        return tilted_severity(severity, k, u) *
               count_pgf_deriv<double>(count, 0, severity_cf(severity, u));
      };
      break;
    case ComponentMode::paper_literal:
      f.atom_at_zero = 0.0;
      f.total_mass = std::numeric_limits<double>::infinity();
      f.evaluator = [count, severity, k](double u) {
        const C phi = severity_cf(severity, u);
        if (std::abs(phi) < kSingularityGuard) {
          throw SingularityError("fst_component_moment: |phi_X(u)| below guard at u = " +
                                 std::to_string(u));
        }
        return tilted_severity(severity, k, u) * count_pgf_deriv<double>(count, 0, phi) / phi;
      };
      break;
    case ComponentMode::corrected: {
      const Eigen::VectorXd q = count_pmf_table(count, kSeriesTerms);
      const double q0 = q[0];
      f.atom_at_zero = q0 * xk;
      const double atom = f.atom_at_zero;
      f.evaluator = [count, severity, k, q, q0, atom](double u) {
        const C phi = severity_cf(severity, u);
        C ratio;
        if (std::abs(phi) < kSeriesRadius) {
          ratio = C(0.0, 0.0);
          for (int n = kSeriesTerms; n >= 1; --n) ratio = ratio * phi + q[n];
        } else {
          ratio = (count_pgf_deriv<double>(count, 0, phi) - q0) / phi;
        }
        return atom + tilted_severity(severity, k, u) * ratio;
      };
      break;
    }
  }
  return f;
}

FstFunction fst_poisson_m1(double lambda, const SeverityModel& severity) {
  require_continuous(severity, "fst_poisson_m1");
  if (!(lambda > 0.0 && std::isfinite(lambda))) throw DomainError("fst_poisson_m1: lambda > 0");
  FstFunction f;
  f.descriptor = "lambda phi exp(lambda (phi - 1))";
  f.total_mass = lambda;
  f.decay_exponent = severity_cf_decay_exponent(severity);
  f.evaluator = [lambda, severity](double u) {
    const C phi = severity_cf(severity, u);
    return lambda * phi * std::exp(lambda * (phi - 1.0));
  };
  return f;
}

FstFunction fst_poisson_m2(double lambda, const SeverityModel& severity) {
  require_continuous(severity, "fst_poisson_m2");
  if (!(lambda > 0.0 && std::isfinite(lambda))) throw DomainError("fst_poisson_m2: lambda > 0");
  FstFunction f;
  f.descriptor = "lambda^2 phi^2 exp(lambda (phi - 1)) + m_1";
  f.total_mass = lambda * lambda + lambda;
  f.decay_exponent = severity_cf_decay_exponent(severity);
  f.evaluator = [lambda, severity](double u) {
    const C phi = severity_cf(severity, u);
    const C e = std::exp(lambda * (phi - 1.0));
    return lambda * lambda * phi * phi * e + lambda * phi * e;
  };
  return f;
}

std::vector<FstInversion> invert_fst_grid(const FstFunction& f, const std::vector<double>& xs,
                                          const QuadratureConfig& config) {
  config.validate();
  if (!f.evaluator) throw DomainError("invert_fst: empty transform");
  for (double x : xs) {
    if (!(x > 0.0 && std::isfinite(x))) throw DomainError("invert_fst: x must be positive");
  }
  if (xs.empty()) return {};

  double T = 0.0;
  double bound = 0.0;
  bool converged = true;
  if (config.truncation) {
    T = *config.truncation;
    bound = tail_bound(f, T);
  } else {
    if (!f.decay_exponent || !(*f.decay_exponent > 0.0)) {
      throw DomainError("invert_fst: the automatic truncation needs a cf decay exponent; "
                        "give a decay exponent or an explicit truncation");
    }
    T = std::min(kInitialTruncation, config.max_truncation);
    for (;;) {
      bound = tail_bound(f, T);
      if (bound < 0.5 * config.abs_tol) break;
      if (T >= config.max_truncation) {
        converged = false;
        break;
      }
      T = std::min(2.0 * T, config.max_truncation);
    }
  }

  std::vector<double> integral, error;
  GridIntegrator(f, xs, config, T).run(integral, error);

  std::vector<FstInversion> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    FstInversion& r = out[i];
    r.x = xs[i];
    r.truncation = T;
    r.tail_bound = bound;
    r.quadrature_error = error[i] / kPi;
    r.converged = converged;
    double v = f.atom_at_zero + integral[i] / kPi;
    if (v < 0.0) {
      r.clamped_by = -v;
      v = 0.0;
    } else if (v > f.total_mass) {
      r.clamped_by = v - f.total_mass;
      v = f.total_mass;
    }
    r.value = v;
  }
  return out;
}

FstInversion invert_fst(const FstFunction& f, double x, const QuadratureConfig& config) {
  return invert_fst_grid(f, {x}, config).front();
}

std::vector<ContinuousPredictionRow> continuous_predict(const CountModel& count,
                                                        const SeverityModel& severity, int k,
                                                        const std::vector<double>& xs,
                                                        const QuadratureConfig& config,
                                                        double mass_floor) {
  const bool panjer = count.panjer_params().has_value();
  const FstFunction fk = panjer ? fst_count_moment_panjer(count, severity, k)
                                : fst_count_moment_general(count, severity, k);
  const FstFunction f0 = panjer ? fst_count_moment_panjer(count, severity, 0)
                                : fst_count_moment_general(count, severity, 0);
  const auto rk = invert_fst_grid(fk, xs, config);
  const auto r0 = invert_fst_grid(f0, xs, config);
  std::vector<ContinuousPredictionRow> rows(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ContinuousPredictionRow& row = rows[i];
    row.x = xs[i];
    row.restricted = rk[i].value;
    row.mass = r0[i].value;
    row.converged = rk[i].converged && r0[i].converged;
    row.defined = row.mass >= mass_floor;
    row.value = row.mass > 0.0 ? row.restricted / row.mass
                               : std::numeric_limits<double>::quiet_NaN();
  }
  return rows;
}

}  // namespace rsum
