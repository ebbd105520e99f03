// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/distributions.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rsum/errors.hpp"
#include "rsum/stirling.hpp"

namespace rsum {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Below this the missing mass of a custom table is rounding, not tail.
double rounding_slack(std::size_t size) { return 16.0 * kEps * static_cast<double>(size + 1); }

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

double validate_table(const std::vector<double>& pmf, double tail_tolerance, const char* who) {
  require(!pmf.empty(), std::string(who) + ": empty pmf table");
  require(std::isfinite(tail_tolerance) && tail_tolerance >= 0.0,
          std::string(who) + ": tail tolerance must be nonnegative");
  for (double v : pmf) {
    require(std::isfinite(v) && v >= 0.0, std::string(who) + ": pmf entries must be finite and >= 0");
  }
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  const double slack = rounding_slack(pmf.size());
  require(total <= 1.0 + slack + tail_tolerance, std::string(who) + ": pmf sums above 1");
  const double missing = std::max(0.0, 1.0 - total);
  require(missing <= tail_tolerance + slack,
          std::string(who) + ": pmf mass deficit exceeds tail tolerance");
  return missing;
}

template <typename Scalar>
std::complex<Scalar> ipow(std::complex<Scalar> z, int n) {
  std::complex<Scalar> result(1);
  while (n > 0) {
    if (n & 1) result *= z;
    z *= z;
    n >>= 1;
  }
  return result;
}

template <typename Scalar>
Scalar rising(Scalar x, int j) {
  Scalar r(1);
  for (int i = 0; i < j; ++i) r *= x + Scalar(i);
  return r;
}

template <typename Scalar>
Scalar falling(Scalar x, int j) {
  Scalar r(1);
  for (int i = 0; i < j; ++i) r *= x - Scalar(i);
  return r;
}

double factorial(int j) { return std::exp(std::lgamma(j + 1.0)); }

template <typename Scalar>
void check_disk(std::complex<Scalar> z) {
  if (std::abs(z) > Scalar(1) + Scalar(1e-12)) {
    throw DomainError("generating function argument outside the closed unit disk");
  }
}

// sum_{n >= j} (n)_j pmf[n] z^{n-j} by Horner's rule.
template <typename Scalar>
std::complex<Scalar> table_pgf_deriv(const std::vector<double>& pmf, int j,
                                     std::complex<Scalar> z) {
  std::complex<Scalar> acc(0);
  for (int n = static_cast<int>(pmf.size()) - 1; n >= j; --n) {
    acc = acc * z + falling(Scalar(n), j) * Scalar(pmf[static_cast<std::size_t>(n)]);
  }
  return acc;
}

void certify_table(const std::vector<double>& pmf, double missing, int j, const char* who) {
  if (j >= 1 && missing > rounding_slack(pmf.size())) {
    std::ostringstream os;
    os << who << ": table misses mass " << missing << " beyond n_max = " << pmf.size() - 1
       << "; derivative/moment of order " << j << " cannot be certified";
    throw MomentError(os.str());
  }
}

double negbin_pmf(double r, double p, int n) {
  return std::exp(std::lgamma(n + r) - std::lgamma(r) - std::lgamma(n + 1.0) + r * std::log(p) +
                  n * std::log1p(-p));
}

}  // namespace

// ---------------------------------------------------------------------------
// CountModel

CountModel CountModel::poisson(double lambda) {
  require(finite_positive(lambda), "poisson count: lambda must be > 0");
  return CountModel(count::Poisson{lambda});
}

CountModel CountModel::negative_binomial(double r, double p) {
  require(finite_positive(r), "negative binomial count: r must be > 0");
  require(p > 0.0 && p < 1.0, "negative binomial count: p must lie in (0, 1)");
  return CountModel(count::NegativeBinomial{r, p});
}

CountModel CountModel::binomial(int n, double p) {
  require(n >= 1, "binomial count: n must be >= 1");
  require(p > 0.0 && p < 1.0, "binomial count: p must lie in (0, 1)");
  return CountModel(count::Binomial{n, p});
}

CountModel CountModel::mixed_poisson_gamma(double alpha, double beta,
                                           double cumulative_intensity) {
  require(finite_positive(alpha), "mixed poisson-gamma count: alpha must be > 0");
  require(finite_positive(beta), "mixed poisson-gamma count: beta must be > 0");
  require(std::isfinite(cumulative_intensity) && cumulative_intensity >= 0.0,
          "mixed poisson-gamma count: cumulative intensity must be >= 0");
  return CountModel(count::MixedPoissonGamma{alpha, beta, cumulative_intensity});
}

CountModel CountModel::custom(std::vector<double> pmf, double tail_tolerance) {
  validate_table(pmf, tail_tolerance, "custom count");
  return CountModel(count::CustomPmf{std::move(pmf), tail_tolerance});
}

std::optional<PanjerParams> CountModel::panjer_params() const {
  return std::visit(
      Overloaded{
          [](const count::Poisson& m) -> std::optional<PanjerParams> {
            return PanjerParams{0.0, m.lambda};
          },
          [](const count::NegativeBinomial& m) -> std::optional<PanjerParams> {
            const double q = 1.0 - m.p;
            return PanjerParams{q, (m.r - 1.0) * q};
          },
          [](const count::Binomial& m) -> std::optional<PanjerParams> {
            const double odds = m.p / (1.0 - m.p);
            return PanjerParams{-odds, (m.n + 1.0) * odds};
          },
          [](const auto&) -> std::optional<PanjerParams> { return std::nullopt; }},
      kind_);
}

double CountModel::missing_mass() const {
  if (const auto* c = std::get_if<count::CustomPmf>(&kind_)) {
    return std::max(0.0, 1.0 - std::accumulate(c->pmf.begin(), c->pmf.end(), 0.0));
  }
  return 0.0;
}

std::string CountModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const count::Poisson& m) { os << "poisson(lambda=" << m.lambda << ")"; },
                 [&](const count::NegativeBinomial& m) {
                   os << "negative_binomial(r=" << m.r << ", p=" << m.p << ")";
                 },
                 [&](const count::Binomial& m) {
                   os << "binomial(n=" << m.n << ", p=" << m.p << ")";
                 },
                 [&](const count::MixedPoissonGamma& m) {
                   os << "mixed_poisson_gamma(alpha=" << m.alpha << ", beta=" << m.beta
                      << ", intensity=" << m.intensity << ")";
                 },
                 [&](const count::CustomPmf& m) {
                   os << "custom_count(n_max=" << m.pmf.size() - 1 << ")";
                 }},
             kind_);
  return os.str();
}

double count_pmf(const CountModel& model, int n) {
  if (n < 0) throw DomainError("count_pmf: n must be >= 0");
  return std::visit(
      Overloaded{
          [n](const count::Poisson& m) {
            return std::exp(-m.lambda + n * std::log(m.lambda) - std::lgamma(n + 1.0));
          },
          [n](const count::NegativeBinomial& m) { return negbin_pmf(m.r, m.p, n); },
          [n](const count::Binomial& m) {
            if (n > m.n) return 0.0;
            return std::exp(std::lgamma(m.n + 1.0) - std::lgamma(n + 1.0) -
                            std::lgamma(m.n - n + 1.0) + n * std::log(m.p) +
                            (m.n - n) * std::log1p(-m.p));
          },
          [n](const count::MixedPoissonGamma& m) {
            if (m.intensity == 0.0) return n == 0 ? 1.0 : 0.0;
            return negbin_pmf(m.alpha, m.beta / (m.beta + m.intensity), n);
          },
          [n](const count::CustomPmf& m) {
            return static_cast<std::size_t>(n) < m.pmf.size() ? m.pmf[static_cast<std::size_t>(n)]
                                                              : 0.0;
          }},
      model.kind());
}

Eigen::VectorXd count_pmf_table(const CountModel& model, int n_max) {
  Eigen::VectorXd table(n_max + 1);
  for (int n = 0; n <= n_max; ++n) table[n] = count_pmf(model, n);
  return table;
}

template <typename Scalar>
std::complex<Scalar> count_pgf_deriv(const CountModel& model, int j, std::complex<Scalar> z) {
  using C = std::complex<Scalar>;
  if (j < 0) throw DomainError("count_pgf_deriv: order must be >= 0");
  check_disk(z);
  const C one(1);
  return std::visit(
      Overloaded{
          [&](const count::Poisson& m) -> C {
            const Scalar lambda(m.lambda);
            return std::pow(lambda, Scalar(j)) * std::exp(lambda * (z - one));
          },
          [&](const count::NegativeBinomial& m) -> C {
            const Scalar r(m.r), p(m.p), q = Scalar(1) - Scalar(m.p);
            return rising(r, j) * std::pow(q, Scalar(j)) * std::pow(p, r) *
                   std::pow(one - q * z, -(r + Scalar(j)));
          },
          [&](const count::Binomial& m) -> C {
            if (j > m.n) return C(0);
            const Scalar p(m.p);
            return falling(Scalar(m.n), j) * std::pow(p, Scalar(j)) *
                   ipow(C(Scalar(1) - p) + p * z, m.n - j);
          },
          [&](const count::MixedPoissonGamma& m) -> C {
            const Scalar alpha(m.alpha), beta(m.beta), lam(m.intensity);
            return rising(alpha, j) * std::pow(lam, Scalar(j)) * std::pow(beta, alpha) *
                   std::pow(C(beta) + lam * (one - z), -(alpha + Scalar(j)));
          },
          [&](const count::CustomPmf& m) -> C {
            certify_table(m.pmf, model.missing_mass(), j, "custom count");
            return table_pgf_deriv(m.pmf, j, z);
          }},
      model.kind());
}

template std::complex<double> count_pgf_deriv(const CountModel&, int, std::complex<double>);
template std::complex<long double> count_pgf_deriv(const CountModel&, int,
                                                   std::complex<long double>);

double count_factorial_moment(const CountModel& model, int j) {
  return count_pgf_deriv(model, j, std::complex<double>(1.0)).real();
}

double count_moment(const CountModel& model, int k) {
  if (k < 0) throw DomainError("count_moment: order must be >= 0");
  if (k == 0) return 1.0;
  if (const auto* c = std::get_if<count::CustomPmf>(&model.kind())) {
    certify_table(c->pmf, model.missing_mass(), k, "custom count");
    double sum = 0.0;
    for (std::size_t n = 0; n < c->pmf.size(); ++n) {
      sum += std::pow(static_cast<double>(n), k) * c->pmf[n];
    }
    return sum;
  }
  const auto s = stirling2_row<double>(k);
  double sum = 0.0;
  for (int j = 1; j <= k; ++j) sum += s[j] * count_factorial_moment(model, j);
  return sum;
}

// ---------------------------------------------------------------------------
// SeverityModel

SeverityModel SeverityModel::poisson(double gamma) {
  require(finite_positive(gamma), "poisson severity: gamma must be > 0");
  return SeverityModel(severity::Poisson{gamma});
}

SeverityModel SeverityModel::geometric(double p) {
  require(p > 0.0 && p < 1.0, "geometric severity: p must lie in (0, 1)");
  return SeverityModel(severity::Geometric{p});
}

SeverityModel SeverityModel::degenerate(double c) {
  require(std::isfinite(c) && c >= 0.0, "degenerate severity: c must be >= 0");
  return SeverityModel(severity::Degenerate{c});
}

SeverityModel SeverityModel::custom_pmf(std::vector<double> pmf, double tail_tolerance) {
  validate_table(pmf, tail_tolerance, "custom severity");
  return SeverityModel(severity::CustomPmf{std::move(pmf), tail_tolerance});
}

SeverityModel SeverityModel::exponential(double rate) {
  require(finite_positive(rate), "exponential severity: rate must be > 0");
  return SeverityModel(severity::Exponential{rate});
}

SeverityModel SeverityModel::gamma(double shape, double rate) {
  require(finite_positive(shape), "gamma severity: shape must be > 0");
  require(finite_positive(rate), "gamma severity: rate must be > 0");
  return SeverityModel(severity::Gamma{shape, rate});
}

SeverityModel SeverityModel::custom_cf(severity::CustomCf cf) {
  require(static_cast<bool>(cf.cf), "custom cf severity: cf must be callable");
  require(!cf.decay_exponent || finite_positive(*cf.decay_exponent),
          "custom cf severity: decay exponent must be > 0");
  return SeverityModel(severity::CustomCf{std::move(cf)});
}

bool SeverityModel::is_discrete() const {
  return std::visit(Overloaded{[](const severity::Poisson&) { return true; },
                               [](const severity::Geometric&) { return true; },
                               [](const severity::CustomPmf&) { return true; },
                               [](const severity::Degenerate& m) { return m.c == std::floor(m.c); },
                               [](const auto&) { return false; }},
                    kind_);
}

bool SeverityModel::is_continuous() const {
  return std::holds_alternative<severity::Exponential>(kind_) ||
         std::holds_alternative<severity::Gamma>(kind_) ||
         std::holds_alternative<severity::CustomCf>(kind_);
}

double SeverityModel::missing_mass() const {
  if (const auto* c = std::get_if<severity::CustomPmf>(&kind_)) {
    return std::max(0.0, 1.0 - std::accumulate(c->pmf.begin(), c->pmf.end(), 0.0));
  }
  return 0.0;
}

std::string SeverityModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{[&](const severity::Poisson& m) { os << "poisson(gamma=" << m.gamma << ")"; },
                        [&](const severity::Geometric& m) { os << "geometric(p=" << m.p << ")"; },
                        [&](const severity::Degenerate& m) { os << "degenerate(c=" << m.c << ")"; },
                        [&](const severity::CustomPmf& m) {
                          os << "custom_severity(n_max=" << m.pmf.size() - 1 << ")";
                        },
                        [&](const severity::Exponential& m) {
                          os << "exponential(rate=" << m.rate << ")";
                        },
                        [&](const severity::Gamma& m) {
                          os << "gamma(shape=" << m.shape << ", rate=" << m.rate << ")";
                        },
                        [&](const severity::CustomCf&) { os << "custom_cf"; }},
             kind_);
  return os.str();
}

double severity_pmf(const SeverityModel& model, int n) {
  if (n < 0) throw DomainError("severity_pmf: n must be >= 0");
  if (!model.is_discrete()) throw DomainError("severity_pmf: model is not discrete");
  return std::visit(
      Overloaded{[n](const severity::Poisson& m) {
                   return std::exp(-m.gamma + n * std::log(m.gamma) - std::lgamma(n + 1.0));
                 },
                 [n](const severity::Geometric& m) { return m.p * std::pow(1.0 - m.p, n); },
                 [n](const severity::Degenerate& m) { return n == m.c ? 1.0 : 0.0; },
                 [n](const severity::CustomPmf& m) {
                   return static_cast<std::size_t>(n) < m.pmf.size()
                              ? m.pmf[static_cast<std::size_t>(n)]
                              : 0.0;
                 },
                 [](const auto&) { return 0.0; }},
      model.kind());
}

Eigen::VectorXd severity_pmf_table(const SeverityModel& model, int n_max) {
  Eigen::VectorXd table(n_max + 1);
  for (int n = 0; n <= n_max; ++n) table[n] = severity_pmf(model, n);
  return table;
}

template <typename Scalar>
std::complex<Scalar> severity_pgf_deriv(const SeverityModel& model, int j,
                                        std::complex<Scalar> z) {
  using C = std::complex<Scalar>;
  if (j < 0) throw DomainError("severity_pgf_deriv: order must be >= 0");
  if (!model.is_discrete()) throw DomainError("severity_pgf_deriv: model is not discrete");
  check_disk(z);
  const C one(1);
  return std::visit(
      Overloaded{
          [&](const severity::Poisson& m) -> C {
            const Scalar gamma(m.gamma);
            return std::pow(gamma, Scalar(j)) * std::exp(gamma * (z - one));
          },
          [&](const severity::Geometric& m) -> C {
            const Scalar p(m.p), q = Scalar(1) - Scalar(m.p);
            return Scalar(factorial(j)) * std::pow(q, Scalar(j)) * p /
                   ipow(one - q * z, j + 1);
          },
          [&](const severity::Degenerate& m) -> C {
            const int c = static_cast<int>(m.c);
            if (j > c) return C(0);
            return falling(Scalar(c), j) * ipow(z, c - j);
          },
          [&](const severity::CustomPmf& m) -> C {
            certify_table(m.pmf, model.missing_mass(), j, "custom severity");
            return table_pgf_deriv(m.pmf, j, z);
          },
          [](const auto&) -> C { return C(0); }},
      model.kind());
}

template std::complex<double> severity_pgf_deriv(const SeverityModel&, int, std::complex<double>);
template std::complex<long double> severity_pgf_deriv(const SeverityModel&, int,
                                                      std::complex<long double>);

namespace {

constexpr std::complex<double> kI(0.0, 1.0);

std::complex<double> central_difference(const std::function<std::complex<double>(double)>& f,
                                        int k, double u) {
  if (k == 0) return f(u);
  const double h = std::pow(kEps, 1.0 / (4.0 + k)) * std::max(1.0, std::abs(u));
  if (k == 1) {
    return (-f(u + 2 * h) + 8.0 * f(u + h) - 8.0 * f(u - h) + f(u - 2 * h)) / (12.0 * h);
  }
  return (-f(u + 2 * h) + 16.0 * f(u + h) - 30.0 * f(u) + 16.0 * f(u - h) - f(u - 2 * h)) /
         (12.0 * h * h);
}

}  // namespace

std::complex<double> severity_cf(const SeverityModel& model, double u) {
  return severity_cf_deriv(model, 0, u);
}

std::complex<double> severity_cf_deriv(const SeverityModel& model, int k, double u) {
  using C = std::complex<double>;
  if (k < 0) throw DomainError("severity_cf_deriv: order must be >= 0");
  return std::visit(
      Overloaded{
          [&](const severity::Exponential& m) -> C {
            return factorial(k) * std::pow(kI, k) * m.rate / std::pow(C(m.rate, -u), k + 1);
          },
          [&](const severity::Gamma& m) -> C {
            return rising(m.shape, k) * std::pow(kI / m.rate, k) *
                   std::pow(C(1.0, -u / m.rate), -(m.shape + k));
          },
          [&](const severity::Degenerate& m) -> C {
            return std::pow(kI * m.c, k) * std::exp(kI * (m.c * u));
          },
          [&](const severity::CustomCf& m) -> C {
            if (m.derivative) return m.derivative(k, u);
            if (k > 2) {
              throw MomentError("custom cf: no derivative provider and order " +
                                std::to_string(k) + " exceeds the finite-difference range");
            }
            return central_difference(m.cf, k, u);
          },
          [&](const auto&) -> C {
            // d^k/du^k G(e^{iu}) = i^k E[X^k z^X] = i^k sum_j {k, j} z^j G^{(j)}(z)
            const C z = std::exp(kI * u);
            if (k == 0) return severity_pgf_deriv(model, 0, z);
            const auto s = stirling2_row<double>(k);
            C sum(0.0);
            for (int j = 1; j <= k; ++j) sum += s[j] * std::pow(z, j) * severity_pgf_deriv(model, j, z);
            return std::pow(kI, k) * sum;
          }},
      model.kind());
}

bool severity_cf_deriv_is_exact(const SeverityModel& model, int k) {
  if (const auto* c = std::get_if<severity::CustomCf>(&model.kind())) {
    return k == 0 || static_cast<bool>(c->derivative);
  }
  return true;
}

double severity_moment(const SeverityModel& model, int k) {
  if (k < 0) throw DomainError("severity_moment: order must be >= 0");
  if (k == 0) return 1.0;
  return std::visit(
      Overloaded{
          [&](const severity::Exponential& m) { return factorial(k) / std::pow(m.rate, k); },
          [&](const severity::Gamma& m) { return rising(m.shape, k) / std::pow(m.rate, k); },
          [&](const severity::Degenerate& m) { return std::pow(m.c, k); },
          [&](const severity::CustomCf&) {
            return (severity_cf_deriv(model, k, 0.0) / std::pow(kI, k)).real();
          },
          [&](const severity::CustomPmf& m) {
            certify_table(m.pmf, model.missing_mass(), k, "custom severity");
            double sum = 0.0;
            for (std::size_t n = 0; n < m.pmf.size(); ++n) {
              sum += std::pow(static_cast<double>(n), k) * m.pmf[n];
            }
            return sum;
          },
          [&](const auto&) {
            const auto s = stirling2_row<double>(k);
            double sum = 0.0;
            for (int j = 1; j <= k; ++j) {
              sum += s[j] * severity_pgf_deriv(model, j, std::complex<double>(1.0)).real();
            }
            return sum;
          }},
      model.kind());
}

std::optional<double> severity_cf_decay_exponent(const SeverityModel& model) {
  return std::visit(Overloaded{[](const severity::Exponential&) -> std::optional<double> { return 1.0; },
                               [](const severity::Gamma& m) -> std::optional<double> { return m.shape; },
                               [](const severity::CustomCf& m) { return m.decay_exponent; },
                               [](const auto&) -> std::optional<double> { return std::nullopt; }},
                    model.kind());
}

}  // namespace rsum
