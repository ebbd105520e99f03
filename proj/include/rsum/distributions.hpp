// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

// Count and severity models for random sums S_N = X_1 + ... + X_N.
//
// Each model exposes exactly what the recursion and transform engines need:
// pmf values, generating-function derivatives on the closed unit disk,
// characteristic functions and raw moments. Generating functions are
// templated on the scalar type so the unit-circle inversion can run in
// extended precision.

#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rsum {

// Truncated series stop once the remaining mass falls below this fraction.
inline constexpr double kDefaultTailTolerance = 1e-14;

// q_n = (a + b / n) q_{n-1} for n >= 1.
struct PanjerParams {
  double a = 0.0;
  double b = 0.0;
};

namespace count {

struct Poisson {
  double lambda;
};

// pmf C(n + r - 1, n) p^r (1 - p)^n; p is the success probability.
struct NegativeBinomial {
  double r;
  double p;
};

struct Binomial {
  int n;
  double p;
};

// N = Poisson(theta * Lambda) with theta ~ Gamma(alpha, rate beta). The model
// is the marginal at one horizon, so it stores the cumulative intensity
// Lambda(t) already evaluated.
struct MixedPoissonGamma {
  double alpha;
  double beta;
  double intensity;
};

// Explicit table over [0, n_max]; mass beyond the table is treated as
// unknown and must stay within tail_tolerance.
struct CustomPmf {
  std::vector<double> pmf;
  double tail_tolerance;
};

}  // namespace count

class CountModel {
 public:
  using Kind = std::variant<count::Poisson, count::NegativeBinomial, count::Binomial,
                            count::MixedPoissonGamma, count::CustomPmf>;

  static CountModel poisson(double lambda);
  static CountModel negative_binomial(double r, double p);
  static CountModel binomial(int n, double p);
  static CountModel mixed_poisson_gamma(double alpha, double beta, double cumulative_intensity);
  static CountModel custom(std::vector<double> pmf,
                           double tail_tolerance = kDefaultTailTolerance);

  const Kind& kind() const { return kind_; }

  // Present exactly for Poisson, negative binomial and binomial.
  std::optional<PanjerParams> panjer_params() const;

  // 1 - sum of the table for custom models, 0 otherwise.
  double missing_mass() const;

  std::string describe() const;

 private:
  explicit CountModel(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

namespace severity {

struct Poisson {
  double gamma;
};

// pmf p q^k on {0, 1, 2, ...}, q = 1 - p.
struct Geometric {
  double p;
};

// Point mass at c. Discrete (usable by the recursions) when c is a
// nonnegative integer.
struct Degenerate {
  double c;
};

struct CustomPmf {
  std::vector<double> pmf;
  double tail_tolerance;
};

struct Exponential {
  double rate;
};

struct Gamma {
  double shape;
  double rate;
};

// A characteristic function supplied by the caller. Without a derivative
// provider, derivatives of order <= 2 fall back to central differences and
// are flagged approximate. decay_exponent p asserts |cf(u)| = O(|u|^-p); the
// continuous inversion needs it (or an explicit truncation) to pick its range.
struct CustomCf {
  std::function<std::complex<double>(double)> cf;
  std::function<std::complex<double>(int, double)> derivative;
  std::optional<double> decay_exponent;
};

}  // namespace severity

class SeverityModel {
 public:
  using Kind = std::variant<severity::Poisson, severity::Geometric, severity::Degenerate,
                            severity::CustomPmf, severity::Exponential, severity::Gamma,
                            severity::CustomCf>;

  static SeverityModel poisson(double gamma);
  static SeverityModel geometric(double p);
  static SeverityModel degenerate(double c);
  static SeverityModel custom_pmf(std::vector<double> pmf,
                                  double tail_tolerance = kDefaultTailTolerance);
  static SeverityModel exponential(double rate);
  static SeverityModel gamma(double shape, double rate);
  static SeverityModel custom_cf(severity::CustomCf cf);

  const Kind& kind() const { return kind_; }

  // Integer-valued on N_0 with a pmf.
  bool is_discrete() const;
  // Absolutely continuous on R_+ (Exponential, Gamma, custom cf).
  bool is_continuous() const;

  double missing_mass() const;

  std::string describe() const;

 private:
  explicit SeverityModel(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

// ---------------------------------------------------------------------------
// Count model operations

// P(N = n); zero beyond a custom table.
double count_pmf(const CountModel& model, int n);

// (P(N = 0), ..., P(N = n_max)).
Eigen::VectorXd count_pmf_table(const CountModel& model, int n_max);

// G_N^{(j)}(z) = sum_n n (n-1) ... (n-j+1) q_n z^{n-j} for |z| <= 1.
// Throws MomentError when a custom table cannot certify its tail for j >= 1.
template <typename Scalar>
std::complex<Scalar> count_pgf_deriv(const CountModel& model, int j, std::complex<Scalar> z);

// E[N^k] and E[(N)_j].
double count_moment(const CountModel& model, int k);
double count_factorial_moment(const CountModel& model, int j);

// ---------------------------------------------------------------------------
// Severity model operations

// P(X = n) for discrete models.
double severity_pmf(const SeverityModel& model, int n);
Eigen::VectorXd severity_pmf_table(const SeverityModel& model, int n_max);

// G_X^{(j)}(z) for discrete models, |z| <= 1.
template <typename Scalar>
std::complex<Scalar> severity_pgf_deriv(const SeverityModel& model, int j,
                                        std::complex<Scalar> z);

// phi_X(u) = E[exp(i u X)] for any model.
std::complex<double> severity_cf(const SeverityModel& model, double u);

// phi_X^{(k)}(u). Analytic for the built-in kinds; central differences for a
// custom cf without a derivative provider.
std::complex<double> severity_cf_deriv(const SeverityModel& model, int k, double u);

// False when severity_cf_deriv(model, k, .) is a finite-difference estimate.
bool severity_cf_deriv_is_exact(const SeverityModel& model, int k);

double severity_moment(const SeverityModel& model, int k);

// Polynomial decay exponent of |phi_X(u)| for continuous models, if known.
std::optional<double> severity_cf_decay_exponent(const SeverityModel& model);

}  // namespace rsum
