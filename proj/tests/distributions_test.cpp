// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/distributions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "rsum/errors.hpp"

namespace {

using rsum::CountModel;
using rsum::SeverityModel;
using C = std::complex<double>;

double rel(C a, C b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

using CL = std::complex<long double>;

// (n)_j q_n z^{n-j} summed directly in extended precision. `scale` receives
// the sum of term magnitudes.
C series_deriv(const std::vector<long double>& pmf, int j, C z, double* scale = nullptr) {
  const CL zl(z.real(), z.imag());
  CL sum(0.0L);
  long double abs_sum = 0.0L;
  for (int n = static_cast<int>(pmf.size()) - 1; n >= j; --n) {
    long double ff = 1.0L;
    for (int i = 0; i < j; ++i) ff *= n - i;
    sum += ff * pmf[n] * std::pow(zl, n - j);
    abs_sum += ff * pmf[n] * std::pow(std::abs(zl), static_cast<long double>(n - j));
  }
  if (scale) *scale = static_cast<double>(abs_sum);
  return C(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
}

// pmf tables by their ratio recurrences in extended precision
std::vector<long double> poisson_pmf(double lambda, int n_max) {
  std::vector<long double> p(n_max + 1);
  p[0] = std::exp(-static_cast<long double>(lambda));
  for (int n = 1; n <= n_max; ++n) p[n] = p[n - 1] * lambda / n;
  return p;
}

std::vector<long double> negbin_pmf(double r, double p, int n_max) {
  std::vector<long double> out(n_max + 1);
  out[0] = std::pow(static_cast<long double>(p), static_cast<long double>(r));
  for (int n = 1; n <= n_max; ++n) out[n] = out[n - 1] * (n - 1 + static_cast<long double>(r)) / n * (1.0L - p);
  return out;
}

std::vector<long double> binomial_pmf(int m, double p) {
  std::vector<long double> out(m + 1);
  const long double pl = p, ql = 1.0L - pl;
  out[0] = std::pow(ql, static_cast<long double>(m));
  for (int n = 1; n <= m; ++n) out[n] = out[n - 1] * (m - n + 1) / n * pl / ql;
  return out;
}

std::vector<C> disk_points(int count, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> r(0.0, 1.0), a(-M_PI, M_PI);
  std::vector<C> pts;
  for (int i = 0; i < count; ++i) pts.push_back(std::polar(std::sqrt(r(gen)), a(gen)));
  pts.push_back(C(1.0, 0.0));
  pts.push_back(C(-1.0, 0.0));
  return pts;
}

TEST(CountPmf, PoissonAtZero) { EXPECT_DOUBLE_EQ(rsum::count_pmf(CountModel::poisson(1.0), 0), std::exp(-1.0)); }

TEST(CountPmf, PointMassCustom) {
  const CountModel m = CountModel::custom({0.0, 1.0});
  EXPECT_EQ(rsum::count_pmf(m, 1), 1.0);
  EXPECT_EQ(rsum::count_pmf(m, 0), 0.0);
  EXPECT_EQ(rsum::count_pmf(m, 7), 0.0);
}

TEST(CountPmf, MixedPoissonGammaAtZero) {
  const CountModel m = CountModel::mixed_poisson_gamma(7.0, 1.0, 1.0);
  EXPECT_NEAR(rsum::count_pmf(m, 0), std::pow(0.5, 7), 1e-16);
}

TEST(CountPmf, MixedPoissonGammaIsNegativeBinomial) {
  // integrating Poisson(theta Lambda) against Gamma(alpha, beta) gives
  // NegBin(alpha, beta / (beta + Lambda))
  const double alpha = 2.5, beta = 0.7, lam = 3.2;
  const CountModel m = CountModel::mixed_poisson_gamma(alpha, beta, lam);
  const auto ref = negbin_pmf(alpha, beta / (beta + lam), 60);
  for (int n = 0; n <= 60; ++n) EXPECT_NEAR(rsum::count_pmf(m, n), ref[n], 1e-14 + 1e-12 * ref[n]);
}

TEST(CountPmf, BuiltinsMatchClosedForms) {
  const auto pois = poisson_pmf(4.5, 80);
  const auto nb = negbin_pmf(3.0, 0.35, 80);
  const auto bin = binomial_pmf(17, 0.3);
  for (int n = 0; n <= 80; ++n) {
    EXPECT_NEAR(rsum::count_pmf(CountModel::poisson(4.5), n), pois[n], 1e-12 * pois[n] + 1e-300);
    EXPECT_NEAR(rsum::count_pmf(CountModel::negative_binomial(3.0, 0.35), n), nb[n], 1e-12 * nb[n]);
    const double b = n <= 17 ? bin[n] : 0.0;
    EXPECT_NEAR(rsum::count_pmf(CountModel::binomial(17, 0.3), n), b, 1e-12 * b);
  }
}

TEST(Panjer, ParametersPresentExactlyForTheClass) {
  EXPECT_TRUE(CountModel::poisson(2.0).panjer_params().has_value());
  EXPECT_TRUE(CountModel::negative_binomial(2.0, 0.4).panjer_params().has_value());
  EXPECT_TRUE(CountModel::binomial(5, 0.4).panjer_params().has_value());
  EXPECT_FALSE(CountModel::mixed_poisson_gamma(2.0, 1.0, 1.0).panjer_params().has_value());
  EXPECT_FALSE(CountModel::custom({0.5, 0.5}).panjer_params().has_value());
  const auto p = CountModel::poisson(3.0).panjer_params();
  EXPECT_EQ(p->a, 0.0);
  EXPECT_EQ(p->b, 3.0);
}

TEST(Panjer, RatioIdentity) {
  for (const CountModel& m : {CountModel::poisson(37.0), CountModel::negative_binomial(4.2, 0.2),
                              CountModel::negative_binomial(0.5, 0.7), CountModel::binomial(250, 0.3)}) {
    const auto ab = m.panjer_params();
    ASSERT_TRUE(ab);
    EXPECT_GE(ab->a + ab->b, 0.0);
    EXPECT_LT(ab->a, 1.0);
    for (int n = 1; n <= 200; ++n) {
      const double prev = rsum::count_pmf(m, n - 1);
      const double cur = rsum::count_pmf(m, n);
      if (prev < 1e-290 || cur < 1e-290) continue;
      const double expected = ab->a + ab->b / n;
      EXPECT_NEAR(cur / prev, expected, 1e-12 * std::abs(expected)) << m.describe() << " n=" << n;
    }
  }
}

TEST(CountPgf, Normalization) {
  for (const CountModel& m :
       {CountModel::poisson(2.0), CountModel::negative_binomial(2.0, 0.4), CountModel::binomial(9, 0.4),
        CountModel::mixed_poisson_gamma(7.0, 1.0, 1.0), CountModel::custom({0.2, 0.3, 0.5})}) {
    EXPECT_NEAR(std::abs(rsum::count_pgf_deriv(m, 0, C(1.0)) - 1.0), 0.0, 1e-12) << m.describe();
  }
}

TEST(CountPgf, PoissonMean) {
  EXPECT_NEAR(rsum::count_pgf_deriv(CountModel::poisson(2.0), 1, C(1.0)).real(), 2.0, 1e-15);
}

TEST(CountPgf, MixedPoissonGammaDerivative) {
  // d/dz (1 / (1 + t (1 - z)))^7 = 7 t / (1 + t (1 - z))^8 for beta = 1
  for (double t : {1.0, 2.5}) {
    const CountModel m = CountModel::mixed_poisson_gamma(7.0, 1.0, t);
    for (double z : {-0.8, 0.0, 0.3, 0.9, 1.0}) {
      const double expected = 7.0 * t / std::pow(1.0 + t * (1.0 - z), 8);
      EXPECT_NEAR(rsum::count_pgf_deriv(m, 1, C(z)).real(), expected, 1e-13 * expected);
      EXPECT_NEAR(rsum::count_pgf_deriv(m, 0, C(z)).real(), std::pow(1.0 + t * (1.0 - z), -7), 1e-14);
    }
  }
}

TEST(CountPgf, ClosedFormsMatchTruncatedSeries) {
  struct Case {
    CountModel model;
    std::vector<long double> pmf;
  };
  std::vector<Case> cases = {
      {CountModel::poisson(6.0), poisson_pmf(6.0, 150)},
      {CountModel::negative_binomial(2.5, 0.45), negbin_pmf(2.5, 0.45, 300)},
      {CountModel::binomial(30, 0.35), binomial_pmf(30, 0.35)},
      {CountModel::mixed_poisson_gamma(3.0, 2.0, 1.5), negbin_pmf(3.0, 2.0 / 3.5, 300)},
  };
  for (const auto& c : cases) {
    for (const C z : disk_points(20, 7)) {
      for (int j = 0; j <= 3; ++j) {
        const C closed = rsum::count_pgf_deriv(c.model, j, z);
        // the direct sum cancels heavily where |G| is tiny (binomial near
        // z = -(1-p)/p); measure relative to the sum of term magnitudes there
        double scale = 0.0;
        const C series = series_deriv(c.pmf, j, z, &scale);
        const double denom = std::max(std::abs(series), 1e-6 * scale);
        EXPECT_LT(std::abs(closed - series) / denom, 1e-10)
            << c.model.describe() << " j=" << j << " z=" << z;
      }
    }
  }
}

TEST(CountPgf, DerivativeAtOneIsFactorialMoment) {
  const std::vector<std::pair<CountModel, std::vector<long double>>> cases = {
      {CountModel::poisson(6.0), poisson_pmf(6.0, 150)},
      {CountModel::negative_binomial(2.5, 0.45), negbin_pmf(2.5, 0.45, 400)},
      {CountModel::binomial(30, 0.35), binomial_pmf(30, 0.35)},
  };
  for (const auto& [model, pmf] : cases) {
    for (int j = 1; j <= 4; ++j) {
      double direct = 0.0;
      for (int n = j; n < static_cast<int>(pmf.size()); ++n) {
        double ff = 1.0;
        for (int i = 0; i < j; ++i) ff *= n - i;
        direct += ff * pmf[n];
      }
      EXPECT_NEAR(rsum::count_pgf_deriv(model, j, C(1.0)).real(), direct, 1e-8 * direct);
      EXPECT_NEAR(rsum::count_factorial_moment(model, j), direct, 1e-8 * direct);
    }
  }
}

TEST(CountPgf, LongDoubleAgrees) {
  const CountModel m = CountModel::negative_binomial(2.0, 0.3);
  const std::complex<long double> zl(0.3L, -0.4L);
  const auto vl = rsum::count_pgf_deriv(m, 2, zl);
  const auto vd = rsum::count_pgf_deriv(m, 2, C(0.3, -0.4));
  EXPECT_LT(rel(C(double(vl.real()), double(vl.imag())), vd), 1e-14);
}

TEST(CountPgf, OutsideDiskRejected) {
  EXPECT_THROW(rsum::count_pgf_deriv(CountModel::poisson(1.0), 0, C(1.5, 0.0)), rsum::DomainError);
}

TEST(CountMoment, Poisson) {
  EXPECT_NEAR(rsum::count_moment(CountModel::poisson(3.0), 1), 3.0, 1e-14);
  EXPECT_NEAR(rsum::count_moment(CountModel::poisson(3.0), 2), 12.0, 1e-13);
  EXPECT_NEAR(rsum::count_moment(CountModel::poisson(3.0), 3), 27.0 + 27.0 + 3.0, 1e-12);
  EXPECT_EQ(rsum::count_moment(CountModel::poisson(3.0), 0), 1.0);
}

TEST(CountMoment, AgreesWithTruncatedSum) {
  const auto pmf = negbin_pmf(1.7, 0.3, 600);
  for (int k = 1; k <= 3; ++k) {
    double direct = 0.0;
    for (int n = 0; n <= 600; ++n) direct += std::pow(n, k) * pmf[n];
    EXPECT_NEAR(rsum::count_moment(CountModel::negative_binomial(1.7, 0.3), k), direct, 1e-10 * direct);
  }
}

TEST(CustomCount, Validation) {
  EXPECT_THROW(CountModel::custom({}), rsum::DomainError);
  EXPECT_THROW(CountModel::custom({0.5, -0.1, 0.6}), rsum::DomainError);
  EXPECT_THROW(CountModel::custom({0.5, 0.3}), rsum::DomainError);
  EXPECT_THROW(CountModel::custom({0.7, 0.7}), rsum::DomainError);
  EXPECT_NO_THROW(CountModel::custom({0.5, 0.3}, 0.25));
}

TEST(CustomCount, UncertifiedTailIsAnError) {
  const CountModel m = CountModel::custom({0.5, 0.3}, 0.25);
  EXPECT_NEAR(m.missing_mass(), 0.2, 1e-15);
  EXPECT_NO_THROW(rsum::count_pgf_deriv(m, 0, C(0.5)));
  EXPECT_THROW(rsum::count_pgf_deriv(m, 1, C(0.5)), rsum::MomentError);
  EXPECT_THROW(rsum::count_moment(m, 1), rsum::MomentError);
}

TEST(CustomCount, Moments) {
  const CountModel m = CountModel::custom({1.0 / 3, 1.0 / 3, 1.0 / 3});
  EXPECT_NEAR(rsum::count_moment(m, 1), 1.0, 1e-15);
  EXPECT_NEAR(rsum::count_moment(m, 2), 5.0 / 3, 1e-15);
}

TEST(ModelValidation, RejectsBadParameters) {
  EXPECT_THROW(CountModel::poisson(0.0), rsum::DomainError);
  EXPECT_THROW(CountModel::poisson(std::nan("")), rsum::DomainError);
  EXPECT_THROW(CountModel::negative_binomial(1.0, 1.0), rsum::DomainError);
  EXPECT_THROW(CountModel::binomial(-1, 0.5), rsum::DomainError);
  EXPECT_THROW(CountModel::mixed_poisson_gamma(1.0, 0.0, 1.0), rsum::DomainError);
  EXPECT_THROW(SeverityModel::geometric(0.0), rsum::DomainError);
  EXPECT_THROW(SeverityModel::exponential(-2.0), rsum::DomainError);
  EXPECT_THROW(SeverityModel::degenerate(-1.0), rsum::DomainError);
}

TEST(SeverityPgf, Geometric) {
  const double p = 0.35;
  const SeverityModel m = SeverityModel::geometric(p);
  for (const C z : disk_points(10, 3)) {
    EXPECT_LT(rel(rsum::severity_pgf_deriv(m, 0, z), p / (1.0 - (1.0 - p) * z)), 1e-14);
  }
}

TEST(SeverityPgf, DegenerateAndPoisson) {
  EXPECT_NEAR(std::abs(rsum::severity_pgf_deriv(SeverityModel::degenerate(1.0), 1, C(0.3, 0.2)) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(rsum::severity_pgf_deriv(SeverityModel::poisson(4.0), 1, C(1.0)).real(), 4.0, 1e-14);
}

TEST(SeverityPgf, ClosedFormsMatchSeries) {
  const double p = 0.3;
  std::vector<long double> geo(400);
  for (int n = 0; n < 400; ++n) geo[n] = p * std::pow(1 - p, n);
  for (const C z : disk_points(20, 11)) {
    for (int j = 0; j <= 3; ++j) {
      EXPECT_LT(rel(rsum::severity_pgf_deriv(SeverityModel::geometric(p), j, z), series_deriv(geo, j, z)), 1e-10);
      EXPECT_LT(rel(rsum::severity_pgf_deriv(SeverityModel::poisson(5.0), j, z),
                    series_deriv(poisson_pmf(5.0, 120), j, z)),
                1e-10);
    }
  }
}

TEST(SeverityPmf, Tables) {
  EXPECT_NEAR(rsum::severity_pmf(SeverityModel::geometric(0.25), 2), 0.25 * 0.75 * 0.75, 1e-16);
  EXPECT_EQ(rsum::severity_pmf(SeverityModel::degenerate(3.0), 3), 1.0);
  EXPECT_EQ(rsum::severity_pmf(SeverityModel::degenerate(3.0), 2), 0.0);
  EXPECT_THROW(rsum::severity_pmf(SeverityModel::exponential(1.0), 0), rsum::DomainError);
  const auto t = rsum::severity_pmf_table(SeverityModel::poisson(2.0), 5);
  EXPECT_EQ(t.size(), 6);
  EXPECT_NEAR(t[1], 2.0 * std::exp(-2.0), 1e-16);
}

TEST(SeverityKinds, DiscreteVersusContinuous) {
  EXPECT_TRUE(SeverityModel::degenerate(2.0).is_discrete());
  EXPECT_FALSE(SeverityModel::degenerate(2.5).is_discrete());
  EXPECT_TRUE(SeverityModel::exponential(1.0).is_continuous());
  EXPECT_FALSE(SeverityModel::exponential(1.0).is_discrete());
}

TEST(SeverityCf, ExponentialDerivatives) {
  const SeverityModel e = SeverityModel::exponential(2.0);
  EXPECT_NEAR(std::abs(rsum::severity_cf_deriv(e, 0, 0.0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(rsum::severity_cf_deriv(e, 1, 0.0) - C(0.0, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(rsum::severity_cf_deriv(SeverityModel::gamma(2.0, 1.0), 1, 0.0) - C(0.0, 2.0)), 0.0, 1e-14);
  // phi^{(k)}(0) = i^k E[X^k]
  EXPECT_NEAR(std::abs(rsum::severity_cf_deriv(e, 2, 0.0) - C(-0.5, 0.0)), 0.0, 1e-14);
}

TEST(SeverityCf, DerivativeMatchesFiniteDifference) {
  for (const SeverityModel& m : {SeverityModel::exponential(1.3), SeverityModel::gamma(2.5, 0.8)}) {
    for (double u : {-2.0, 0.3, 1.7}) {
      const double h = 1e-5;
      const C fd = (rsum::severity_cf(m, u + h) - rsum::severity_cf(m, u - h)) / (2 * h);
      EXPECT_LT(std::abs(rsum::severity_cf_deriv(m, 1, u) - fd), 1e-8);
    }
  }
}

TEST(SeverityCf, ConjugateSymmetryAndBound) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> d(0.0, 50.0);
  for (const SeverityModel& m : {SeverityModel::exponential(0.7), SeverityModel::gamma(3.0, 2.0),
                                 SeverityModel::poisson(3.0), SeverityModel::geometric(0.4)}) {
    EXPECT_NEAR(std::abs(rsum::severity_cf(m, 0.0) - 1.0), 0.0, 1e-15);
    for (int i = 0; i < 20; ++i) {
      const double u = d(gen);
      EXPECT_LT(std::abs(rsum::severity_cf(m, -u) - std::conj(rsum::severity_cf(m, u))), 1e-14);
      EXPECT_LE(std::abs(rsum::severity_cf(m, u)), 1.0 + 1e-15);
    }
  }
}

TEST(SeverityCf, CustomWithoutDerivativeIsApproximate) {
  rsum::severity::CustomCf spec;
  spec.cf = [](double u) { return C(1.0) / C(1.0, -u); };
  spec.decay_exponent = 1.0;
  const SeverityModel m = SeverityModel::custom_cf(spec);
  EXPECT_TRUE(rsum::severity_cf_deriv_is_exact(m, 0));
  EXPECT_FALSE(rsum::severity_cf_deriv_is_exact(m, 1));
  EXPECT_LT(std::abs(rsum::severity_cf_deriv(m, 1, 0.4) - C(0.0, 1.0) / std::pow(C(1.0, -0.4), 2)), 1e-7);
  EXPECT_TRUE(rsum::severity_cf_deriv_is_exact(SeverityModel::exponential(1.0), 3));
}

TEST(SeverityMoment, Values) {
  EXPECT_NEAR(rsum::severity_moment(SeverityModel::geometric(0.25), 1), 3.0, 1e-14);
  EXPECT_NEAR(rsum::severity_moment(SeverityModel::poisson(2.0), 2), 6.0, 1e-14);
  EXPECT_NEAR(rsum::severity_moment(SeverityModel::exponential(2.0), 2), 0.5, 1e-15);
  EXPECT_NEAR(rsum::severity_moment(SeverityModel::gamma(2.0, 1.0), 1), 2.0, 1e-15);
  EXPECT_NEAR(rsum::severity_moment(SeverityModel::degenerate(3.0), 2), 9.0, 1e-15);
  EXPECT_NEAR(rsum::severity_moment(SeverityModel::custom_pmf({0.5, 0.0, 0.5}), 2), 2.0, 1e-15);
}

TEST(SeverityDecay, KnownForBuiltins) {
  EXPECT_EQ(rsum::severity_cf_decay_exponent(SeverityModel::exponential(1.0)).value(), 1.0);
  EXPECT_EQ(rsum::severity_cf_decay_exponent(SeverityModel::gamma(2.5, 1.0)).value(), 2.5);
}

}  // namespace
