// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rsum/errors.hpp"
#include "rsum/panjer.hpp"

namespace {

using rsum::CountModel;
using rsum::EnumerationTarget;
using rsum::McConfig;
using rsum::McModel;
using rsum::McTarget;
using rsum::SeverityModel;

McModel random_sum(const CountModel& c, const SeverityModel& s, int k) {
  McModel m;
  m.count = c;
  m.severity = s;
  m.k = k;
  return m;
}

TEST(Enumeration, DegenerateSeverity) {
  const auto count = CountModel::poisson(3.0);
  for (int k : {0, 1, 3}) {
    const auto r = rsum::enumerate_restricted(count, SeverityModel::degenerate(1.0), k, 40, std::nullopt,
                                              EnumerationTarget::count_moment);
    ASSERT_EQ(r.values.size(), 41u);
    EXPECT_TRUE(r.exact);
    for (int l = 0; l <= 40; ++l) {
      const double q = std::exp(-3.0 + l * std::log(3.0) - std::lgamma(l + 1.0));
      EXPECT_NEAR(r.values[l], std::pow(l, k) * q, 1e-13 * std::max(1.0, std::pow(l, k) * q)) << k << " " << l;
    }
  }
  // X = 2: chi_k(l) = 2^k P(S_N = l), atom included
  const auto chi = rsum::enumerate_restricted(count, SeverityModel::degenerate(2.0), 2, 20, std::nullopt,
                                              EnumerationTarget::component_moment);
  const auto pmf = rsum::aggregate_pmf(count, SeverityModel::degenerate(2.0), 20);
  for (int l = 0; l <= 20; ++l) EXPECT_NEAR(chi.values[l], 4.0 * pmf.values[l], 1e-14) << l;
}

TEST(Enumeration, MatchesRecursion) {
  const auto count = CountModel::poisson(0.7);
  const auto sev = SeverityModel::geometric(0.4);
  const auto rec = rsum::restricted_count_moments(count, sev, 2, 60);
  for (int k = 0; k <= 2; ++k) {
    const auto r = rsum::enumerate_restricted(count, sev, k, 60, std::nullopt, EnumerationTarget::count_moment);
    ASSERT_TRUE(r.certificate);
    EXPECT_LT(r.certificate->count_tail, rsum::kEnumerationTailTolerance);
    for (int l = 0; l <= 60; ++l) EXPECT_NEAR(r.values[l], rec[k].values[l], 1e-12) << k << " " << l;
  }
  const auto plus = rsum::restricted_component_moment_plus(count, sev, 2, 60);
  const auto r = rsum::enumerate_restricted(count, sev, 2, 60, std::nullopt,
                                            EnumerationTarget::component_moment_plus);
  for (int l = 0; l <= 60; ++l) EXPECT_NEAR(r.values[l], plus.values[l], 1e-12) << l;
}

TEST(Enumeration, MassBalance) {
  const auto count = CountModel::negative_binomial(2.0, 0.4);
  const auto sev = SeverityModel::poisson(1.5);
  const int L = 400;
  const auto r = rsum::enumerate_restricted(count, sev, 0, L, std::nullopt, EnumerationTarget::count_moment);
  const auto pmf = rsum::aggregate_pmf(count, sev, L);
  double total = 0.0;
  for (int l = 0; l <= L; ++l) {
    EXPECT_NEAR(r.values[l], pmf.values[l], 1e-12) << l;
    total += r.values[l];
  }
  // P(S_N > L) is negligible here, so the enumerated mass is 1 - count tail
  EXPECT_NEAR(total, 1.0 - r.certificate->count_tail, 1e-12);
}

TEST(Enumeration, CertificationFailures) {
  const auto sev = SeverityModel::geometric(0.4);
  EXPECT_THROW(rsum::enumerate_restricted(CountModel::poisson(20.0), sev, 1, 10, 5,
                                          EnumerationTarget::count_moment),
               rsum::CertificationError);
  EXPECT_THROW(rsum::certify_count_tail(CountModel::negative_binomial(2.0, 1e-6), 0, 1e-14),
               rsum::CertificationError);
  EXPECT_THROW(rsum::enumerate_restricted(CountModel::poisson(2.0), SeverityModel::exponential(1.0), 1,
                                          10, std::nullopt, EnumerationTarget::count_moment),
               rsum::DomainError);
}

TEST(Certificate, BoundsTheTail) {
  for (const auto& c : {CountModel::poisson(20.0), CountModel::negative_binomial(3.0, 0.2),
                        CountModel::binomial(40, 0.3)}) {
    for (int k : {0, 2}) {
      const auto cert = rsum::certify_count_tail(c, k, 1e-12);
      double tail = 0.0;
      for (int n = cert.n_max + 1; n <= cert.n_max + 5000; ++n) tail += std::pow(n, k) * rsum::count_pmf(c, n);
      EXPECT_LE(tail, cert.count_tail * (1 + 1e-9) + 1e-300) << c.describe() << " " << k;
      EXPECT_LT(cert.count_tail, 1e-12);
      if (cert.n_max > 0) {
        double tail_before = 0.0;
        for (int n = cert.n_max; n <= cert.n_max + 5000; ++n) tail_before += std::pow(n, k) * rsum::count_pmf(c, n);
        EXPECT_GT(tail_before, 0.0);
      }
    }
  }
}

TEST(MonteCarlo, Deterministic) {
  const auto model = random_sum(CountModel::poisson(2.0), SeverityModel::geometric(0.5), 1);
  McConfig cfg;
  cfg.samples = 200000;
  cfg.ell_max = 10;
  cfg.seed = 99;
  cfg.threads = 1;
  const auto a = rsum::mc_conditional(McTarget::random_sum_count, model, cfg);
  cfg.threads = 4;
  const auto b = rsum::mc_conditional(McTarget::random_sum_count, model, cfg);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.std_errors, b.std_errors);
  EXPECT_EQ(a.bin_counts, b.bin_counts);
  cfg.seed = 100;
  const auto c = rsum::mc_conditional(McTarget::random_sum_count, model, cfg);
  EXPECT_NE(a.values, c.values);
  EXPECT_EQ(a.seed, 99u);
  EXPECT_EQ(a.samples, 200000);
}

TEST(MonteCarlo, DegenerateSeverityIsExact) {
  const auto model = random_sum(CountModel::poisson(5.0), SeverityModel::degenerate(1.0), 1);
  McConfig cfg;
  cfg.samples = 100000;
  cfg.ell_max = 12;
  const auto r = rsum::mc_conditional(McTarget::random_sum_count, model, cfg);
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    ASSERT_FALSE(r.empty[i]);
    EXPECT_EQ(r.values[i], r.grid[i]);
    EXPECT_EQ(r.std_errors[i], 0.0);
  }
}

TEST(MonteCarlo, CoverageCalibration) {
  // Polya increment with Degenerate(1) claims: Z = N, so the target is the
  // closed form Lambda(t, t+s] / (Lambda(t) + beta) (alpha + l) = 0.5 (2 + l)
  rsum::PolyaSpec spec;
  spec.alpha = 2.0;
  spec.beta = 1.0;
  spec.severity = SeverityModel::degenerate(1.0);
  McModel model;
  model.polya = spec;
  const double truth = 0.5 * (2.0 + 2.0);
  int within3 = 0, within1 = 0;
  for (int rep = 0; rep < 100; ++rep) {
    McConfig cfg;
    cfg.samples = 20000;
    cfg.ell_max = 2;
    cfg.probes = {2};
    cfg.seed = 1000 + rep;
    cfg.substreams = 4;
    const auto r = rsum::mc_conditional(McTarget::polya_increment, model, cfg);
    const double z = std::abs(r.values[0] - truth) / r.std_errors[0];
    within3 += z < 3.0;
    within1 += z < 1.0;
  }
  EXPECT_GE(within3, 99);
  EXPECT_GE(within1, 55);
  EXPECT_LE(within1, 82);
}

TEST(MonteCarlo, MatchesRecursion) {
  const auto count = CountModel::poisson(20.0);
  const auto sev = SeverityModel::poisson(10.0);
  const auto rec = rsum::restricted_count_moments(count, sev, 1, 260);
  const auto curve = rsum::to_prediction_curve(rec[1], rec[0]);
  McConfig cfg;
  cfg.samples = 10000000;
  cfg.ell_max = 260;
  cfg.probes = {100, 125, 150, 175, 200, 225, 250};
  const auto r = rsum::mc_conditional(McTarget::random_sum_count, random_sum(count, sev, 1), cfg);
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const int l = static_cast<int>(r.grid[i]);
    EXPECT_NEAR(r.values[i], curve.entries[l].value, 3 * r.std_errors[i]) << l;
  }
  cfg.estimator = rsum::McEstimator::conditional;
  cfg.samples = 1000000;
  const auto rc = rsum::mc_conditional(McTarget::random_sum_count, random_sum(count, sev, 1), cfg);
  for (std::size_t i = 0; i < rc.grid.size(); ++i) {
    const int l = static_cast<int>(rc.grid[i]);
    EXPECT_NEAR(rc.values[i], curve.entries[l].value, 3 * rc.std_errors[i]) << l;
    EXPECT_LT(rc.std_errors[i], r.std_errors[i]) << l;
  }
}

TEST(MonteCarlo, ComponentTarget) {
  const auto count = CountModel::poisson(3.0);
  const auto sev = SeverityModel::geometric(0.5);
  const auto chi = rsum::enumerate_restricted(count, sev, 1, 12, std::nullopt, EnumerationTarget::component_moment);
  const auto pmf = rsum::aggregate_pmf(count, sev, 12);
  McConfig cfg;
  cfg.samples = 1000000;
  cfg.ell_max = 12;
  const auto r = rsum::mc_conditional(McTarget::random_sum_component, random_sum(count, sev, 1), cfg);
  for (int l = 0; l <= 12; ++l) {
    EXPECT_NEAR(r.values[l], chi.values[l] / pmf.values[l], 3 * r.std_errors[l] + 1e-12) << l;
  }
}

TEST(MonteCarlo, ConfigErrors) {
  const auto model = random_sum(CountModel::poisson(2.0), SeverityModel::geometric(0.5), 1);
  McConfig cfg;
  cfg.samples = 9999;
  EXPECT_THROW(rsum::mc_conditional(McTarget::random_sum_count, model, cfg), rsum::DomainError);
  cfg.samples = 10000;
  cfg.probes = {cfg.ell_max + 1};
  EXPECT_THROW(rsum::mc_conditional(McTarget::random_sum_count, model, cfg), rsum::DomainError);
  cfg.probes.clear();
  EXPECT_THROW(rsum::mc_conditional(McTarget::shotnoise_count, model, cfg), rsum::DomainError);
  cfg.estimator = rsum::McEstimator::conditional;
  EXPECT_THROW(rsum::mc_conditional(McTarget::random_sum_component, model, cfg), rsum::DomainError);
  const auto cont = random_sum(CountModel::poisson(2.0), SeverityModel::exponential(1.0), 1);
  cfg.estimator = rsum::McEstimator::binned;
  EXPECT_THROW(rsum::mc_conditional(McTarget::random_sum_count, cont, cfg), rsum::DomainError);
}

TEST(MonteCarlo, TargetNames) {
  for (McTarget t : {McTarget::random_sum_count, McTarget::random_sum_component, McTarget::shotnoise_count,
                     McTarget::shotnoise_increment, McTarget::polya_count, McTarget::polya_increment}) {
    EXPECT_EQ(rsum::mc_target_from_string(rsum::to_string(t)), t);
  }
  EXPECT_THROW(rsum::mc_target_from_string("nope"), rsum::DomainError);
}

TEST(ContinuousOracle, SingleClaim) {
  const auto one = CountModel::custom({0.0, 1.0});
  const auto r = rsum::continuous_oracle(one, SeverityModel::exponential(1.0), 0, {std::log(2.0), 1.0},
                                         400000, 5);
  EXPECT_NEAR(r.count.values[0], 0.5, 3 * r.count.std_errors[0]);
  EXPECT_NEAR(r.count.values[1], 1.0 - std::exp(-1.0), 3 * r.count.std_errors[1]);
  EXPECT_EQ(r.count.values, r.component.values);
}

TEST(ContinuousOracle, LargeThreshold) {
  const auto r = rsum::continuous_oracle(CountModel::poisson(2.0), SeverityModel::exponential(1.0), 1,
                                         {1000.0}, 200000, 11);
  EXPECT_NEAR(r.count.values[0], 2.0, 3 * r.count.std_errors[0]);
  // E[X_1] = 1 whether or not N = 0
  EXPECT_NEAR(r.component.values[0], 1.0, 3 * r.component.std_errors[0]);
  EXPECT_THROW(rsum::continuous_oracle(CountModel::poisson(2.0), SeverityModel::exponential(1.0), 1, {1.0},
                                       1000),
               rsum::DomainError);
}

}  // namespace
