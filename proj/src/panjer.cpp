// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/panjer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsum/errors.hpp"
#include "rsum/stirling.hpp"
#include "rsum/transform.hpp"

namespace rsum {

namespace {

struct RecursionSetup {
  PanjerParams ab;
  Eigen::VectorXd p;  // severity pmf on [0, ell_max]
  double c0 = 0.0;    // a * P(X = 0)
  double inv = 1.0;   // 1 / (1 - c0)
};

RecursionSetup prepare(const CountModel& count, const SeverityModel& severity, int ell_max,
                       const char* who) {
  const auto ab = count.panjer_params();
  if (!ab) {
    throw DomainError(std::string(who) + ": count " + count.describe() +
                      " is not in the Panjer (a, b) class");
  }
  if (!severity.is_discrete()) {
    throw DomainError(std::string(who) + ": severity " + severity.describe() +
                      " is not integer-valued");
  }
  if (ell_max < 0) throw DomainError(std::string(who) + ": l_max must be nonnegative");
  RecursionSetup s;
  s.ab = *ab;
  s.p = severity_pmf_table(severity, ell_max);
  s.c0 = s.ab.a * s.p[0];
  if (s.c0 >= 1.0 - kDivergenceMargin) {
    throw DivergenceError(std::string(who) + ": a * P(X = 0) = " + std::to_string(s.c0) +
                          " leaves no room for the normalising factor");
  }
  s.inv = 1.0 / (1.0 - s.c0);
  return s;
}

void finish_mass_table(RestrictedMomentTable& t) {
  clamp_negative(t);
  t.diagnostics.mass_deficit = 1.0 - t.values.sum();
}

}  // namespace

RestrictedMomentTable aggregate_pmf(const CountModel& count, const SeverityModel& severity,
                                    int ell_max) {
  const RecursionSetup s = prepare(count, severity, ell_max, "aggregate_pmf");
  const double a = s.ab.a;
  const double b = s.ab.b;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(ell_max + 1);
  f[0] = tilted_count_moment(count, 0, s.p[0]);
  Eigen::VectorXd jp(ell_max + 1);
  for (int j = 0; j <= ell_max; ++j) jp[j] = j * s.p[j];
  for (int l = 1; l <= ell_max; ++l) {
    const double pa = s.p.segment(1, l).dot(f.segment(0, l).reverse());
    const double pb = jp.segment(1, l).dot(f.segment(0, l).reverse());
    f[l] = s.inv * (a * pa + b * pb / l);
  }
  RestrictedMomentTable t;
  t.k = 0;
  t.target = Target::count_moment;
  t.method = Method::recursion;
  t.values = std::move(f);
  finish_mass_table(t);
  return t;
}

RestrictedMomentTable aggregate_pmf_plus_one(const RestrictedMomentTable& aggregate,
                                             const SeverityModel& severity) {
  if (aggregate.k != 0 || aggregate.target != Target::count_moment) {
    throw DomainError("aggregate_pmf_plus_one: expects the order-0 S_N table");
  }
  if (!severity.is_discrete()) {
    throw DomainError("aggregate_pmf_plus_one: severity must be integer-valued");
  }
  const int L = aggregate.ell_max();
  const Eigen::VectorXd p = severity_pmf_table(severity, L);
  RestrictedMomentTable t;
  t.k = 0;
  t.target = Target::component_moment_plus;
  t.method = aggregate.method;
  t.values.resize(L + 1);
  for (int l = 0; l <= L; ++l) {
    t.values[l] = p.segment(0, l + 1).dot(aggregate.values.segment(0, l + 1).reverse());
  }
  finish_mass_table(t);
  return t;
}

std::vector<RestrictedMomentTable> restricted_count_moments(const CountModel& count,
                                                            const SeverityModel& severity, int k,
                                                            int ell_max) {
  if (k < 0) throw DomainError("restricted_count_moments: k must be nonnegative");
  const RecursionSetup s = prepare(count, severity, ell_max, "restricted_count_moments");
  const double a = s.ab.a;
  const double b = s.ab.b;

  std::vector<Eigen::VectorXd> m(k + 1, Eigen::VectorXd::Zero(ell_max + 1));
  for (int i = 0; i <= k; ++i) m[i][0] = tilted_count_moment(count, i, s.p[0]);

  Eigen::MatrixXd choose(k + 1, k + 1);
  choose.setZero();
  for (int n = 0; n <= k; ++n)
    for (int i = 0; i <= n; ++i) choose(n, i) = binomial(n, i);

  Eigen::VectorXd jp(ell_max + 1);
  for (int j = 0; j <= ell_max; ++j) jp[j] = j * s.p[j];

  Eigen::VectorXd w(ell_max);
  Eigen::VectorXd conv(k + 1);
  for (int l = 1; l <= ell_max; ++l) {
    // w_j = (a + b j / l) p_j for j = 1..l
    w.head(l) = a * s.p.segment(1, l) + (b / l) * jp.segment(1, l);
    for (int i = 0; i <= k; ++i) conv[i] = w.head(l).dot(m[i].segment(0, l).reverse());
    for (int n = 0; n <= k; ++n) {
      double same = 0.0;
      for (int j = 0; j < n; ++j) same += choose(n, j) * m[j][l];
      double shifted = 0.0;
      for (int i = 0; i <= n; ++i) shifted += choose(n, i) * conv[i];
      m[n][l] = s.inv * (s.c0 * same + shifted);
    }
  }

  std::vector<RestrictedMomentTable> out;
  out.reserve(k + 1);
  for (int i = 0; i <= k; ++i) {
    RestrictedMomentTable t;
    t.k = i;
    t.target = Target::count_moment;
    t.method = Method::recursion;
    t.values = std::move(m[i]);
    if (i == 0) {
      finish_mass_table(t);
    } else {
      clamp_negative(t);
    }
    out.push_back(std::move(t));
  }
  return out;
}

RestrictedMomentTable restricted_component_moment_plus(const CountModel& count,
                                                       const SeverityModel& severity, int k,
                                                       int ell_max) {
  if (k < 1) throw DomainError("restricted_component_moment_plus: k must be at least 1");
  const RecursionSetup s = prepare(count, severity, ell_max, "restricted_component_moment_plus");
  const double a = s.ab.a;
  const double b = s.ab.b;
  const double q0 = aggregate_pmf(count, severity, 0).values[0];

  auto run = [&](int order, const Eigen::VectorXd* chi1) {
    Eigen::VectorXd chi = Eigen::VectorXd::Zero(ell_max + 1);
    if (ell_max >= 1) chi[1] = s.p[1] * q0;
    Eigen::VectorXd jkp(ell_max + 1);
    for (int j = 0; j <= ell_max; ++j) jkp[j] = std::pow(static_cast<double>(j), order) * s.p[j];
    // r(m) = chi_{1+}(m) / m
    Eigen::VectorXd r = Eigen::VectorXd::Zero(ell_max + 1);
    for (int l = 2; l <= ell_max; ++l) {
      const int n = l - 1;
      if (order == 1) {
        r[n] = chi[n] / n;
      } else {
        r[n] = (*chi1)[n] / n;
      }
      const double sa = s.p.segment(1, n).dot(chi.segment(1, n).reverse());
      const double sb = jkp.segment(1, n).dot(r.segment(1, n).reverse());
      chi[l] = jkp[l] * q0 + s.inv * (a * sa + b * sb);
    }
    return chi;
  };

  Eigen::VectorXd chi1 = run(1, nullptr);
  RestrictedMomentTable t;
  t.k = k;
  t.target = Target::component_moment_plus;
  t.method = Method::recursion;
  t.values = k == 1 ? std::move(chi1) : run(k, &chi1);
  clamp_negative(t);
  return t;
}

int auto_ell_max(const CountModel& count, const SeverityModel& severity, int hard_limit) {
  if (hard_limit < 0) throw DomainError("auto_ell_max: hard limit must be nonnegative");
  int L = std::min(64, hard_limit);
  for (;;) {
    const RestrictedMomentTable t = aggregate_pmf(count, severity, L);
    double cum = 0.0;
    for (int l = 0; l <= L; ++l) {
      cum += t.values[l];
      if (cum >= kAutoEllMaxMass) return l;
    }
    if (L >= hard_limit) return hard_limit;
    L = std::min(2 * L, hard_limit);
  }
}

}  // namespace rsum
