// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

// Ground truth for tests and the validate command: exact truncated
// enumeration over the count, and seeded Monte Carlo simulation of the
// generative models.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsum/applications.hpp"
#include "rsum/distributions.hpp"
#include "rsum/tables.hpp"

namespace rsum {

struct TailCertificate {
  int n_max = 0;
  // sum_{n > n_max} n^k q_n (the count mass for k = 0).
  double count_tail = 0.0;
  // Severity mass not represented by the model's table.
  double severity_tail = 0.0;
  double tolerance = 0.0;
};

struct OracleReport {
  std::string target;
  bool exact = true;
  // Conditioning values: l for discrete targets, x for continuous ones.
  std::vector<double> grid;
  // Exact values, or Monte Carlo estimates.
  std::vector<double> values;
  // Monte Carlo standard errors; empty for exact reports.
  std::vector<double> std_errors;
  // Samples that landed in each bin; empty for exact reports.
  std::vector<long> bin_counts;
  // Bins without data (Monte Carlo).
  std::vector<bool> empty;
  std::optional<TailCertificate> certificate;
  long samples = 0;
  std::uint64_t seed = 0;
  std::string estimator;
};

enum class EnumerationTarget {
  count_moment,           // m_k(l)
  component_moment,       // chi_k(l), including the N = 0 atom
  component_moment_plus,  // chi_{k+}(l)
};

std::string to_string(EnumerationTarget target);

inline constexpr double kEnumerationTailTolerance = 1e-14;
inline constexpr int kEnumerationMaxCount = 100000;

// Smallest n_max whose moment tail sum_{n > n_max} n^k q_n is certified below
// tol by a ratio bound. Throws CertificationError if none is found below
// kEnumerationMaxCount.
TailCertificate certify_count_tail(const CountModel& count, int k, double tol);

// Exact m_k or chi_k by convolution powers of the severity pmf, truncated
// at n_max (chosen automatically when empty). Throws CertificationError if
// the certified tail exceeds tol.
OracleReport enumerate_restricted(const CountModel& count, const SeverityModel& severity, int k,
                                  int ell_max, std::optional<int> n_max, EnumerationTarget target,
                                  double tol = kEnumerationTailTolerance);

enum class McTarget {
  random_sum_count,        // E[N^k | S_N = l]
  random_sum_component,    // E[X_1^k | S_N = l]
  shotnoise_count,         // E[N(t) | M(t) = l]
  shotnoise_increment,     // E[M(t, t+s] | M(t) = l]
  polya_count,             // E[N(t) | Z(t) = l]
  polya_increment,         // E[Z(t, t+s] | Z(t) = l]
};

std::string to_string(McTarget target);
McTarget mc_target_from_string(const std::string& name);

enum class McEstimator {
  // Sample mean of the binned draws.
  binned,
  // Each draw of the count n contributes at every l with weight
  // P(S_n = l), computed exactly; the ratio estimator uses the delta method.
  conditional,
};

struct McConfig {
  long samples = 1000000;
  std::uint64_t seed = 20240101;
  int substreams = 16;
  int threads = 0;  // 0 uses the hardware concurrency
  McEstimator estimator = McEstimator::binned;
  int ell_max = 100;
  // Bins to report; all of [0, ell_max] when empty.
  std::vector<int> probes;
};

// Random-sum and process models the simulator understands. Only the fields
// relevant to the chosen target are read.
struct McModel {
  std::optional<CountModel> count;
  std::optional<SeverityModel> severity;
  int k = 1;
  std::optional<ShotNoiseSpec> shotnoise;
  std::optional<PolyaSpec> polya;
};

// Simulates the target's generative model, bins on the conditioning value
// and reports conditional means with standard errors. Deterministic for a
// given seed and substream count.
OracleReport mc_conditional(McTarget target, const McModel& model, const McConfig& config);

// Monte Carlo E[N^k; S_N <= x] (values) and E[X_1^k; S_N <= x]
// (component_values) on a grid, for any severity with a sampler.
struct ContinuousOracleReport {
  OracleReport count;
  OracleReport component;
};

ContinuousOracleReport continuous_oracle(const CountModel& count, const SeverityModel& severity,
                                         int k, const std::vector<double>& x_grid, long samples,
                                         std::uint64_t seed = 20240101, int substreams = 16);

}  // namespace rsum
