// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace rsum {

// Slack below zero tolerated before an entry counts as a cancellation defect.
inline constexpr double kNegativeSlack = 1e-12;

// Conditioning masses below this leave a prediction undefined.
inline constexpr double kDefaultMassFloor = 1e-12;

enum class Target {
  count_moment,           // m_k(l) = E[N^k; S_N = l]
  component_moment_plus,  // chi_{k+}(l) = E[X_1^k; S_{N+1} = l]
  component_moment,       // chi_k(l) = E[X_1^k; S_N = l]
  component_pmf,          // P(X_1 = l), used by the shot-noise route
};

enum class Method { recursion, fourier, enumeration };

std::string to_string(Target target);
std::string to_string(Method method);
Target target_from_string(const std::string& name);
Method method_from_string(const std::string& name);

struct GridInfo {
  int grid_size = 0;
  int aliasing_guard = 0;
};

struct TableDiagnostics {
  // 1 - sum of the table; meaningful for order-0 mass tables.
  double mass_deficit = 0.0;
  // First index from which the table is considered stable (see stability_scan).
  std::optional<int> unstable_prefix;
  // Entries that fell below -kNegativeSlack and were clamped to zero.
  int clamped_count = 0;
  // Largest discarded imaginary part (Fourier route).
  double max_imag_residue = 0.0;
  bool mass_check_failed = false;
  std::optional<GridInfo> grid;
};

// Dense values over l = 0, ..., l_max.
struct RestrictedMomentTable {
  int k = 0;
  Target target = Target::count_moment;
  Method method = Method::recursion;
  Eigen::VectorXd values;
  TableDiagnostics diagnostics;

  int ell_max() const { return static_cast<int>(values.size()) - 1; }
};

// Clamps entries below zero, counting those below -kNegativeSlack.
void clamp_negative(RestrictedMomentTable& table);

struct PredictionEntry {
  int ell = 0;
  double value = 0.0;  // restricted / mass; NaN when the mass is not positive
  bool defined = false;
  double mass = 0.0;   // the conditioning mass at ell
};

struct PredictionCurve {
  int k = 0;
  double mass_floor = kDefaultMassFloor;
  std::vector<PredictionEntry> entries;
};

// Entrywise restricted / mass with defined = (mass >= mass_floor). The value
// is kept even for undefined entries so unstable regions can be inspected.
// Throws DomainError on length mismatch.
PredictionCurve to_prediction_curve(const RestrictedMomentTable& restricted,
                                    const RestrictedMomentTable& mass,
                                    double mass_floor = kDefaultMassFloor);

}  // namespace rsum
