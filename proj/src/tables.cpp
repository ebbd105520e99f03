// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/tables.hpp"

#include <cmath>
#include <limits>

#include "rsum/errors.hpp"

namespace rsum {

std::string to_string(Target target) {
  switch (target) {
    case Target::count_moment: return "count_moment";
    case Target::component_moment_plus: return "component_moment_plus";
    case Target::component_moment: return "component_moment";
    case Target::component_pmf: return "component_pmf";
  }
  return "unknown";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::recursion: return "recursion";
    case Method::fourier: return "fourier";
    case Method::enumeration: return "enumeration";
  }
  return "unknown";
}

Target target_from_string(const std::string& name) {
  for (Target t : {Target::count_moment, Target::component_moment_plus, Target::component_moment,
                   Target::component_pmf}) {
    if (to_string(t) == name) return t;
  }
  throw DomainError("unknown table target '" + name + "'");
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::recursion, Method::fourier, Method::enumeration}) {
    if (to_string(m) == name) return m;
  }
  throw DomainError("unknown table method '" + name + "'");
}

void clamp_negative(RestrictedMomentTable& table) {
  for (Eigen::Index i = 0; i < table.values.size(); ++i) {
    double& v = table.values[i];
    if (v < 0.0) {
      if (v < -kNegativeSlack) ++table.diagnostics.clamped_count;
      v = 0.0;
    }
  }
}

PredictionCurve to_prediction_curve(const RestrictedMomentTable& restricted,
                                    const RestrictedMomentTable& mass, double mass_floor) {
  if (restricted.values.size() != mass.values.size()) {
    throw DomainError("to_prediction_curve: restricted table has " +
                      std::to_string(restricted.values.size()) + " entries, mass table has " +
                      std::to_string(mass.values.size()));
  }
  if (mass.k != 0) throw DomainError("to_prediction_curve: mass table must have order 0");
  if (restricted.target == Target::component_moment_plus && restricted.k > 0 &&
      mass.target != Target::component_moment_plus) {
    throw DomainError("to_prediction_curve: chi_{k+} must be paired with the S_{N+1} mass table");
  }
  PredictionCurve curve;
  curve.k = restricted.k;
  curve.mass_floor = mass_floor;
  curve.entries.reserve(static_cast<std::size_t>(mass.values.size()));
  for (Eigen::Index l = 0; l < mass.values.size(); ++l) {
    PredictionEntry e;
    e.ell = static_cast<int>(l);
    e.mass = mass.values[l];
    e.value = e.mass > 0.0 ? restricted.values[l] / e.mass
                           : std::numeric_limits<double>::quiet_NaN();
    e.defined = e.mass >= mass_floor && std::isfinite(e.value);
    curve.entries.push_back(e);
  }
  return curve;
}

}  // namespace rsum
