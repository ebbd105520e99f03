// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

// CSV and JSON forms of tables, curves and oracle reports. Doubles are
// written in shortest round-trip form, so re-reading is bit-exact.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "rsum/oracle.hpp"
#include "rsum/tables.hpp"
#include "rsum/transform.hpp"

namespace rsum {

inline constexpr const char* kVersion = "1.0.0";

std::string format_double(double x);
// Throws DomainError on anything but a complete number ("nan" and "inf"
// included).
double parse_double(const std::string& text);

// Header "ell,value", one record per l.
void write_table_csv(std::ostream& out, const RestrictedMomentTable& table);
// Values only; k, target and method are not part of the CSV form.
Eigen::VectorXd read_table_csv(std::istream& in);

// Header "ell,value,defined,mass".
void write_curve_csv(std::ostream& out, const PredictionCurve& curve);
PredictionCurve read_curve_csv(std::istream& in, int k = 0,
                               double mass_floor = kDefaultMassFloor);

nlohmann::json to_json(const TableDiagnostics& diagnostics);
nlohmann::json to_json(const RestrictedMomentTable& table);
RestrictedMomentTable table_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PredictionCurve& curve);
nlohmann::json to_json(const StabilityReport& report);
nlohmann::json to_json(const OracleReport& report);

// {meta: {version, config, seed}, diagnostics, data}
nlohmann::json envelope(const nlohmann::json& config, std::optional<std::uint64_t> seed,
                        const nlohmann::json& diagnostics, const nlohmann::json& data);

}  // namespace rsum
