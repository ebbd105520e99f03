// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/tables.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "rsum/errors.hpp"
#include "rsum/model_spec.hpp"
#include "rsum/table_io.hpp"

namespace {

using rsum::RestrictedMomentTable;

RestrictedMomentTable make_table(std::vector<double> v, int k = 0,
                                 rsum::Target target = rsum::Target::count_moment) {
  RestrictedMomentTable t;
  t.k = k;
  t.target = target;
  t.values = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return t;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

TEST(PredictionCurve, Ratio) {
  const auto curve = rsum::to_prediction_curve(make_table({0.2}, 1), make_table({0.1}));
  ASSERT_EQ(curve.entries.size(), 1u);
  EXPECT_DOUBLE_EQ(curve.entries[0].value, 2.0);
  EXPECT_TRUE(curve.entries[0].defined);
  EXPECT_EQ(curve.k, 1);
}

TEST(PredictionCurve, FloorMarksUndefined) {
  const auto curve = rsum::to_prediction_curve(make_table({1e-301, 0.5, 0.0}, 1),
                                               make_table({1e-300, 0.25, 0.0}));
  EXPECT_FALSE(curve.entries[0].defined);
  EXPECT_TRUE(curve.entries[1].defined);
  EXPECT_FALSE(curve.entries[2].defined);
  EXPECT_TRUE(std::isnan(curve.entries[2].value));
}

TEST(PredictionCurve, CustomFloor) {
  const auto curve = rsum::to_prediction_curve(make_table({1e-9}, 1), make_table({1e-8}), 1e-6);
  EXPECT_FALSE(curve.entries[0].defined);
  EXPECT_EQ(curve.mass_floor, 1e-6);
}

TEST(PredictionCurve, RejectsMismatches) {
  EXPECT_THROW(rsum::to_prediction_curve(make_table({1, 2}, 1), make_table({1})), rsum::DomainError);
  EXPECT_THROW(rsum::to_prediction_curve(make_table({1}, 1), make_table({1}, 1)), rsum::DomainError);
  EXPECT_THROW(rsum::to_prediction_curve(make_table({1}, 1, rsum::Target::component_moment_plus),
                                         make_table({1})),
               rsum::DomainError);
  EXPECT_NO_THROW(rsum::to_prediction_curve(make_table({1}, 1, rsum::Target::component_moment_plus),
                                            make_table({1}, 0, rsum::Target::component_moment_plus)));
}

TEST(Clamp, CountsOnlyBeyondSlack) {
  auto t = make_table({-1e-13, -1e-6, 0.5, -2.0});
  rsum::clamp_negative(t);
  EXPECT_EQ(t.diagnostics.clamped_count, 2);
  for (int i = 0; i < 4; ++i) EXPECT_GE(t.values[i], 0.0);
  EXPECT_EQ(t.values[2], 0.5);
}

TEST(Names, RoundTrip) {
  for (auto target : {rsum::Target::count_moment, rsum::Target::component_moment_plus,
                      rsum::Target::component_moment, rsum::Target::component_pmf}) {
    EXPECT_EQ(rsum::target_from_string(rsum::to_string(target)), target);
  }
  for (auto m : {rsum::Method::recursion, rsum::Method::fourier, rsum::Method::enumeration}) {
    EXPECT_EQ(rsum::method_from_string(rsum::to_string(m)), m);
  }
  EXPECT_THROW(rsum::target_from_string("bogus"), rsum::DomainError);
}

TEST(Doubles, FormatParseBitExact) {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 20000) {
    const std::uint64_t b = bits(gen);
    double x;
    std::memcpy(&x, &b, sizeof x);
    if (!std::isfinite(x)) continue;
    EXPECT_TRUE(same_bits(rsum::parse_double(rsum::format_double(x)), x));
    ++checked;
  }
  for (double x : {0.0, -0.0, 1e-320, std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max(), 0.1, 1.0 / 3.0}) {
    EXPECT_TRUE(same_bits(rsum::parse_double(rsum::format_double(x)), x));
  }
}

TEST(Doubles, NonFinite) {
  EXPECT_EQ(rsum::format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_TRUE(std::isnan(rsum::parse_double("nan")));
  EXPECT_EQ(rsum::format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_TRUE(std::isinf(rsum::parse_double("inf")));
}

TEST(Doubles, StrictParsing) {
  EXPECT_THROW(rsum::parse_double(""), rsum::DomainError);
  EXPECT_THROW(rsum::parse_double("1.5x"), rsum::DomainError);
  EXPECT_THROW(rsum::parse_double(" 2"), rsum::DomainError);
  EXPECT_EQ(rsum::parse_double("+2.5"), 2.5);
}

TEST(TableCsv, RoundTripIsBitExact) {
  std::mt19937_64 gen(3);
  std::exponential_distribution<double> d(1.0);
  std::vector<double> v;
  for (int i = 0; i < 500; ++i) v.push_back(d(gen) * std::pow(10.0, -i % 300));
  v.push_back(0.0);
  const auto t = make_table(v);
  std::stringstream ss;
  rsum::write_table_csv(ss, t);
  const Eigen::VectorXd back = rsum::read_table_csv(ss);
  ASSERT_EQ(back.size(), t.values.size());
  for (Eigen::Index i = 0; i < back.size(); ++i) EXPECT_TRUE(same_bits(back[i], t.values[i]));
}

TEST(TableCsv, RejectsMalformed) {
  std::istringstream bad_header("l,v\n0,1\n");
  EXPECT_THROW(rsum::read_table_csv(bad_header), rsum::DomainError);
  std::istringstream out_of_order("ell,value\n1,0.5\n");
  EXPECT_THROW(rsum::read_table_csv(out_of_order), rsum::DomainError);
  std::istringstream bad_number("ell,value\n0,abc\n");
  EXPECT_THROW(rsum::read_table_csv(bad_number), rsum::DomainError);
}

TEST(CurveCsv, RoundTripIsBitExact) {
  const auto curve = rsum::to_prediction_curve(make_table({0.3, 1e-20, 0.7, 0.0}, 2),
                                               make_table({0.1, 1e-19, 0.3, 0.0}));
  std::stringstream ss;
  rsum::write_curve_csv(ss, curve);
  const auto back = rsum::read_curve_csv(ss, 2, curve.mass_floor);
  ASSERT_EQ(back.entries.size(), curve.entries.size());
  for (std::size_t i = 0; i < back.entries.size(); ++i) {
    const auto& a = back.entries[i];
    const auto& b = curve.entries[i];
    EXPECT_EQ(a.ell, b.ell);
    EXPECT_EQ(a.defined, b.defined);
    EXPECT_TRUE(same_bits(a.mass, b.mass));
    EXPECT_TRUE(same_bits(a.value, b.value) || (std::isnan(a.value) && std::isnan(b.value)));
  }
}

TEST(TableJson, RoundTrip) {
  auto t = make_table({0.25, 0.5, 1e-17}, 2, rsum::Target::component_moment);
  t.method = rsum::Method::fourier;
  t.diagnostics.mass_deficit = 1e-9;
  t.diagnostics.unstable_prefix = 4;
  t.diagnostics.clamped_count = 3;
  t.diagnostics.max_imag_residue = 2e-20;
  t.diagnostics.grid = rsum::GridInfo{8, 2};
  const auto j = rsum::to_json(t);
  const auto back = rsum::table_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.k, 2);
  EXPECT_EQ(back.target, rsum::Target::component_moment);
  EXPECT_EQ(back.method, rsum::Method::fourier);
  EXPECT_EQ(back.diagnostics.unstable_prefix, 4);
  EXPECT_EQ(back.diagnostics.clamped_count, 3);
  EXPECT_EQ(back.diagnostics.grid->grid_size, 8);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(same_bits(back.values[i], t.values[i]));
}

TEST(Envelope, Shape) {
  const auto e = rsum::envelope({{"k", 1}}, 42u, {{"x", 1}}, {1, 2});
  EXPECT_EQ(e["meta"]["version"], rsum::kVersion);
  EXPECT_EQ(e["meta"]["config"]["k"], 1);
  EXPECT_EQ(e["meta"]["seed"], 42u);
  EXPECT_TRUE(e.contains("diagnostics"));
  EXPECT_EQ(e["data"].size(), 2u);
  EXPECT_TRUE(rsum::envelope({}, std::nullopt, {}, {})["meta"]["seed"].is_null());
}

TEST(ModelSpec, Shorthand) {
  const auto c = rsum::parse_count_spec("negbin:2,0.4");
  const auto& nb = std::get<rsum::count::NegativeBinomial>(c.kind());
  EXPECT_EQ(nb.r, 2.0);
  EXPECT_EQ(nb.p, 0.4);
  EXPECT_NO_THROW(rsum::parse_count_spec("poisson:20"));
  EXPECT_NO_THROW(rsum::parse_count_spec("binomial:10,0.3"));
  EXPECT_NO_THROW(rsum::parse_count_spec("mixed-poisson-gamma:7,1,1"));
  EXPECT_NO_THROW(rsum::parse_severity_spec("geometric:0.25"));
  EXPECT_NO_THROW(rsum::parse_severity_spec("gamma:2,1"));
  EXPECT_THROW(rsum::parse_count_spec("poisson"), rsum::DomainError);
  EXPECT_THROW(rsum::parse_count_spec("poisson:1,2"), rsum::DomainError);
  EXPECT_THROW(rsum::parse_count_spec("binomial:2.5,0.3"), rsum::DomainError);
  EXPECT_THROW(rsum::parse_count_spec("zeta:2"), rsum::DomainError);
  EXPECT_THROW(rsum::parse_severity_spec("geometric:x"), rsum::DomainError);
}

TEST(ModelSpec, CustomFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "rsum_tables_test";
  std::filesystem::create_directories(dir);
  const auto arr = (dir / "arr.json").string();
  const auto obj = (dir / "obj.json").string();
  std::ofstream(arr) << "[0.25, 0.75]";
  std::ofstream(obj) << R"({"kind": "custom", "pmf": [0.5, 0.4], "tail_tolerance": 0.2})";
  const auto c = rsum::parse_count_spec("custom:" + arr);
  EXPECT_EQ(rsum::count_pmf(c, 1), 0.75);
  const auto s = rsum::parse_severity_spec("custom:" + obj);
  EXPECT_NEAR(s.missing_mass(), 0.1, 1e-15);
  EXPECT_THROW(rsum::parse_count_spec("custom:" + (dir / "missing.json").string()), rsum::DomainError);
}

TEST(ModelSpec, ProcessSpecs) {
  const auto sn = rsum::shotnoise_from_json(
      {{"lambda", 30}, {"gamma", 20}, {"jump_law", "poisson:5"}, {"t", 1}, {"s", 1}});
  EXPECT_EQ(sn.lambda, 30.0);
  EXPECT_EQ(sn.gamma, 20.0);
  const auto py = rsum::polya_from_json({{"alpha", 7},
                                         {"beta", 1},
                                         {"intensity", "power:2,0.5"},
                                         {"severity", {{"kind", "geometric"}, {"p", 0.25}}}});
  EXPECT_NEAR(py.cumulative_intensity(4.0), 4.0, 1e-15);
  EXPECT_THROW(rsum::shotnoise_from_json({{"lambda", 30}}), rsum::DomainError);
  EXPECT_THROW(rsum::parse_intensity_spec("linear:-1"), rsum::DomainError);
}

}  // namespace
