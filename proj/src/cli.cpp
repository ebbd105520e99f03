// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsum/applications.hpp"
#include "rsum/continuous.hpp"
#include "rsum/errors.hpp"
#include "rsum/model_spec.hpp"
#include "rsum/oracle.hpp"
#include "rsum/panjer.hpp"
#include "rsum/table_io.hpp"
#include "rsum/transform.hpp"

namespace rsum {

namespace {

using nlohmann::json;

struct Options {
  std::string count;
  std::string severity;
  int k = 1;
  std::optional<int> lmax;
  int lmax_limit = 100000;
  std::string method = "auto";
  int grid = 0;
  int guard = 2;
  double mass_floor = kDefaultMassFloor;
  double rel_tol = 1e-3;
  std::string mode = "corrected";
  std::string out;
  std::string format = "csv";
  bool strict = false;

  // continuous-predict
  std::vector<double> xs;
  double x_min = 0.0;
  double x_max = 0.0;
  int x_points = 0;
  std::optional<double> fst_T;
  int fst_panels = 8;
  double fst_tol = 1e-5;

  // shotnoise / polya
  std::string spec;
  std::optional<double> lambda, gamma, alpha, beta, t, s;
  std::string jump;
  std::string intensity;
  std::string target = "increment";

  // validate
  std::string validate_target;
  long samples = 1000000;
  std::uint64_t seed = 20240101;
  int bins = 100;
  std::vector<int> probes;
  std::string estimator = "binned";
  int substreams = 16;
  int threads = 0;
  std::optional<int> n_max;
};

json options_json(const std::string& command, const Options& o) {
  json j = {{"command", command}};
  auto put = [&](const char* key, const auto& v) { j[key] = v; };
  auto put_opt = [&](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  if (!o.count.empty()) put("count", o.count);
  if (!o.severity.empty()) put("severity", o.severity);
  put("k", o.k);
  put_opt("lmax", o.lmax);
  put("method", o.method);
  put("grid", o.grid);
  put("aliasing_guard", o.guard);
  put("mass_floor", o.mass_floor);
  put("rel_tol", o.rel_tol);
  put("mode", o.mode);
  put("format", o.format);
  if (!o.xs.empty()) put("x", o.xs);
  put_opt("fst_T", o.fst_T);
  put("fst_panels", o.fst_panels);
  put("fst_tol", o.fst_tol);
  if (!o.spec.empty()) put("spec", o.spec);
  put_opt("lambda", o.lambda);
  put_opt("gamma", o.gamma);
  put_opt("alpha", o.alpha);
  put_opt("beta", o.beta);
  put_opt("t", o.t);
  put_opt("s", o.s);
  if (!o.jump.empty()) put("jump", o.jump);
  if (!o.intensity.empty()) put("intensity", o.intensity);
  if (command == "shotnoise" || command == "polya") put("target", o.target);
  if (command == "validate") {
    put("validate_target", o.validate_target);
    put("samples", o.samples);
    put("bins", o.bins);
    put("probes", o.probes);
    put("estimator", o.estimator);
    put("substreams", o.substreams);
    put_opt("n_max", o.n_max);
  }
  return j;
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

InversionConfig inversion_config(const Options& o) {
  InversionConfig c;
  c.grid_size = o.grid;
  c.aliasing_guard = o.guard;
  return c;
}

QuadratureConfig quadrature_config(const Options& o) {
  QuadratureConfig c;
  c.truncation = o.fst_T;
  c.panels_per_period = o.fst_panels;
  c.abs_tol = o.fst_tol;
  return c;
}

std::string opt_to_string(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string("none");
}

// One summary line per produced table.
void summarize(std::ostream& err, const std::string& label, const RestrictedMomentTable& t) {
  err << label << ": method=" << to_string(t.method) << " k=" << t.k << " lmax=" << t.ell_max();
  if (t.diagnostics.grid) {
    err << " grid=" << t.diagnostics.grid->grid_size
        << " guard=" << t.diagnostics.grid->aliasing_guard;
  }
  err << " mass_deficit=" << format_double(t.diagnostics.mass_deficit)
      << " unstable_prefix=" << opt_to_string(t.diagnostics.unstable_prefix)
      << " clamped=" << t.diagnostics.clamped_count;
  if (t.method == Method::fourier) {
    err << " imag_residue=" << format_double(t.diagnostics.max_imag_residue);
  }
  if (t.diagnostics.mass_check_failed) err << " MASS_CHECK_FAILED";
  err << '\n';
}

void check_strict(const Options& o, const RestrictedMomentTable& t) {
  if (o.strict && t.diagnostics.mass_check_failed) {
    throw CertificationError("mass check failed: deficit " +
                             format_double(t.diagnostics.mass_deficit));
  }
}

// Writes to the --out path, or to `out` when no path is given.
void write_text(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("--out: cannot write '" + path + "'");
  f << text;
  if (!f) throw UsageError("--out: write to '" + path + "' failed");
}

std::string with_suffix(const std::string& prefix, const std::string& suffix) {
  return prefix + suffix;
}

std::string curve_text(const Options& o, const std::string& command, const PredictionCurve& c,
                       const json& diagnostics) {
  if (o.format == "json") {
    return envelope(options_json(command, o), std::nullopt, diagnostics, to_json(c)).dump(2) + "\n";
  }
  std::ostringstream ss;
  write_curve_csv(ss, c);
  return ss.str();
}

std::string table_text(const Options& o, const std::string& command,
                       const RestrictedMomentTable& t) {
  if (o.format == "json") {
    return envelope(options_json(command, o), std::nullopt, to_json(t.diagnostics), to_json(t))
               .dump(2) +
           "\n";
  }
  std::ostringstream ss;
  write_table_csv(ss, t);
  return ss.str();
}

bool wants_recursion(const Options& o) { return o.method == "recursion" || o.method == "both"; }
bool wants_fourier(const Options& o) { return o.method == "fourier" || o.method == "both"; }

void require_models(const Options& o) {
  if (o.count.empty()) throw UsageError("--count is required");
  if (o.severity.empty()) throw UsageError("--severity is required");
}

// Smallest l with cumulative aggregate mass >= kAutoEllMaxMass.
int resolve_lmax(const Options& o, const CountModel& count, const SeverityModel& severity) {
  if (o.lmax) {
    if (*o.lmax < 0) throw UsageError("--lmax must be nonnegative");
    return *o.lmax;
  }
  if (count.panjer_params()) return auto_ell_max(count, severity, o.lmax_limit);
  const UnitCircleFunction pgf = gf_count_moment(count, severity, 0);
  for (int L = std::min(64, o.lmax_limit);; L = std::min(2 * L, o.lmax_limit)) {
    const RestrictedMomentTable t = invert_unit_circle(pgf, L, {});
    double cum = 0.0;
    for (int l = 0; l <= L; ++l) {
      cum += t.values[l];
      if (cum >= kAutoEllMaxMass) return l;
    }
    if (L >= o.lmax_limit) return o.lmax_limit;
  }
}

void check_method(const Options& o) {
  if (o.method != "auto" && o.method != "recursion" && o.method != "fourier" && o.method != "both") {
    throw UsageError("--method must be auto, recursion, fourier or both");
  }
  if (o.method == "both" && (o.out.empty() || o.out == "-")) {
    throw UsageError("--method both writes several files and needs an --out prefix");
  }
}

// auto: the recursion for Panjer counts, Fourier inversion otherwise.
Options resolve_method(const Options& o, const CountModel& count) {
  Options r = o;
  if (r.method == "auto") r.method = count.panjer_params() ? "recursion" : "fourier";
  return r;
}

ComponentMode component_mode(const std::string& name) {
  for (ComponentMode m :
       {ComponentMode::corrected, ComponentMode::paper_literal, ComponentMode::plus_one}) {
    if (to_string(m) == name) return m;
  }
  throw UsageError("--mode must be corrected, paper_literal or plus_one");
}

// Runs the recursion and/or Fourier routes for one target and writes the
// curves (and the stability report for --method both).
int emit_routes(const Options& o, const std::string& command, std::ostream& out,
                std::ostream& err, const std::optional<std::pair<RestrictedMomentTable,
                                                                 RestrictedMomentTable>>& rec,
                const std::optional<std::pair<RestrictedMomentTable, RestrictedMomentTable>>& fou) {
  std::optional<PredictionCurve> rc, fc;
  if (rec) {
    summarize(err, "recursion restricted", rec->first);
    summarize(err, "recursion mass", rec->second);
    check_strict(o, rec->second);
    rc = to_prediction_curve(rec->first, rec->second, o.mass_floor);
  }
  std::optional<std::pair<RestrictedMomentTable, RestrictedMomentTable>> f = fou;
  json stability;
  if (f && rec) {
    const StabilityReport restricted = stability_scan(f->first, rec->first, o.rel_tol);
    stability_scan(f->second, rec->second, o.rel_tol);
    fc = to_prediction_curve(f->first, f->second, o.mass_floor);
    const StabilityReport curve = stability_scan(*fc, *rc, o.rel_tol);
    stability = {{"restricted", to_json(restricted)}, {"curve", to_json(curve)}};
    err << "stability: rel_tol=" << format_double(o.rel_tol)
        << " unstable_prefix_end=" << opt_to_string(restricted.unstable_prefix_end)
        << " suffix_max_rel=" << format_double(restricted.suffix_max_rel)
        << " curve_unstable_prefix_end=" << opt_to_string(curve.unstable_prefix_end)
        << " curve_suffix_max_rel=" << format_double(curve.suffix_max_rel) << '\n';
  } else if (f) {
    fc = to_prediction_curve(f->first, f->second, o.mass_floor);
  }
  if (f) {
    summarize(err, "fourier restricted", f->first);
    summarize(err, "fourier mass", f->second);
    check_strict(o, f->second);
  }

  const std::string ext = o.format == "json" ? ".json" : ".csv";
  if (o.method == "both") {
    json drec = {{"restricted", to_json(rec->first.diagnostics)},
                 {"mass", to_json(rec->second.diagnostics)}};
    json dfou = {{"restricted", to_json(f->first.diagnostics)},
                 {"mass", to_json(f->second.diagnostics)}};
    write_text(with_suffix(o.out, "_recursion" + ext), out, curve_text(o, command, *rc, drec));
    write_text(with_suffix(o.out, "_fourier" + ext), out, curve_text(o, command, *fc, dfou));
    write_text(with_suffix(o.out, "_stability.json"), out,
               envelope(options_json(command, o), std::nullopt,
                        {{"recursion", drec}, {"fourier", dfou}}, stability)
                       .dump(2) +
                   "\n");
  } else if (rc) {
    json d = {{"restricted", to_json(rec->first.diagnostics)},
              {"mass", to_json(rec->second.diagnostics)}};
    write_text(o.out, out, curve_text(o, command, *rc, d));
  } else {
    json d = {{"restricted", to_json(f->first.diagnostics)},
              {"mass", to_json(f->second.diagnostics)}};
    write_text(o.out, out, curve_text(o, command, *fc, d));
  }
  return kExitOk;
}

int cmd_aggregate(const Options& opts, std::ostream& out, std::ostream& err) {
  require_models(opts);
  check_method(opts);
  const CountModel count = parse_count_spec(opts.count);
  const Options o = resolve_method(opts, count);
  const SeverityModel severity = parse_severity_spec(o.severity);
  const int L = resolve_lmax(o, count, severity);
  std::optional<RestrictedMomentTable> rec, fou;
  if (wants_recursion(o)) {
    rec = aggregate_pmf(count, severity, L);
    summarize(err, "aggregate", *rec);
    check_strict(o, *rec);
  }
  if (wants_fourier(o)) {
    fou = invert_unit_circle(gf_count_moment(count, severity, 0), L, inversion_config(o));
    summarize(err, "aggregate", *fou);
    check_strict(o, *fou);
  }
  const std::string ext = o.format == "json" ? ".json" : ".csv";
  if (rec && fou) {
    const StabilityReport rep = stability_scan(*fou, *rec, o.rel_tol);
    write_text(o.out + "_recursion" + ext, out, table_text(o, "aggregate", *rec));
    write_text(o.out + "_fourier" + ext, out, table_text(o, "aggregate", *fou));
    write_text(o.out + "_stability.json", out,
               envelope(options_json("aggregate", o), std::nullopt,
                        {{"recursion", to_json(rec->diagnostics)},
                         {"fourier", to_json(fou->diagnostics)}},
                        to_json(rep))
                       .dump(2) +
                   "\n");
  } else {
    write_text(o.out, out, table_text(o, "aggregate", rec ? *rec : *fou));
  }
  return kExitOk;
}

int cmd_predict_count(const Options& opts, std::ostream& out, std::ostream& err) {
  require_models(opts);
  check_method(opts);
  if (opts.k < 0) throw UsageError("--k must be nonnegative");
  const CountModel count = parse_count_spec(opts.count);
  const Options o = resolve_method(opts, count);
  const SeverityModel severity = parse_severity_spec(o.severity);
  const int L = resolve_lmax(o, count, severity);
  std::optional<std::pair<RestrictedMomentTable, RestrictedMomentTable>> rec, fou;
  if (wants_recursion(o)) {
    auto tables = restricted_count_moments(count, severity, o.k, L);
    rec.emplace(tables[o.k], tables[0]);
  }
  if (wants_fourier(o)) {
    const InversionConfig cfg = inversion_config(o);
    fou.emplace(invert_unit_circle(gf_count_moment(count, severity, o.k), L, cfg),
                invert_unit_circle(gf_count_moment(count, severity, 0), L, cfg));
  }
  return emit_routes(o, "predict-count", out, err, rec, fou);
}

int cmd_predict_component(const Options& opts, std::ostream& out, std::ostream& err) {
  require_models(opts);
  check_method(opts);
  if (opts.k < 0) throw UsageError("--k must be nonnegative");
  const ComponentMode mode = component_mode(opts.mode);
  const CountModel count = parse_count_spec(opts.count);
  Options o = resolve_method(opts, count);
  if (opts.method == "auto" && mode != ComponentMode::plus_one) o.method = "fourier";
  if (wants_recursion(o) && mode != ComponentMode::plus_one) {
    throw UsageError("--method " + o.method + ": the recursion route computes chi_{k+} only; use "
                     "--mode plus_one or --method fourier");
  }
  if (mode == ComponentMode::plus_one && o.k < 1) {
    throw UsageError("--k must be >= 1 for --mode plus_one");
  }
  const SeverityModel severity = parse_severity_spec(o.severity);
  const int L = resolve_lmax(o, count, severity);
  std::optional<std::pair<RestrictedMomentTable, RestrictedMomentTable>> rec, fou;
  if (wants_recursion(o)) {
    const RestrictedMomentTable agg = aggregate_pmf(count, severity, L);
    rec.emplace(restricted_component_moment_plus(count, severity, o.k, L),
                aggregate_pmf_plus_one(agg, severity));
  }
  if (wants_fourier(o)) {
    const InversionConfig cfg = inversion_config(o);
    RestrictedMomentTable chi =
        invert_unit_circle(gf_component_moment(count, severity, o.k, mode), L, cfg);
    RestrictedMomentTable mass =
        mode == ComponentMode::plus_one
            ? invert_unit_circle(gf_component_moment(count, severity, 0, mode), L, cfg)
            : invert_unit_circle(gf_count_moment(count, severity, 0), L, cfg);
    fou.emplace(std::move(chi), std::move(mass));
  }
  return emit_routes(o, "predict-component", out, err, rec, fou);
}

std::vector<double> x_grid(const Options& o) {
  if (!o.xs.empty()) return o.xs;
  if (o.x_points < 1 || !(o.x_max > 0.0)) {
    throw UsageError("continuous-predict needs --x or --x-max with --x-points");
  }
  std::vector<double> xs;
  const double lo = o.x_min > 0.0 ? o.x_min : o.x_max / o.x_points;
  for (int i = 0; i < o.x_points; ++i) {
    xs.push_back(o.x_points == 1 ? o.x_max : lo + (o.x_max - lo) * i / (o.x_points - 1));
  }
  return xs;
}

int cmd_continuous(const Options& o, std::ostream& out, std::ostream& err) {
  require_models(o);
  if (o.k < 0) throw UsageError("--k must be nonnegative");
  const CountModel count = parse_count_spec(o.count);
  const SeverityModel severity = parse_severity_spec(o.severity);
  const std::vector<double> xs = x_grid(o);
  const QuadratureConfig cfg = quadrature_config(o);
  const auto rows = continuous_predict(count, severity, o.k, xs, cfg, o.mass_floor);
  bool all_converged = true;
  for (const auto& r : rows) all_converged = all_converged && r.converged;
  err << "continuous: k=" << o.k << " points=" << rows.size()
      << " converged=" << (all_converged ? "yes" : "no") << " abs_tol=" << format_double(cfg.abs_tol)
      << '\n';
  if (!all_converged && o.strict) {
    throw CertificationError("truncation search did not reach the requested tolerance");
  }
  if (o.format == "json") {
    json data = json::array();
    for (const auto& r : rows) {
      data.push_back({{"x", r.x},
                      {"restricted", r.restricted},
                      {"mass", r.mass},
                      {"value", std::isfinite(r.value) ? json(r.value) : json()},
                      {"defined", r.defined},
                      {"converged", r.converged}});
    }
    write_text(o.out, out,
               envelope(options_json("continuous-predict", o), std::nullopt,
                        {{"converged", all_converged}}, data)
                       .dump(2) +
                   "\n");
  } else {
    std::ostringstream ss;
    ss << "x,restricted,mass,value,defined,converged\n";
    for (const auto& r : rows) {
      ss << format_double(r.x) << ',' << format_double(r.restricted) << ','
         << format_double(r.mass) << ',' << format_double(r.value) << ',' << (r.defined ? 1 : 0)
         << ',' << (r.converged ? 1 : 0) << '\n';
    }
    write_text(o.out, out, ss.str());
  }
  return kExitOk;
}

ShotNoiseSpec shotnoise_spec(const Options& o) {
  ShotNoiseSpec s;
  if (!o.spec.empty()) {
    s = shotnoise_from_json(read_json_file(o.spec));
  } else if (!o.lambda || !o.gamma || o.jump.empty()) {
    throw UsageError("shotnoise needs --spec or --lambda, --gamma and --jump");
  }
  if (o.lambda) s.lambda = *o.lambda;
  if (o.gamma) s.gamma = *o.gamma;
  if (!o.jump.empty()) s.jump_law = parse_severity_spec(o.jump);
  if (o.t) s.t = *o.t;
  if (o.s) s.s = *o.s;
  s.validate();
  return s;
}

PolyaSpec polya_spec(const Options& o) {
  PolyaSpec s;
  if (!o.spec.empty()) {
    s = polya_from_json(read_json_file(o.spec));
  } else if (!o.alpha || !o.beta || o.severity.empty()) {
    throw UsageError("polya needs --spec or --alpha, --beta and --severity");
  }
  if (o.alpha) s.alpha = *o.alpha;
  if (o.beta) s.beta = *o.beta;
  if (!o.intensity.empty()) s.cumulative_intensity = parse_intensity_spec(o.intensity);
  if (!o.severity.empty()) s.severity = parse_severity_spec(o.severity);
  if (o.t) s.t = *o.t;
  if (o.s) s.s = *o.s;
  s.validate();
  return s;
}

int cmd_shotnoise(const Options& o, std::ostream& out, std::ostream& err) {
  const ShotNoiseSpec spec = shotnoise_spec(o);
  if (!o.lmax) throw UsageError("shotnoise needs --lmax");
  if (o.target != "increment" && o.target != "count") {
    throw UsageError("--target must be increment or count");
  }
  ShotNoiseMode mode = ShotNoiseMode::derived;
  if (o.mode == "paper_literal") {
    mode = ShotNoiseMode::paper_literal;
  } else if (o.mode != "derived" && o.mode != "corrected") {
    throw UsageError("--mode must be derived or paper_literal");
  }
  const ShotNoisePrediction p =
      shotnoise_predict(spec, *o.lmax, inversion_config(o), mode, o.mass_floor);
  summarize(err, "component pmf", p.component_pmf);
  summarize(err, "mass", p.mass);
  check_strict(o, p.component_pmf);
  err << "coefficients: E[N(s)]=" << format_double(p.coefficients.mean_new_arrivals)
      << " E[L(s)]=" << format_double(p.coefficients.levy_increment_mean)
      << " new_arrival_payout=" << format_double(p.coefficients.new_arrival_payout) << '\n';
  const json diag = {{"component_pmf", to_json(p.component_pmf.diagnostics)},
                     {"mass", to_json(p.mass.diagnostics)},
                     {"coefficients",
                      {{"mean_new_arrivals", p.coefficients.mean_new_arrivals},
                       {"levy_increment_mean", p.coefficients.levy_increment_mean},
                       {"new_arrival_payout", p.coefficients.new_arrival_payout},
                       {"payout_at_shifted_age", p.coefficients.payout_at_shifted_age}}}};
  write_text(o.out, out,
             curve_text(o, "shotnoise", o.target == "count" ? p.count : p.increment, diag));
  return kExitOk;
}

int cmd_polya(const Options& o, std::ostream& out, std::ostream& err) {
  const PolyaSpec spec = polya_spec(o);
  if (!o.lmax) throw UsageError("polya needs --lmax");
  if (o.target != "increment" && o.target != "count") {
    throw UsageError("--target must be increment or count");
  }
  const PolyaPrediction p = polya_predict(spec, *o.lmax, inversion_config(o), o.mass_floor);
  summarize(err, "mass", p.mass);
  check_strict(o, p.mass);
  err << "slope=" << format_double(p.slope) << '\n';
  const json diag = {{"mass", to_json(p.mass.diagnostics)}, {"slope", p.slope}};
  write_text(o.out, out,
             curve_text(o, "polya", o.target == "count" ? p.count : p.increment, diag));
  return kExitOk;
}

// Model-side values at the report's grid for the comparison block.
std::optional<std::vector<double>> predicted_for(const Options& o, McTarget target,
                                                 const McModel& model, int ell_max) {
  PredictionCurve curve;
  switch (target) {
    case McTarget::random_sum_count: {
      if (model.count->panjer_params()) {
        auto t = restricted_count_moments(*model.count, *model.severity, model.k, ell_max);
        curve = to_prediction_curve(t[model.k], t[0], o.mass_floor);
      } else {
        const InversionConfig cfg = inversion_config(o);
        curve = to_prediction_curve(
            invert_unit_circle(gf_count_moment(*model.count, *model.severity, model.k), ell_max, cfg),
            invert_unit_circle(gf_count_moment(*model.count, *model.severity, 0), ell_max, cfg),
            o.mass_floor);
      }
      break;
    }
    case McTarget::random_sum_component: {
      const InversionConfig cfg = inversion_config(o);
      curve = to_prediction_curve(
          invert_unit_circle(gf_component_moment(*model.count, *model.severity, model.k), ell_max,
                             cfg),
          invert_unit_circle(gf_count_moment(*model.count, *model.severity, 0), ell_max, cfg),
          o.mass_floor);
      break;
    }
    case McTarget::shotnoise_count:
    case McTarget::shotnoise_increment: {
      const auto p = shotnoise_predict(*model.shotnoise, ell_max, inversion_config(o));
      curve = target == McTarget::shotnoise_count ? p.count : p.increment;
      break;
    }
    case McTarget::polya_count:
    case McTarget::polya_increment: {
      const auto p = polya_predict(*model.polya, ell_max, inversion_config(o), o.mass_floor);
      curve = target == McTarget::polya_count ? p.count : p.increment;
      break;
    }
  }
  std::vector<double> v;
  for (const auto& e : curve.entries) v.push_back(e.value);
  return v;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.validate_target.empty()) throw UsageError("validate needs --target");
  const json config = options_json("validate", o);
  if (o.validate_target == "enumerate") {
    require_models(o);
    const CountModel count = parse_count_spec(o.count);
    const SeverityModel severity = parse_severity_spec(o.severity);
    EnumerationTarget t = EnumerationTarget::count_moment;
    if (o.mode == "plus_one") {
      t = EnumerationTarget::component_moment_plus;
    } else if (o.mode == "component") {
      t = EnumerationTarget::component_moment;
    }
    const OracleReport rep = enumerate_restricted(count, severity, o.k, o.bins, o.n_max, t);
    err << "enumerate: n_max=" << rep.certificate->n_max
        << " count_tail=" << format_double(rep.certificate->count_tail) << '\n';
    write_text(o.out, out, envelope(config, std::nullopt, json::object(), to_json(rep)).dump(2) + "\n");
    return kExitOk;
  }
  if (o.validate_target == "continuous") {
    require_models(o);
    const CountModel count = parse_count_spec(o.count);
    const SeverityModel severity = parse_severity_spec(o.severity);
    const auto rep = continuous_oracle(count, severity, o.k, x_grid(o), o.samples, o.seed,
                                       o.substreams);
    write_text(o.out, out,
               envelope(config, o.seed, json::object(),
                        {{"count", to_json(rep.count)}, {"component", to_json(rep.component)}})
                       .dump(2) +
                   "\n");
    return kExitOk;
  }

  const McTarget target = mc_target_from_string(o.validate_target);
  McModel model;
  model.k = o.k;
  switch (target) {
    case McTarget::random_sum_count:
    case McTarget::random_sum_component:
      require_models(o);
      model.count = parse_count_spec(o.count);
      model.severity = parse_severity_spec(o.severity);
      break;
    case McTarget::shotnoise_count:
    case McTarget::shotnoise_increment:
      model.shotnoise = shotnoise_spec(o);
      break;
    case McTarget::polya_count:
    case McTarget::polya_increment:
      model.polya = polya_spec(o);
      break;
  }
  McConfig mc;
  mc.samples = o.samples;
  mc.seed = o.seed;
  mc.substreams = o.substreams;
  mc.threads = o.threads;
  mc.ell_max = o.bins;
  mc.probes = o.probes;
  if (o.estimator == "conditional") {
    mc.estimator = McEstimator::conditional;
  } else if (o.estimator != "binned") {
    throw UsageError("--estimator must be binned or conditional");
  }
  const OracleReport rep = mc_conditional(target, model, mc);
  json comparison = json::array();
  double max_z = 0.0;
  if (const auto pred = predicted_for(o, target, model, o.bins)) {
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
      const int l = static_cast<int>(rep.grid[i]);
      const double p = (*pred)[l];
      const double z = (rep.values[i] - p) / rep.std_errors[i];
      json row = {{"ell", l}, {"predicted", std::isfinite(p) ? json(p) : json()}};
      if (std::isfinite(z)) {
        row["z"] = z;
        max_z = std::max(max_z, std::abs(z));
      } else {
        row["z"] = nullptr;
      }
      comparison.push_back(row);
    }
  }
  err << "validate: target=" << o.validate_target << " samples=" << rep.samples
      << " seed=" << rep.seed << " max|z|=" << format_double(max_z) << '\n';
  write_text(o.out, out,
             envelope(config, o.seed, {{"comparison", comparison}, {"max_abs_z", max_z}},
                      to_json(rep))
                     .dump(2) +
                 "\n");
  return kExitOk;
}

void add_models(CLI::App* sub, Options& o) {
  sub->add_option("--count", o.count, "count model, e.g. poisson:20 or custom:file.json");
  sub->add_option("--severity", o.severity, "severity model, e.g. poisson:10");
}

void add_output(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "output path (prefix for --method both); stdout if omitted");
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_flag("--strict", o.strict, "treat failed mass checks as numerical failures");
}

void add_inversion(CLI::App* sub, Options& o) {
  sub->add_option("--grid", o.grid, "unit-circle grid size M (0: automatic)");
  sub->add_option("--guard", o.guard, "aliasing guard multiplier");
}

void add_lmax(CLI::App* sub, Options& o) {
  sub->add_option("--lmax", o.lmax, "largest l (automatic when omitted)");
  sub->add_option("--lmax-limit", o.lmax_limit, "cap for the automatic l_max");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"rsum: conditional moments of random sums"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto* aggregate = app.add_subcommand("aggregate", "P(S_N = l) by recursion and/or Fourier");
  add_models(aggregate, o);
  add_lmax(aggregate, o);
  add_inversion(aggregate, o);
  add_output(aggregate, o);
  aggregate->add_option("--method", o.method, "auto (recursion for Panjer counts), recursion, fourier or both");
  aggregate->add_option("--rel-tol", o.rel_tol, "stability scan tolerance");

  auto* pc = app.add_subcommand("predict-count", "E[N^k | S_N = l]");
  add_models(pc, o);
  add_lmax(pc, o);
  add_inversion(pc, o);
  add_output(pc, o);
  pc->add_option("--k", o.k, "moment order");
  pc->add_option("--method", o.method, "auto (recursion for Panjer counts), recursion, fourier or both");
  pc->add_option("--rel-tol", o.rel_tol, "stability scan tolerance");
  pc->add_option("--mass-floor", o.mass_floor, "conditioning mass below which l is undefined");

  auto* pcomp = app.add_subcommand("predict-component", "E[X_1^k | S_N = l] or E[X_1^k | S_{N+1} = l]");
  add_models(pcomp, o);
  add_lmax(pcomp, o);
  add_inversion(pcomp, o);
  add_output(pcomp, o);
  pcomp->add_option("--k", o.k, "moment order");
  pcomp->add_option("--method", o.method, "auto, recursion (plus_one only), fourier or both");
  pcomp->add_option("--mode", o.mode, "corrected, paper_literal or plus_one");
  pcomp->add_option("--rel-tol", o.rel_tol, "stability scan tolerance");
  pcomp->add_option("--mass-floor", o.mass_floor, "conditioning mass floor");

  auto* cont = app.add_subcommand("continuous-predict", "E[N^k | S_N <= x] for continuous severities");
  add_models(cont, o);
  add_output(cont, o);
  cont->add_option("--k", o.k, "moment order");
  cont->add_option("--x", o.xs, "evaluation points")->delimiter(',');
  cont->add_option("--x-min", o.x_min, "first grid point (default x-max / points)");
  cont->add_option("--x-max", o.x_max, "last grid point");
  cont->add_option("--x-points", o.x_points, "number of grid points");
  cont->add_option("--fst-T", o.fst_T, "integration limit (automatic when omitted)");
  cont->add_option("--fst-panels", o.fst_panels, "panels per oscillation period (>= 8)");
  cont->add_option("--fst-tol", o.fst_tol, "absolute tolerance");
  cont->add_option("--mass-floor", o.mass_floor, "conditioning mass floor");

  auto* shot = app.add_subcommand("shotnoise", "E[M(t, t+s] | M(t) = l] for the shot-noise process");
  add_inversion(shot, o);
  add_output(shot, o);
  shot->add_option("--spec", o.spec, "JSON spec {lambda, gamma, jump_law, t, s}");
  shot->add_option("--lambda", o.lambda, "arrival intensity");
  shot->add_option("--gamma", o.gamma, "jump intensity of each payout stream");
  shot->add_option("--jump", o.jump, "jump law, e.g. poisson:5");
  shot->add_option("--t", o.t, "observation horizon");
  shot->add_option("--s", o.s, "prediction horizon");
  shot->add_option("--lmax", o.lmax, "largest l")->required();
  shot->add_option("--target", o.target, "increment or count");
  shot->add_option("--mode", o.mode, "derived or paper_literal new-arrival term");
  shot->add_option("--mass-floor", o.mass_floor, "conditioning mass floor");

  auto* polya = app.add_subcommand("polya", "E[Z(t, t+s] | Z(t) = l] for the compound Polya process");
  add_inversion(polya, o);
  add_output(polya, o);
  polya->add_option("--spec", o.spec, "JSON spec {alpha, beta, intensity, severity, t, s}");
  polya->add_option("--alpha", o.alpha, "Gamma shape");
  polya->add_option("--beta", o.beta, "Gamma rate");
  polya->add_option("--intensity", o.intensity, "cumulative intensity, e.g. linear:1");
  polya->add_option("--severity", o.severity, "claim size law, e.g. geometric:0.25");
  polya->add_option("--t", o.t, "observation horizon");
  polya->add_option("--s", o.s, "prediction horizon");
  polya->add_option("--lmax", o.lmax, "largest l")->required();
  polya->add_option("--target", o.target, "increment or count");
  polya->add_option("--mass-floor", o.mass_floor, "conditioning mass floor");

  auto* val = app.add_subcommand("validate", "exact enumeration or Monte Carlo reports");
  add_models(val, o);
  add_inversion(val, o);
  val->add_option("--out", o.out, "output path; stdout if omitted");
  val->add_option("--target", o.validate_target,
                  "enumerate, continuous, random_sum_count, random_sum_component, "
                  "shotnoise_count, shotnoise_increment, polya_count or polya_increment")
      ->required();
  val->add_option("--k", o.k, "moment order");
  val->add_option("--mode", o.mode, "enumerate: count (default), component or plus_one");
  val->add_option("--samples", o.samples, "Monte Carlo sample count");
  val->add_option("--seed", o.seed, "master seed");
  val->add_option("--bins", o.bins, "largest l (bins 0..bins)");
  val->add_option("--probes", o.probes, "report only these l")->delimiter(',');
  val->add_option("--estimator", o.estimator, "binned or conditional");
  val->add_option("--substreams", o.substreams, "independent substreams");
  val->add_option("--threads", o.threads, "worker threads (0: hardware)");
  val->add_option("--n-max", o.n_max, "enumeration count cutoff (automatic when omitted)");
  val->add_option("--x", o.xs, "continuous: evaluation points")->delimiter(',');
  val->add_option("--spec", o.spec, "process spec file for shot-noise and Polya targets");
  val->add_option("--lambda", o.lambda, "shot-noise arrival intensity");
  val->add_option("--gamma", o.gamma, "shot-noise jump intensity");
  val->add_option("--jump", o.jump, "shot-noise jump law");
  val->add_option("--alpha", o.alpha, "Polya Gamma shape");
  val->add_option("--beta", o.beta, "Polya Gamma rate");
  val->add_option("--intensity", o.intensity, "Polya cumulative intensity");
  val->add_option("--t", o.t, "observation horizon");
  val->add_option("--s", o.s, "prediction horizon");
  val->add_option("--mass-floor", o.mass_floor, "conditioning mass floor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (aggregate->parsed()) return cmd_aggregate(o, out, err);
    if (pc->parsed()) return cmd_predict_count(o, out, err);
    if (pcomp->parsed()) return cmd_predict_component(o, out, err);
    if (cont->parsed()) return cmd_continuous(o, out, err);
    if (shot->parsed()) return cmd_shotnoise(o, out, err);
    if (polya->parsed()) return cmd_polya(o, out, err);
    if (val->parsed()) return cmd_validate(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  err << "usage error: no subcommand\n";
  return kExitUsage;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace rsum
