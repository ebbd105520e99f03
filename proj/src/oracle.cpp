// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <variant>

#include "rsum/errors.hpp"

namespace rsum {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using Rng = std::mt19937_64;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Ratio bound on sum_{m > n} m^k q_m. Infinite when the ratio bound is not
// below one yet.
double tail_bound_at(const CountModel& count, int k, int n) {
  return std::visit(
      Overloaded{
          [&](const count::CustomPmf& m) -> double {
            if (n + 1 >= static_cast<int>(m.pmf.size())) return count.missing_mass();
            double tail = count.missing_mass();
            for (std::size_t i = n + 1; i < m.pmf.size(); ++i) tail += ipow(double(i), k) * m.pmf[i];
            return tail;
          },
          [&](const count::Binomial& m) -> double {
            double tail = 0.0;
            for (int i = n + 1; i <= m.n; ++i) tail += ipow(i, k) * count_pmf(count, i);
            return tail;
          },
          [&](const auto&) -> double {
            double limit = 0.0;
            if (const auto* nb = std::get_if<count::NegativeBinomial>(&count.kind())) {
              limit = 1.0 - nb->p;
            } else if (const auto* mg = std::get_if<count::MixedPoissonGamma>(&count.kind())) {
              limit = mg->intensity / (mg->beta + mg->intensity);
            }
            const double t1 = ipow(n + 1, k) * count_pmf(count, n + 1);
            const double t2 = ipow(n + 2, k) * count_pmf(count, n + 2);
            if (t1 == 0.0) return 0.0;
            const double rho =
                std::max(t2 / t1, limit * ipow(double(n + 2) / double(n + 1), k));
            if (rho >= 1.0) return std::numeric_limits<double>::infinity();
            return t1 / (1.0 - rho);
          },
      },
      count.kind());
}

}  // namespace

std::string to_string(EnumerationTarget target) {
  switch (target) {
    case EnumerationTarget::count_moment: return "count_moment";
    case EnumerationTarget::component_moment: return "component_moment";
    case EnumerationTarget::component_moment_plus: return "component_moment_plus";
  }
  return "unknown";
}

TailCertificate certify_count_tail(const CountModel& count, int k, double tol) {
  if (k < 0) throw DomainError("certify_count_tail: k must be nonnegative");
  if (const auto* c = std::get_if<count::CustomPmf>(&count.kind())) {
    TailCertificate cert;
    cert.n_max = static_cast<int>(c->pmf.size()) - 1;
    cert.count_tail = count.missing_mass();
    cert.tolerance = tol;
    return cert;
  }
  if (const auto* b = std::get_if<count::Binomial>(&count.kind())) {
    return TailCertificate{b->n, 0.0, 0.0, tol};
  }
  // Start past the mean, where the ratio bound can take effect.
  int n = std::max(0, static_cast<int>(count_moment(count, 1)));
  for (; n <= kEnumerationMaxCount; ++n) {
    const double bound = tail_bound_at(count, k, n);
    if (bound < tol) return TailCertificate{n, bound, 0.0, tol};
  }
  throw CertificationError("certify_count_tail: no n_max below " +
                           std::to_string(kEnumerationMaxCount) + " certifies " +
                           count.describe());
}

OracleReport enumerate_restricted(const CountModel& count, const SeverityModel& severity, int k,
                                  int ell_max, std::optional<int> n_max, EnumerationTarget target,
                                  double tol) {
  if (k < 0) throw DomainError("enumerate_restricted: k must be nonnegative");
  if (ell_max < 0) throw DomainError("enumerate_restricted: l_max must be nonnegative");
  if (!severity.is_discrete()) {
    throw DomainError("enumerate_restricted: severity " + severity.describe() +
                      " is not integer-valued");
  }
  const int weight_order = target == EnumerationTarget::count_moment ? k : 0;
  TailCertificate cert;
  if (n_max) {
    if (*n_max < 0) throw DomainError("enumerate_restricted: n_max must be nonnegative");
    cert.n_max = *n_max;
    cert.count_tail = tail_bound_at(count, weight_order, *n_max);
    cert.tolerance = tol;
  } else {
    cert = certify_count_tail(count, weight_order, tol);
  }
  cert.severity_tail = severity.missing_mass();
  if (!(cert.count_tail < tol)) {
    throw CertificationError("enumerate_restricted: count tail beyond n_max = " +
                             std::to_string(cert.n_max) + " is " +
                             std::to_string(cert.count_tail) + ", above " + std::to_string(tol));
  }

  const Eigen::VectorXd p = severity_pmf_table(severity, ell_max);
  const Eigen::VectorXd q = count_pmf_table(count, cert.n_max);
  Eigen::VectorXd power = Eigen::VectorXd::Zero(ell_max + 1);  // P(S_n = .)
  power[0] = 1.0;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(ell_max + 1);
  Eigen::VectorXd next(ell_max + 1);
  for (int n = 0; n <= cert.n_max; ++n) {
    switch (target) {
      case EnumerationTarget::count_moment:
        acc += (ipow(n, k) * q[n]) * power;
        break;
      case EnumerationTarget::component_moment_plus:
        acc += q[n] * power;  // law of S_N
        break;
      case EnumerationTarget::component_moment:
        if (n + 1 <= cert.n_max) acc += q[n + 1] * power;  // sum_n q_{n+1} P(S_n = .)
        break;
    }
    for (int l = 0; l <= ell_max; ++l) {
      next[l] = p.head(l + 1).dot(power.head(l + 1).reverse());
    }
    power.swap(next);
  }

  Eigen::VectorXd values = acc;
  if (target != EnumerationTarget::count_moment) {
    Eigen::VectorXd w(ell_max + 1);
    for (int j = 0; j <= ell_max; ++j) w[j] = ipow(j, k) * p[j];
    for (int l = 0; l <= ell_max; ++l) values[l] = w.head(l + 1).dot(acc.head(l + 1).reverse());
    if (target == EnumerationTarget::component_moment) {
      values[0] += q[0] * (k == 0 ? 1.0 : severity_moment(severity, k));
    }
  }

  OracleReport rep;
  rep.target = to_string(target) + " k=" + std::to_string(k) + ", " + count.describe() + " x " +
               severity.describe();
  rep.exact = true;
  rep.estimator = "enumeration";
  rep.grid.resize(ell_max + 1);
  rep.values.resize(ell_max + 1);
  for (int l = 0; l <= ell_max; ++l) {
    rep.grid[l] = l;
    rep.values[l] = values[l];
  }
  rep.certificate = cert;
  return rep;
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

class CountSampler {
 public:
  explicit CountSampler(const CountModel& model) : model_(model) {
    if (const auto* c = std::get_if<count::CustomPmf>(&model.kind())) {
      custom_ = std::discrete_distribution<long>(c->pmf.begin(), c->pmf.end());
    }
  }

  long operator()(Rng& rng) {
    return std::visit(
        Overloaded{
            [&](const count::Poisson& m) { return poisson(m.lambda, rng); },
            [&](const count::NegativeBinomial& m) {
              std::gamma_distribution<double> g(m.r, (1.0 - m.p) / m.p);
              return poisson(g(rng), rng);
            },
            [&](const count::Binomial& m) {
              return static_cast<long>(std::binomial_distribution<int>(m.n, m.p)(rng));
            },
            [&](const count::MixedPoissonGamma& m) {
              std::gamma_distribution<double> g(m.alpha, 1.0 / m.beta);
              return poisson(g(rng) * m.intensity, rng);
            },
            [&](const count::CustomPmf&) { return custom_(rng); },
        },
        model_.kind());
  }

  static long poisson(double mean, Rng& rng) {
    if (!(mean > 0.0)) return 0;
    return std::poisson_distribution<long>(mean)(rng);
  }

 private:
  CountModel model_;
  std::discrete_distribution<long> custom_;
};

class SeveritySampler {
 public:
  explicit SeveritySampler(const SeverityModel& model) : model_(model) {
    if (const auto* c = std::get_if<severity::CustomPmf>(&model.kind())) {
      custom_ = std::discrete_distribution<long>(c->pmf.begin(), c->pmf.end());
    }
    if (std::holds_alternative<severity::CustomCf>(model.kind())) {
      throw DomainError("Monte Carlo: no sampler for severity " + model.describe());
    }
  }

  double operator()(Rng& rng) {
    return std::visit(
        Overloaded{
            [&](const severity::Poisson& m) {
              return static_cast<double>(CountSampler::poisson(m.gamma, rng));
            },
            [&](const severity::Geometric& m) {
              return static_cast<double>(std::geometric_distribution<long>(m.p)(rng));
            },
            [&](const severity::Degenerate& m) { return m.c; },
            [&](const severity::CustomPmf&) { return static_cast<double>(custom_(rng)); },
            [&](const severity::Exponential& m) {
              return std::exponential_distribution<double>(m.rate)(rng);
            },
            [&](const severity::Gamma& m) {
              return std::gamma_distribution<double>(m.shape, 1.0 / m.rate)(rng);
            },
            [&](const severity::CustomCf&) { return 0.0; },
        },
        model_.kind());
  }

  // Sum of n iid draws.
  double sum(long n, Rng& rng) {
    if (n <= 0) return 0.0;
    if (const auto* p = std::get_if<severity::Poisson>(&model_.kind())) {
      return static_cast<double>(CountSampler::poisson(p->gamma * static_cast<double>(n), rng));
    }
    if (const auto* d = std::get_if<severity::Degenerate>(&model_.kind())) {
      return d->c * static_cast<double>(n);
    }
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += (*this)(rng);
    return s;
  }

 private:
  SeverityModel model_;
  std::discrete_distribution<long> custom_;
};

struct Draw {
  long ell = -1;
  double y = 0.0;
  long n = 0;  // count whose severities sum to the conditioning value
};

struct Accumulator {
  std::vector<long> count;
  std::vector<double> sy, syy;
  // conditional estimator sums
  std::vector<double> sw, swy, sww, swywy, swwy;

  explicit Accumulator(std::size_t bins)
      : count(bins, 0), sy(bins, 0.0), syy(bins, 0.0), sw(bins, 0.0), swy(bins, 0.0),
        sww(bins, 0.0), swywy(bins, 0.0), swwy(bins, 0.0) {}

  void merge(const Accumulator& o) {
    for (std::size_t i = 0; i < count.size(); ++i) {
      count[i] += o.count[i];
      sy[i] += o.sy[i];
      syy[i] += o.syy[i];
      sw[i] += o.sw[i];
      swy[i] += o.swy[i];
      sww[i] += o.sww[i];
      swywy[i] += o.swywy[i];
      swwy[i] += o.swwy[i];
    }
  }
};

std::seed_seq substream_seed(std::uint64_t seed, int stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                       static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream)};
}

long substream_samples(long samples, int substreams, int stream) {
  const long base = samples / substreams;
  return base + (stream < samples % substreams ? 1 : 0);
}

// Runs fn(stream, samples) for every substream on a small thread pool and
// returns the per-stream results in stream order.
template <typename Result, typename Fn>
std::vector<Result> run_substreams(int substreams, int threads, long samples, Fn fn) {
  std::vector<std::optional<Result>> results(static_cast<std::size_t>(substreams));
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, substreams);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  auto work = [&](int w) {
    try {
      for (int s = w; s < substreams; s += workers) {
        results[s].emplace(fn(s, substream_samples(samples, substreams, s)));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<Result> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

// P(S_n = l) for l <= ell_max, extended on demand.
class ConvolutionPowers {
 public:
  ConvolutionPowers(const SeverityModel& severity, int ell_max)
      : p_(severity_pmf_table(severity, ell_max)) {
    Eigen::VectorXd first = Eigen::VectorXd::Zero(ell_max + 1);
    first[0] = 1.0;
    powers_.push_back(std::move(first));
  }

  const Eigen::VectorXd& operator[](long n) {
    while (static_cast<long>(powers_.size()) <= n) {
      const Eigen::VectorXd& last = powers_.back();
      Eigen::VectorXd next(last.size());
      for (Eigen::Index l = 0; l < last.size(); ++l) {
        next[l] = p_.head(l + 1).dot(last.head(l + 1).reverse());
      }
      powers_.push_back(std::move(next));
    }
    return powers_[static_cast<std::size_t>(n)];
  }

 private:
  Eigen::VectorXd p_;
  std::vector<Eigen::VectorXd> powers_;
};

}  // namespace

std::string to_string(McTarget target) {
  switch (target) {
    case McTarget::random_sum_count: return "random_sum_count";
    case McTarget::random_sum_component: return "random_sum_component";
    case McTarget::shotnoise_count: return "shotnoise_count";
    case McTarget::shotnoise_increment: return "shotnoise_increment";
    case McTarget::polya_count: return "polya_count";
    case McTarget::polya_increment: return "polya_increment";
  }
  return "unknown";
}

McTarget mc_target_from_string(const std::string& name) {
  for (McTarget t : {McTarget::random_sum_count, McTarget::random_sum_component,
                     McTarget::shotnoise_count, McTarget::shotnoise_increment,
                     McTarget::polya_count, McTarget::polya_increment}) {
    if (to_string(t) == name) return t;
  }
  throw DomainError("unknown Monte Carlo target '" + name + "'");
}

OracleReport mc_conditional(McTarget target, const McModel& model, const McConfig& config) {
  if (config.samples < 10000) throw DomainError("mc_conditional: at least 10^4 samples required");
  if (config.substreams < 1) throw DomainError("mc_conditional: substreams must be >= 1");
  if (config.ell_max < 0) throw DomainError("mc_conditional: l_max must be nonnegative");

  std::vector<int> probes = config.probes;
  if (probes.empty()) {
    probes.resize(config.ell_max + 1);
    for (int l = 0; l <= config.ell_max; ++l) probes[l] = l;
  }
  std::vector<int> index(config.ell_max + 1, -1);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (probes[i] < 0 || probes[i] > config.ell_max) {
      throw DomainError("mc_conditional: probe " + std::to_string(probes[i]) +
                        " outside [0, l_max]");
    }
    index[probes[i]] = static_cast<int>(i);
  }

  const bool conditional = config.estimator == McEstimator::conditional;
  std::string what;
  // The severity whose convolution powers give P(conditioning value | n).
  std::optional<SeverityModel> conditioning_severity;

  switch (target) {
    case McTarget::random_sum_count:
    case McTarget::random_sum_component:
      if (!model.count || !model.severity) {
        throw DomainError("mc_conditional: random-sum targets need count and severity");
      }
      if (!model.severity->is_discrete()) {
        throw DomainError("mc_conditional: conditioning on S_N = l needs a discrete severity");
      }
      if (model.k < 0) throw DomainError("mc_conditional: k must be nonnegative");
      if (conditional && target == McTarget::random_sum_component) {
        throw DomainError("mc_conditional: the conditional estimator needs a target that "
                          "depends on the count only");
      }
      conditioning_severity = *model.severity;
      what = to_string(target) + " k=" + std::to_string(model.k) + ", " +
             model.count->describe() + " x " + model.severity->describe();
      break;
    case McTarget::shotnoise_count:
    case McTarget::shotnoise_increment:
      if (!model.shotnoise) throw DomainError("mc_conditional: shot-noise target needs a spec");
      model.shotnoise->validate();
      if (conditional) {
        throw DomainError("mc_conditional: the conditional estimator is not available for "
                          "shot-noise targets");
      }
      what = to_string(target);
      break;
    case McTarget::polya_count:
    case McTarget::polya_increment:
      if (!model.polya) throw DomainError("mc_conditional: Polya target needs a spec");
      model.polya->validate();
      conditioning_severity = model.polya->severity;
      what = to_string(target);
      break;
  }

  auto stream_fn = [&](int stream, long n_samples) {
    auto seq = substream_seed(config.seed, stream);
    Rng rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Accumulator acc(probes.size());
    std::optional<CountSampler> count_sampler;
    std::optional<SeveritySampler> sev;
    std::optional<ConvolutionPowers> powers;
    if (model.count) count_sampler.emplace(*model.count);
    if (target == McTarget::random_sum_count || target == McTarget::random_sum_component) {
      sev.emplace(*model.severity);
    } else if (model.shotnoise && (target == McTarget::shotnoise_count ||
                                   target == McTarget::shotnoise_increment)) {
      sev.emplace(model.shotnoise->jump_law);
    } else if (model.polya) {
      sev.emplace(model.polya->severity);
    }
    if (conditional) powers.emplace(*conditioning_severity, config.ell_max);

    auto draw = [&]() -> Draw {
      Draw d;
      switch (target) {
        case McTarget::random_sum_count: {
          d.n = (*count_sampler)(rng);
          d.y = ipow(static_cast<double>(d.n), model.k);
          if (!conditional) d.ell = std::llround(sev->sum(d.n, rng));
          break;
        }
        case McTarget::random_sum_component: {
          d.n = (*count_sampler)(rng);
          const double x1 = (*sev)(rng);
          d.y = ipow(x1, model.k);
          d.ell = std::llround((d.n >= 1 ? x1 : 0.0) + sev->sum(d.n - 1, rng));
          break;
        }
        case McTarget::shotnoise_count:
        case McTarget::shotnoise_increment: {
          const ShotNoiseSpec& sp = *model.shotnoise;
          // Payout streams are compound Poisson with a common jump law, so
          // their total is one compound Poisson with the summed intensity.
          const long n = CountSampler::poisson(sp.lambda * sp.t, rng);
          double ages = 0.0;
          for (long i = 0; i < n; ++i) ages += sp.t * unif(rng);
          const double m = sev->sum(CountSampler::poisson(sp.gamma * ages, rng), rng);
          double inc = 0.0;
          if (target == McTarget::shotnoise_increment) {
            inc = sev->sum(CountSampler::poisson(sp.gamma * sp.s * static_cast<double>(n), rng), rng);
            const long fresh = CountSampler::poisson(sp.lambda * sp.s, rng);
            double durations = 0.0;
            for (long i = 0; i < fresh; ++i) durations += sp.s * unif(rng);
            inc += sev->sum(CountSampler::poisson(sp.gamma * durations, rng), rng);
          }
          d.n = n;
          d.ell = std::llround(m);
          d.y = target == McTarget::shotnoise_count ? static_cast<double>(n) : inc;
          break;
        }
        case McTarget::polya_count:
        case McTarget::polya_increment: {
          const PolyaSpec& sp = *model.polya;
          const double lt = sp.cumulative_intensity(sp.t);
          const double dl = sp.cumulative_intensity(sp.t + sp.s) - lt;
          const double theta = std::gamma_distribution<double>(sp.alpha, 1.0 / sp.beta)(rng);
          d.n = CountSampler::poisson(theta * lt, rng);
          if (target == McTarget::polya_count) {
            d.y = static_cast<double>(d.n);
          } else {
            d.y = sev->sum(CountSampler::poisson(theta * dl, rng), rng);
          }
          if (!conditional) d.ell = std::llround(sev->sum(d.n, rng));
          break;
        }
      }
      return d;
    };

    for (long i = 0; i < n_samples; ++i) {
      const Draw d = draw();
      if (conditional) {
        const Eigen::VectorXd& w = (*powers)[d.n];
        for (std::size_t b = 0; b < probes.size(); ++b) {
          const double wb = w[probes[b]];
          if (wb == 0.0) continue;
          const double a = wb * d.y;
          ++acc.count[b];
          acc.sw[b] += wb;
          acc.swy[b] += a;
          acc.sww[b] += wb * wb;
          acc.swywy[b] += a * a;
          acc.swwy[b] += wb * a;
        }
      } else {
        if (d.ell < 0 || d.ell > config.ell_max) continue;
        const int b = index[d.ell];
        if (b < 0) continue;
        ++acc.count[b];
        acc.sy[b] += d.y;
        acc.syy[b] += d.y * d.y;
      }
    }
    return acc;
  };

  const auto parts =
      run_substreams<Accumulator>(config.substreams, config.threads, config.samples, stream_fn);
  Accumulator total(probes.size());
  for (const auto& part : parts) total.merge(part);

  OracleReport rep;
  rep.target = what;
  rep.exact = false;
  rep.estimator = conditional ? "conditional" : "binned";
  rep.samples = config.samples;
  rep.seed = config.seed;
  const std::size_t nb = probes.size();
  rep.grid.resize(nb);
  rep.values.assign(nb, std::numeric_limits<double>::quiet_NaN());
  rep.std_errors.assign(nb, std::numeric_limits<double>::quiet_NaN());
  rep.bin_counts.assign(nb, 0);
  rep.empty.assign(nb, true);
  const double N = static_cast<double>(config.samples);
  for (std::size_t b = 0; b < nb; ++b) {
    rep.grid[b] = probes[b];
    rep.bin_counts[b] = total.count[b];
    if (conditional) {
      if (total.sw[b] <= 0.0) continue;
      rep.empty[b] = false;
      const double abar = total.swy[b] / N;
      const double bbar = total.sw[b] / N;
      const double r = abar / bbar;
      const double va = total.swywy[b] / N - abar * abar;
      const double vb = total.sww[b] / N - bbar * bbar;
      const double cov = total.swwy[b] / N - abar * bbar;
      const double v = std::max(0.0, va - 2.0 * r * cov + r * r * vb) / (N * bbar * bbar);
      rep.values[b] = r;
      rep.std_errors[b] = std::sqrt(v);
    } else {
      const long c = total.count[b];
      if (c == 0) continue;
      rep.empty[b] = false;
      const double mean = total.sy[b] / c;
      rep.values[b] = mean;
      if (c >= 2) {
        const double var = std::max(0.0, (total.syy[b] - c * mean * mean) / (c - 1));
        rep.std_errors[b] = std::sqrt(var / c);
      }
    }
  }
  return rep;
}

ContinuousOracleReport continuous_oracle(const CountModel& count, const SeverityModel& severity,
                                         int k, const std::vector<double>& x_grid, long samples,
                                         std::uint64_t seed, int substreams) {
  if (samples < 100000) throw DomainError("continuous_oracle: at least 10^5 samples required");
  if (k < 0) throw DomainError("continuous_oracle: k must be nonnegative");
  if (substreams < 1) throw DomainError("continuous_oracle: substreams must be >= 1");
  std::vector<double> xs = x_grid;
  const std::size_t nx = xs.size();

  struct Sums {
    std::vector<double> c1, c2, x1, x2;
  };
  auto stream_fn = [&](int stream, long n_samples) {
    auto seq = substream_seed(seed, stream);
    Rng rng(seq);
    CountSampler cs(count);
    SeveritySampler ss(severity);
    Sums s{std::vector<double>(nx, 0.0), std::vector<double>(nx, 0.0),
           std::vector<double>(nx, 0.0), std::vector<double>(nx, 0.0)};
    for (long i = 0; i < n_samples; ++i) {
      const long n = cs(rng);
      const double first = ss(rng);
      const double total = (n >= 1 ? first : 0.0) + ss.sum(n - 1, rng);
      const double yn = ipow(static_cast<double>(n), k);
      const double yx = ipow(first, k);
      for (std::size_t j = 0; j < nx; ++j) {
        if (total <= xs[j]) {
          s.c1[j] += yn;
          s.c2[j] += yn * yn;
          s.x1[j] += yx;
          s.x2[j] += yx * yx;
        }
      }
    }
    return s;
  };
  const auto parts = run_substreams<Sums>(substreams, 0, samples, stream_fn);

  ContinuousOracleReport rep;
  for (OracleReport* r : {&rep.count, &rep.component}) {
    r->exact = false;
    r->estimator = "plain";
    r->samples = samples;
    r->seed = seed;
    r->grid = xs;
    r->values.assign(nx, 0.0);
    r->std_errors.assign(nx, 0.0);
    r->empty.assign(nx, false);
  }
  rep.count.target = "E[N^" + std::to_string(k) + "; S_N <= x], " + count.describe() + " x " +
                     severity.describe();
  rep.component.target = "E[X_1^" + std::to_string(k) + "; S_N <= x], " + count.describe() +
                         " x " + severity.describe();
  const double N = static_cast<double>(samples);
  for (std::size_t j = 0; j < nx; ++j) {
    double c1 = 0, c2 = 0, x1 = 0, x2 = 0;
    for (const auto& p : parts) {
      c1 += p.c1[j];
      c2 += p.c2[j];
      x1 += p.x1[j];
      x2 += p.x2[j];
    }
    const double mc = c1 / N, mx = x1 / N;
    rep.count.values[j] = mc;
    rep.count.std_errors[j] = std::sqrt(std::max(0.0, c2 / N - mc * mc) / (N - 1.0));
    rep.component.values[j] = mx;
    rep.component.std_errors[j] = std::sqrt(std::max(0.0, x2 / N - mx * mx) / (N - 1.0));
  }
  return rep;
}

}  // namespace rsum
