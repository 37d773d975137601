#include "mil/gronwall.hpp"

#include "mil/rng.hpp"
#include "mil/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mil {

void GronwallSpec::validate() const {
  if (!(x0 > 0.0)) throw std::invalid_argument("GronwallSpec: x0 must be > 0");
  if (T < 1) throw std::invalid_argument("GronwallSpec: T must be >= 1");
  if (!(sigma_z >= 0.0) || !(Xi >= 0.0)) throw std::invalid_argument("GronwallSpec: noise scales must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("GronwallSpec: delta must lie in (0, 1)");
  if (!(delta_xi >= 0.0 && delta_xi < 1.0)) throw std::invalid_argument("GronwallSpec: delta_xi must lie in [0, 1)");
  if (kind != GronwallKind::zero_drift && !(alpha > 0.0)) throw std::invalid_argument("GronwallSpec: alpha must be > 0");
  if (kind == GronwallKind::polynomial && !(p > 1.0)) throw std::invalid_argument("GronwallSpec: p must be > 1");
  if (z_model == ZModel::weibull && !(weibull_c > 0.0)) throw std::invalid_argument("GronwallSpec: weibull_c must be > 0");
}

GronwallKind gronwall_kind_from_name(const std::string& name) {
  if (name == "linear") return GronwallKind::linear;
  if (name == "zero_drift") return GronwallKind::zero_drift;
  if (name == "polynomial") return GronwallKind::polynomial;
  throw std::invalid_argument("unknown recurrence kind: " + name);
}

std::string gronwall_kind_name(GronwallKind kind) {
  switch (kind) {
    case GronwallKind::linear: return "linear";
    case GronwallKind::zero_drift: return "zero_drift";
    case GronwallKind::polynomial: return "polynomial";
  }
  return "linear";
}

XiModel xi_model_from_name(const std::string& name) {
  if (name == "none") return XiModel::none;
  if (name == "uniform") return XiModel::uniform;
  if (name == "adversarial") return XiModel::adversarial;
  throw std::invalid_argument("unknown xi model: " + name);
}

std::string xi_model_name(XiModel model) {
  switch (model) {
    case XiModel::none: return "none";
    case XiModel::uniform: return "uniform";
    case XiModel::adversarial: return "adversarial";
  }
  return "none";
}

ZModel z_model_from_name(const std::string& name) {
  if (name == "none") return ZModel::none;
  if (name == "gaussian") return ZModel::gaussian;
  if (name == "rademacher") return ZModel::rademacher;
  if (name == "weibull") return ZModel::weibull;
  throw std::invalid_argument("unknown Z model: " + name);
}

std::string z_model_name(ZModel model) {
  switch (model) {
    case ZModel::none: return "none";
    case ZModel::gaussian: return "gaussian";
    case ZModel::rademacher: return "rademacher";
    case ZModel::weibull: return "weibull";
  }
  return "none";
}

ConditionReport check_conditions(const GronwallSpec& spec) {
  spec.validate();
  ConditionReport r;
  const double T = static_cast<double>(spec.T);
  const double s2 = spec.sigma_z * spec.sigma_z;
  switch (spec.kind) {
    case GronwallKind::linear:
      r.xi_bound = spec.x0 / (4.0 * T);
      r.sigma2_bound = spec.delta * spec.alpha * spec.x0 * spec.x0 / 16.0;
      break;
    case GronwallKind::polynomial:
      r.xi_bound = spec.x0 / (4.0 * T);
      r.sigma2_bound = spec.x0 * spec.x0 * spec.delta / (16.0 * T);
      break;
    case GronwallKind::zero_drift:
      r.xi_bound = std::numeric_limits<double>::infinity();
      r.sigma2_bound = std::numeric_limits<double>::infinity();
      r.radius = T * spec.Xi + std::sqrt(T * s2 / spec.delta);
      break;
  }
  r.xi_slack = r.xi_bound - spec.Xi;
  r.sigma2_slack = r.sigma2_bound - s2;
  r.satisfied = r.xi_slack >= 0.0 && r.sigma2_slack >= 0.0;
  return r;
}

namespace {

double draw_z(const GronwallSpec& spec, double sigma, StreamRng& rng) {
  switch (spec.z_model) {
    case ZModel::none: return 0.0;
    case ZModel::gaussian: return sigma * rng.normal();
    case ZModel::rademacher: return rng.bernoulli(0.5) ? sigma : -sigma;
    case ZModel::weibull: {
      // E|Z|^2 = lambda^2 Gamma(1 + 2/c)
      const double lambda = sigma / std::sqrt(std::tgamma(1.0 + 2.0 / spec.weibull_c));
      const double mag = lambda * std::pow(-std::log(rng.uniform_open0()), 1.0 / spec.weibull_c);
      return rng.bernoulli(0.5) ? mag : -mag;
    }
  }
  return 0.0;
}

double draw_xi(const GronwallSpec& spec, double bound, StreamRng& rng) {
  double xi = 0.0;
  switch (spec.xi_model) {
    case XiModel::none: return 0.0;
    case XiModel::uniform: xi = bound * (2.0 * rng.uniform() - 1.0); break;
    case XiModel::adversarial: xi = -bound; break;
  }
  if (spec.delta_xi > 0.0 && rng.bernoulli(spec.delta_xi)) xi *= spec.fail_multiplier;
  return xi;
}

constexpr double kBlowUp = 1e300;

}  // namespace

GronwallPath simulate(const GronwallSpec& spec, std::uint64_t seed, std::uint64_t trial) {
  spec.validate();
  const double inf = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::size_t>(spec.T) + 1;
  GronwallPath path;
  path.x.assign(n, 0.0);
  path.lower.assign(n, -inf);
  path.upper.assign(n, inf);

  const double T = static_cast<double>(spec.T);
  const double radius = T * spec.Xi + std::sqrt(T * spec.sigma_z * spec.sigma_z / spec.delta);
  double x = spec.x0;
  double det = spec.x0;        // (1+alpha)^t x0 for the linear kind
  double hat = 0.5 * spec.x0;  // lower envelope for the polynomial kind
  double growth = 1.0;         // (1+alpha)^t, frozen after exit when state coupled
  StreamRng rng(seed, StreamTag::gronwall_trial, trial);

  auto envelope = [&](std::size_t t) {
    switch (spec.kind) {
      case GronwallKind::linear:
        path.lower[t] = 0.5 * det;
        path.upper[t] = 1.5 * det;
        break;
      case GronwallKind::zero_drift:
        path.lower[t] = spec.x0 - radius;
        path.upper[t] = spec.x0 + radius;
        break;
      case GronwallKind::polynomial:
        path.lower[t] = hat;
        break;
    }
  };

  path.x[0] = x;
  envelope(0);
  for (std::size_t t = 1; t < n; ++t) {
    double xi_bound = spec.Xi;
    double sigma = spec.sigma_z;
    if (spec.state_coupled && spec.kind == GronwallKind::linear) {
      xi_bound *= growth;
      sigma *= std::sqrt(growth);
    }
    const double xi = draw_xi(spec, xi_bound, rng);
    const double z = draw_z(spec, sigma, rng);
    switch (spec.kind) {
      case GronwallKind::linear:
        x = x + spec.alpha * x + xi + z;
        det *= 1.0 + spec.alpha;
        break;
      case GronwallKind::zero_drift:
        x = x + xi + z;
        break;
      case GronwallKind::polynomial:
        if (!path.blew_up) x = x + spec.alpha * std::pow(std::max(x, 0.0), spec.p) + xi + z;
        if (!(std::abs(x) < kBlowUp)) {
          path.blew_up = true;
          x = inf;
        }
        hat = hat + spec.alpha * std::pow(hat, spec.p);
        if (!(hat < kBlowUp)) hat = inf;
        break;
    }
    path.x[t] = x;
    envelope(t);
    const bool inside = x >= path.lower[t] && x <= path.upper[t];
    if (path.exit_step < 0 && !inside) path.exit_step = static_cast<long>(t);
    if (path.exit_step < 0) growth *= 1.0 + spec.alpha;
  }
  return path;
}

EnvelopeReport verify_envelope(const GronwallSpec& spec, long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("verify_envelope: trials must be positive");
  EnvelopeReport r;
  r.conditions = check_conditions(spec);
  r.condition_satisfied = r.conditions.satisfied;
  r.trials = trials;
  for (long i = 0; i < trials; ++i)
    if (simulate(spec, seed, static_cast<std::uint64_t>(i)).exit_step < 0) ++r.stays;
  r.stay_fraction = static_cast<double>(r.stays) / static_cast<double>(trials);
  r.stay_se = binomial_se(r.stay_fraction, trials);
  r.theoretical_floor = 1.0 - static_cast<double>(spec.T) * spec.delta_xi - spec.delta;
  r.pass = r.stay_fraction >= r.theoretical_floor - 2.0 * r.stay_se;
  return r;
}

long poly_hitting_time(double x0, double alpha, double p, double target) {
  if (!(x0 > 0.0) || !(alpha > 0.0) || !(p > 1.0)) throw std::invalid_argument("poly_hitting_time: need x0, alpha > 0, p > 1");
  long steps = 0;
  double x = x0;
  while (x < target) {
    x += alpha * std::pow(x, p);
    ++steps;
  }
  return steps;
}

double poly_hitting_constant(int p) {
  switch (p) {
    case 2: return 1.05;
    case 3: return 0.55;
    default: throw std::invalid_argument("poly_hitting_constant: only p = 2 and p = 3 are calibrated");
  }
}

double freedman_bound(const TailParams& tail, double sigma_z, long T, double delta, double C_c) {
  if (!(tail.a >= 1.0) || !(tail.b > 0.0 && tail.b <= 1.0) || !(tail.c > 0.0 && tail.c <= 1.0))
    throw std::invalid_argument("freedman_bound: need a >= 1 and b, c in (0, 1]");
  if (!(sigma_z > 0.0) || T < 1 || !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("freedman_bound: need sigma_z > 0, T >= 1, delta in (0, 1)");
  const double Td = static_cast<double>(T);
  const double logterm = std::log(tail.a * Td / (tail.b * sigma_z * delta));
  const double inner = sigma_z * sigma_z + std::pow(tail.b, -2.0 / tail.c) +
                       std::pow(std::max(logterm, 0.0), 1.0 / tail.c) / std::pow(tail.b, 1.0 / tail.c);
  return C_c * std::sqrt(Td * inner * std::log(1.0 / delta));
}

FreedmanReport freedman_sum_check(const TailParams& tail, ZModel z_model, double sigma_z, double weibull_c, long T,
                                  double delta, long trials, std::uint64_t seed, double C_c) {
  if (trials < 1) throw std::invalid_argument("freedman_sum_check: trials must be positive");
  GronwallSpec spec;
  spec.z_model = z_model;
  spec.sigma_z = sigma_z;
  spec.weibull_c = weibull_c;
  std::vector<double> sums(static_cast<std::size_t>(trials));
  for (long i = 0; i < trials; ++i) {
    StreamRng rng(seed, StreamTag::gronwall_trial, static_cast<std::uint64_t>(i));
    double s = 0.0;
    for (long t = 0; t < T; ++t) s += draw_z(spec, sigma_z, rng);
    sums[static_cast<std::size_t>(i)] = std::abs(s);
  }
  FreedmanReport r;
  r.quantile = quantile(std::move(sums), 1.0 - delta);
  r.bound = freedman_bound(tail, sigma_z, T, delta, C_c);
  r.pass = r.quantile <= r.bound;
  return r;
}

}  // namespace mil
