#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mil {

enum class GronwallKind { linear, zero_drift, polynomial };

/// Bounded perturbation xi_t. `uniform` draws from [-Xi, Xi]; `adversarial`
/// always pushes down by Xi. With probability delta_xi the draw is multiplied
/// by fail_multiplier, which breaks the bound.
enum class XiModel { none, uniform, adversarial };

/// Martingale-difference noise Z_t with E Z_t^2 = sigma_z^2. Weibull draws have
/// |Z| ~ Weibull(shape weibull_c) and a random sign.
enum class ZModel { none, gaussian, rademacher, weibull };

struct GronwallSpec {
  GronwallKind kind = GronwallKind::linear;
  double alpha = 0.0;  // linear and polynomial
  double p = 2.0;      // polynomial only
  double x0 = 1.0;
  long T = 100;
  XiModel xi_model = XiModel::none;
  double Xi = 0.0;
  double delta_xi = 0.0;
  double fail_multiplier = 10.0;
  ZModel z_model = ZModel::gaussian;
  double sigma_z = 0.0;
  double weibull_c = 0.5;
  /// Linear kind: scale Xi by (1+alpha)^t and sigma_z^2 by (1+alpha)^t while
  /// the path is inside the envelope, frozen at the exit value afterwards.
  bool state_coupled = false;
  double delta = 0.1;  // envelope failure probability delta_P

  void validate() const;
};

GronwallKind gronwall_kind_from_name(const std::string& name);
std::string gronwall_kind_name(GronwallKind kind);
XiModel xi_model_from_name(const std::string& name);
std::string xi_model_name(XiModel model);
ZModel z_model_from_name(const std::string& name);
std::string z_model_name(ZModel model);

/// The kind's pair of hypotheses with slack (bound - value; >= 0 when met).
///   linear:      Xi <= x0/(4T),  sigma^2 <= delta alpha x0^2 / 16
///   polynomial:  Xi <= x0/(4T),  sigma^2 <= x0^2 delta / (16 T)
///   zero_drift:  no hypotheses; reports the radius T Xi + sqrt(T sigma^2 / delta)
struct ConditionReport {
  bool satisfied = false;
  double xi_bound = 0.0;
  double xi_slack = 0.0;
  double sigma2_bound = 0.0;
  double sigma2_slack = 0.0;
  double radius = 0.0;  // zero_drift only
};

ConditionReport check_conditions(const GronwallSpec& spec);

/// One path X_0..X_T with the envelope evaluated alongside.
struct GronwallPath {
  std::vector<double> x;
  std::vector<double> lower;  // envelope bounds per step; -inf / +inf when one-sided
  std::vector<double> upper;
  long exit_step = -1;        // first step outside the envelope, -1 if none
  bool blew_up = false;       // polynomial path overflowed; remaining entries are +inf
};

/// Simulates the recurrence for the given trial of `seed`.
GronwallPath simulate(const GronwallSpec& spec, std::uint64_t seed, std::uint64_t trial = 0);

struct EnvelopeReport {
  long trials = 0;
  long stays = 0;
  double stay_fraction = 0.0;
  double stay_se = 0.0;
  bool condition_satisfied = false;
  double theoretical_floor = 0.0;  // 1 - T delta_xi - delta
  bool pass = false;               // stay_fraction >= floor - 2 se
  ConditionReport conditions;
};

EnvelopeReport verify_envelope(const GronwallSpec& spec, long trials, std::uint64_t seed);

/// Steps of x <- x + alpha x^p needed to reach `target` from x0.
long poly_hitting_time(double x0, double alpha, double p, double target = 0.9);

/// Frozen K with poly_hitting_time(x0, alpha, p) <= K / (x0^{p-1} alpha), for p in {2, 3}.
double poly_hitting_constant(int p);

/// Tail parameters of P(|Z| >= s) <= a exp(-b s^c).
struct TailParams {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
};

/// C_c sqrt(T (sigma^2 + b^{-2/c} + log^{1/c}(a T / (b sigma delta)) / b^{1/c}) log(1/delta)).
double freedman_bound(const TailParams& tail, double sigma_z, long T, double delta, double C_c);

struct FreedmanReport {
  double quantile = 0.0;  // empirical (1 - delta) quantile of |sum Z_t|
  double bound = 0.0;
  bool pass = false;
};

/// The frozen C_c used by freedman_sum_check.
inline constexpr double kFreedmanConstant = 1.25;

FreedmanReport freedman_sum_check(const TailParams& tail, ZModel z_model, double sigma_z, double weibull_c, long T,
                                  double delta, long trials, std::uint64_t seed,
                                  double C_c = kFreedmanConstant);

}  // namespace mil
