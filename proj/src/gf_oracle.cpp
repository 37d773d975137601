#include "mil/gf_oracle.hpp"

#include "mil/quadrature.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mil {

Vector gf_rhs(const Vector& w, int P, int L, bool include_higher_order) {
  if (P < 1 || P > w.size()) throw std::invalid_argument("gf_rhs: need 1 <= P <= d");
  if (L < 2) throw std::invalid_argument("gf_rhs: need L >= 2");
  const auto head = w.head(P);
  double drift = head.sum();
  if (include_higher_order) drift += L * head.array().pow(L).sum();
  Vector out = -4.0 * drift * w;
  for (int k = 0; k < P; ++k) {
    double growth = 1.0;
    if (include_higher_order) growth += L * std::pow(w(k), L - 1);
    out(k) += 4.0 * growth * w(k);
  }
  return out;
}

std::vector<FlowState> integrate(const Vector& w0, int P, int L, double tau_max, double dt,
                                 bool include_higher_order, long record_every) {
  if (!(dt > 0.0) || !(tau_max >= 0.0)) throw std::invalid_argument("integrate: need dt > 0 and tau_max >= 0");
  if (record_every < 1) throw std::invalid_argument("integrate: record_every must be >= 1");
  if ((w0.array() < 0.0).any()) throw std::invalid_argument("integrate: w0 must be nonnegative");
  const long steps = static_cast<long>(std::ceil(tau_max / dt - 1e-9));

  std::vector<FlowState> out;
  Vector w = w0 / w0.sum();
  out.push_back({w, 0.0});
  for (long s = 1; s <= steps; ++s) {
    const double h = std::min(dt, tau_max - (s - 1) * dt);
    const Vector k1 = gf_rhs(w, P, L, include_higher_order);
    const Vector k2 = gf_rhs(w + 0.5 * h * k1, P, L, include_higher_order);
    const Vector k3 = gf_rhs(w + 0.5 * h * k2, P, L, include_higher_order);
    const Vector k4 = gf_rhs(w + h * k3, P, L, include_higher_order);
    w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double lowest = w.minCoeff();
    if (lowest < -1e-10)
      throw IntegratorFailure("integrate: coordinate fell to " + std::to_string(lowest) + " at step " +
                              std::to_string(s));
    w = w.cwiseMax(0.0);
    w /= w.sum();
    if (s % record_every == 0 || s == steps) out.push_back({w, s == steps ? tau_max : s * dt});
  }
  return out;
}

double flow_norm_ratio(const Vector& w, int P) {
  const double head = w.head(P).sum();
  const double tail = w.tail(w.size() - P).sum();
  return tail > 0.0 ? head / tail : std::numeric_limits<double>::infinity();
}

namespace {

template <class F>
std::optional<double> first_crossing(const std::vector<FlowState>& traj, double level, F value) {
  if (traj.empty()) return std::nullopt;
  double prev = value(traj.front().w);
  if (prev >= level) return traj.front().tau;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double cur = value(traj[i].w);
    if (cur >= level) {
      const double t0 = traj[i - 1].tau;
      const double t1 = traj[i].tau;
      if (!std::isfinite(cur)) return t1;
      return t0 + (level - prev) / (cur - prev) * (t1 - t0);
    }
    prev = cur;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> norm_ratio_crossing(const std::vector<FlowState>& traj, int P, double level) {
  return first_crossing(traj, level, [P](const Vector& w) { return flow_norm_ratio(w, P); });
}

std::optional<double> coordinate_crossing(const std::vector<FlowState>& traj, int index, double level) {
  return first_crossing(traj, level, [index](const Vector& w) { return w(index); });
}

double stage2_rate_constant(int L, double c_gap) {
  if (L < 2 || !(c_gap > 0.0)) throw std::invalid_argument("stage2_rate_constant: need L >= 2 and c_gap > 0");
  const double one_plus = std::pow(1.0 + 0.5 * c_gap, L - 1);
  return (one_plus - 1.0) / one_plus;
}

double stage2_escape_time(double w1_0, int L, double c_L) {
  if (!(w1_0 > 0.0 && w1_0 <= 0.75)) throw std::invalid_argument("stage2_escape_time: need w1_0 in (0, 3/4]");
  if (L < 2 || !(c_L > 0.0)) throw std::invalid_argument("stage2_escape_time: need L >= 2 and c_L > 0");
  if (w1_0 == 0.75) return 0.0;
  // tau = int dw / (c L w^L) = int_{log w0}^{log 3/4} e^{(1-L)u} du / (c L)
  const QuadratureRule rule = simpson(std::log(w1_0), std::log(0.75), 2000);
  double tau = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) tau += rule.weights[i] * std::exp((1.0 - L) * rule.nodes[i]);
  return tau / (c_L * L);
}

double stage2_escape_time_closed_form(double w1_0, int L, double c_L) {
  return (std::pow(w1_0, 1.0 - L) - std::pow(0.75, 1.0 - L)) / (c_L * L * (L - 1.0));
}

}  // namespace mil
