#include "mil/hermite.hpp"

#include "mil/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mil {

namespace {

// h_{k+1} = (z h_k - sqrt(k) h_{k-1}) / sqrt(k+1), i.e. the He recurrence
// He_{k+1} = z He_k - k He_{k-1} rescaled by sqrt((k+1)!).
struct Recurrence {
  static constexpr int kMax = 256;
  std::array<double, kMax> inv_sqrt_next{};  // 1/sqrt(k+1)
  std::array<double, kMax> ratio{};          // sqrt(k)/sqrt(k+1)
  std::array<double, kMax + 1> sqrt_k{};

  Recurrence() {
    for (int k = 0; k < kMax; ++k) {
      inv_sqrt_next[k] = 1.0 / std::sqrt(k + 1.0);
      ratio[k] = std::sqrt(static_cast<double>(k)) / std::sqrt(k + 1.0);
    }
    for (int k = 0; k <= kMax; ++k) sqrt_k[k] = std::sqrt(static_cast<double>(k));
  }
};

const Recurrence& recurrence() {
  static const Recurrence table;
  return table;
}

double hermite_step(const Recurrence& r, int k, double z, double cur, double prev) noexcept {
  if (k < Recurrence::kMax) return z * cur * r.inv_sqrt_next[k] - r.ratio[k] * prev;
  return (z * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(k + 1.0);
}

}  // namespace

double hermite_eval(int l, double z) {
  if (l < 0) throw std::invalid_argument("hermite_eval: degree must be >= 0");
  if (l == 0) return 1.0;
  const Recurrence& r = recurrence();
  double prev = 1.0;
  double cur = z;
  for (int k = 1; k < l; ++k) {
    const double next = hermite_step(r, k, z, cur, prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

void hermite_all(int lmax, double z, std::span<double> out) {
  if (lmax < 0 || out.size() < static_cast<std::size_t>(lmax) + 1)
    throw std::invalid_argument("hermite_all: output span too small");
  const Recurrence& r = recurrence();
  out[0] = 1.0;
  if (lmax == 0) return;
  out[1] = z;
  for (int k = 1; k < lmax; ++k) out[k + 1] = hermite_step(r, k, z, out[k], out[k - 1]);
}

namespace {

// E[F(z) h_l(z)] for all l <= max_degree using an n-node rule suited to the link.
std::vector<double> project(const LinkSpec& link, int max_degree, int n) {
  std::vector<double> out(static_cast<std::size_t>(max_degree) + 1, 0.0);
  std::vector<double> hp(out.size());
  if (link.is_polynomial()) {
    const QuadratureRule rule = gauss_hermite_normal(n);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double z = rule.nodes[i];
      hermite_all(max_degree, z, hp);
      const double wf = rule.weights[i] * link.eval(z);
      for (std::size_t l = 0; l < out.size(); ++l) out[l] += wf * hp[l];
    }
    return out;
  }
  // E[|z| g(z)] = (2 pi)^{-1/2} int_0^inf (g(s) + g(-s)) e^{-u} du with s = sqrt(2u).
  std::vector<double> hm(out.size());
  const QuadratureRule rule = gauss_laguerre(n);
  const double scale = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = std::sqrt(2.0 * rule.nodes[i]);
    hermite_all(max_degree, s, hp);
    hermite_all(max_degree, -s, hm);
    for (std::size_t l = 0; l < out.size(); ++l) out[l] += scale * rule.weights[i] * (hp[l] + hm[l]);
  }
  return out;
}

}  // namespace

LinkSpec::LinkSpec(LinkKind kind, int order, int cap) : kind_(kind), order_(order), cap_(cap) {
  if (cap < 0) throw std::invalid_argument("LinkSpec: coefficient cap must be >= 0");
  coeffs_ = hermite_coeffs(*this, cap, cap);
  switch (kind_) {
    case LinkKind::hermite_pair: second_moment_ = 2.0; break;
    case LinkKind::h2_only: second_moment_ = 1.0; break;
    case LinkKind::abs_value: second_moment_ = 1.0; break;  // E z^2
  }
  double captured = 0.0;
  for (double c : coeffs_) captured += c * c;
  tail_mass_ = is_polynomial() && degree() <= cap_ ? 0.0 : std::max(0.0, second_moment_ - captured);
}

LinkSpec LinkSpec::hermite_pair(int L, int cap) {
  if (L < 2) throw std::invalid_argument("hermite_pair: L must be >= 2");
  return LinkSpec(LinkKind::hermite_pair, L, cap);
}

LinkSpec LinkSpec::h2_only(int cap) { return LinkSpec(LinkKind::h2_only, 1, cap); }

LinkSpec LinkSpec::abs_value(int cap) { return LinkSpec(LinkKind::abs_value, 2, cap); }

LinkSpec LinkSpec::from_name(const std::string& name, int L, int cap) {
  if (name == "h2_h2L") return hermite_pair(L, cap);
  if (name == "h2_only") return h2_only(cap);
  if (name == "abs") return abs_value(cap);
  throw std::invalid_argument("unknown link kind '" + name + "' (expected h2_h2L, h2_only or abs)");
}

std::string LinkSpec::name() const {
  switch (kind_) {
    case LinkKind::hermite_pair: return "h2_h2L";
    case LinkKind::h2_only: return "h2_only";
    case LinkKind::abs_value: return "abs";
  }
  return "?";
}

int LinkSpec::degree() const noexcept {
  switch (kind_) {
    case LinkKind::hermite_pair: return 2 * order_;
    case LinkKind::h2_only: return 2;
    case LinkKind::abs_value: return -1;
  }
  return -1;
}

void LinkSpec::eval_with_deriv(double z, double& value, double& slope) const noexcept {
  if (kind_ == LinkKind::abs_value) {
    value = std::abs(z);
    slope = z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
    return;
  }
  // h_2 = (z^2 - 1)/sqrt(2), h_2' = sqrt(2) z.
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  value = (z * z - 1.0) * inv_sqrt2;
  slope = 2.0 * inv_sqrt2 * z;
  if (kind_ == LinkKind::h2_only) return;
  const Recurrence& r = recurrence();
  const int top = 2 * order_;
  double prev = 1.0;
  double cur = z;
  for (int k = 1; k < top; ++k) {
    const double next = hermite_step(r, k, z, cur, prev);
    prev = cur;
    cur = next;
  }
  // h_top' = sqrt(top) h_{top-1}
  value += cur;
  slope += (top <= Recurrence::kMax ? r.sqrt_k[top] : std::sqrt(static_cast<double>(top))) * prev;
}

double LinkSpec::eval(double z) const noexcept {
  double value = 0.0;
  double slope = 0.0;
  eval_with_deriv(z, value, slope);
  return value;
}

double LinkSpec::deriv(double z) const noexcept {
  double value = 0.0;
  double slope = 0.0;
  eval_with_deriv(z, value, slope);
  return slope;
}

double LinkSpec::coeff(int l) const noexcept {
  return l >= 0 && l <= cap_ ? coeffs_[static_cast<std::size_t>(l)] : 0.0;
}

double link_eval(const LinkSpec& link, double z) noexcept { return link.eval(z); }
double link_deriv(const LinkSpec& link, double z) noexcept { return link.deriv(z); }

std::vector<double> hermite_coeffs(const LinkSpec& link, int max_degree, int cap) {
  if (max_degree < 0) throw std::invalid_argument("hermite_coeffs: max_degree must be >= 0");
  if (max_degree > cap)
    throw std::invalid_argument("hermite_coeffs: max_degree " + std::to_string(max_degree) +
                                " exceeds cap " + std::to_string(cap));
  int n = 0;
  double tol = 0.0;
  if (link.is_polynomial()) {
    n = (link.degree() + max_degree) / 2 + 2;
    tol = 1e-10;
  } else {
    n = max_degree / 4 + 4;
    tol = 1e-8;
  }
  std::vector<double> coarse = project(link, max_degree, n);
  const std::vector<double> fine = project(link, max_degree, 2 * n);
  for (std::size_t l = 0; l < coarse.size(); ++l) {
    if (std::abs(coarse[l] - fine[l]) >= tol)
      throw std::runtime_error("hermite_coeffs: quadrature did not converge at degree " + std::to_string(l));
    // Exact zeros by parity.
    if (l % 2 == 1) coarse[l] = 0.0;
  }
  return coarse;
}

namespace {

void check_rho(double rho) {
  if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("correlated_moment: |rho| must be <= 1");
}

// Smallest even degree above the cap; the tail mass is assigned there.
int tail_degree(const LinkSpec& link) { return link.cap() % 2 == 0 ? link.cap() + 2 : link.cap() + 1; }

}  // namespace

double correlated_moment(const LinkSpec& link, double rho) {
  check_rho(rho);
  return correlation_kernel(link, rho);
}

double correlated_moment_deriv(const LinkSpec& link, double rho) {
  check_rho(rho);
  return correlation_kernel_deriv(link, rho);
}

double correlation_kernel(const LinkSpec& link, double rho) noexcept {
  const auto& c = link.coeffs();
  double acc = 0.0;
  double power = 1.0;
  for (double coeff : c) {
    acc += coeff * coeff * power;
    power *= rho;
  }
  if (link.tail_mass() > 0.0) acc += link.tail_mass() * std::pow(rho, tail_degree(link));
  return acc;
}

double correlation_kernel_deriv(const LinkSpec& link, double rho) noexcept {
  const auto& c = link.coeffs();
  double acc = 0.0;
  double power = 1.0;  // rho^{l-1}
  for (std::size_t l = 1; l < c.size(); ++l) {
    acc += static_cast<double>(l) * c[l] * c[l] * power;
    power *= rho;
  }
  if (link.tail_mass() > 0.0) {
    const int q = tail_degree(link);
    acc += link.tail_mass() * q * std::pow(rho, q - 1);
  }
  return acc;
}

}  // namespace mil
