#pragma once

#include <span>
#include <string>
#include <vector>

namespace mil {

inline constexpr int kDefaultCoeffCap = 32;

/// Normalized probabilists' Hermite polynomial h_l = He_l / sqrt(l!), evaluated
/// by the three-term recurrence in normalized form.
double hermite_eval(int l, double z);

/// Fills out[0..lmax] with h_0(z) .. h_lmax(z).
void hermite_all(int lmax, double z, std::span<double> out);

enum class LinkKind { hermite_pair, h2_only, abs_value };

/// The scalar link phi with its derivative and cached Hermite coefficients.
/// Immutable after construction.
class LinkSpec {
 public:
  static LinkSpec hermite_pair(int L, int cap = kDefaultCoeffCap);
  static LinkSpec h2_only(int cap = kDefaultCoeffCap);
  static LinkSpec abs_value(int cap = kDefaultCoeffCap);

  /// Config-file names: "h2_h2L" (needs L), "h2_only", "abs".
  static LinkSpec from_name(const std::string& name, int L = 2, int cap = kDefaultCoeffCap);

  LinkKind kind() const noexcept { return kind_; }
  std::string name() const;

  /// L for hermite_pair; the order of the lowest even term above 2 otherwise
  /// (2 for abs, 1 for h2_only where the "2L" term coincides with h_2).
  int order() const noexcept { return order_; }
  int cap() const noexcept { return cap_; }
  bool is_even() const noexcept { return true; }
  bool is_polynomial() const noexcept { return kind_ != LinkKind::abs_value; }
  /// Polynomial degree, or -1 for non-polynomial links.
  int degree() const noexcept;

  double eval(double z) const noexcept;
  double deriv(double z) const noexcept;
  /// phi(z) and phi'(z) from a single recurrence pass.
  void eval_with_deriv(double z, double& value, double& slope) const noexcept;

  /// Cached phi_hat_0 .. phi_hat_cap.
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double coeff(int l) const noexcept;

  /// E phi(z)^2 and the coefficient mass above the cap.
  double second_moment() const noexcept { return second_moment_; }
  double tail_mass() const noexcept { return tail_mass_; }

  friend bool operator==(const LinkSpec& a, const LinkSpec& b) noexcept {
    return a.kind_ == b.kind_ && a.order_ == b.order_ && a.cap_ == b.cap_;
  }

 private:
  LinkSpec(LinkKind kind, int order, int cap);

  LinkKind kind_;
  int order_;
  int cap_;
  std::vector<double> coeffs_;
  double second_moment_ = 0.0;
  double tail_mass_ = 0.0;
};

double link_eval(const LinkSpec& link, double z) noexcept;
double link_deriv(const LinkSpec& link, double z) noexcept;

/// phi_hat_l = E[phi(z) h_l(z)] for l = 0..max_degree, by quadrature that is
/// exact for polynomial links (Gauss-Hermite) and for |z| (mirrored
/// Gauss-Laguerre). Each rule is checked against one with twice the nodes.
/// Throws std::invalid_argument when max_degree exceeds cap.
std::vector<double> hermite_coeffs(const LinkSpec& link, int max_degree, int cap = kDefaultCoeffCap);

/// E[phi(z) phi(z')] for rho-correlated standard Gaussians,
/// sum_l phi_hat_l^2 rho^l. Mass above the coefficient cap is carried by one
/// extra even term so the value is exact at |rho| = 1.
double correlated_moment(const LinkSpec& link, double rho);

/// d/drho of correlated_moment.
double correlated_moment_deriv(const LinkSpec& link, double rho);

// Same series without the range check. The population loss evaluates it at
// inner products that leave [-1, 1] by round-off or under finite-difference
// perturbation.
double correlation_kernel(const LinkSpec& link, double x) noexcept;
double correlation_kernel_deriv(const LinkSpec& link, double x) noexcept;

}  // namespace mil
