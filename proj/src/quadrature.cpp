#include "mil/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <stdexcept>

namespace mil {
namespace {

// Golub-Welsch: eigenvalues of the symmetric Jacobi matrix are the nodes and
// mu0 * (first eigenvector component)^2 are the weights.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
  const auto n = diag.size();
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  jacobi.diagonal() = diag;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = offdiag(k);
    jacobi(k + 1, k) = offdiag(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success) throw std::runtime_error("golub_welsch: eigensolver failed");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double first = eig.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = mu0 * first * first;
  }
  return rule;
}

// h_n(x) and h_{n-1}(x) for the normalized probabilists' Hermite polynomials.
std::pair<double, double> hermite_pair_at(int n, double x) {
  double prev = 0.0, cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(k + 1.0);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

// L_n(x) and L_{n-1}(x) (Laguerre).
std::pair<double, double> laguerre_pair_at(int n, double x) {
  double prev = 0.0, cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

}  // namespace

// The eigenvector weights lose relative accuracy in the tails, so nodes are
// polished by Newton steps and weights recomputed from the closed forms.
QuadratureRule gauss_hermite_normal(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_normal: n must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  QuadratureRule rule = golub_welsch(diag, off, 1.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double& x = rule.nodes[i];
    for (int it = 0; it < 3; ++it) {
      const auto [hn, hm] = hermite_pair_at(n, x);
      if (hm == 0.0) break;
      x -= hn / (std::sqrt(static_cast<double>(n)) * hm);
    }
    const double hm = hermite_pair_at(n, x).second;
    rule.weights[i] = 1.0 / (n * hm * hm);
  }
  // The eigensolver leaves tiny asymmetries; symmetrize so odd moments vanish exactly.
  const std::size_t m = rule.nodes.size();
  for (std::size_t i = 0; i < m / 2; ++i) {
    const std::size_t j = m - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_laguerre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: n must be >= 1");
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + 1.0;
  for (int k = 1; k < n; ++k) off(k - 1) = static_cast<double>(k);
  QuadratureRule rule = golub_welsch(diag, off, 1.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    double& x = rule.nodes[i];
    for (int it = 0; it < 3; ++it) {
      // x L_n' = n (L_n - L_{n-1})
      const auto [ln, lm] = laguerre_pair_at(n, x);
      const double deriv = n * (ln - lm) / x;
      if (deriv == 0.0) break;
      x -= ln / deriv;
    }
    // w = x / ((n+1)^2 L_{n+1}(x)^2)
    const double lp = laguerre_pair_at(n + 1, x).first;
    rule.weights[i] = x / ((n + 1.0) * (n + 1.0) * lp * lp);
  }
  return rule;
}

QuadratureRule simpson(double a, double b, int panels) {
  if (panels < 2 || panels % 2 != 0) throw std::invalid_argument("simpson: panels must be even and >= 2");
  QuadratureRule rule;
  const double h = (b - a) / panels;
  rule.nodes.resize(static_cast<std::size_t>(panels) + 1);
  rule.weights.resize(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = a + h * i;
    const double c = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    rule.weights[static_cast<std::size_t>(i)] = c * h / 3.0;
  }
  return rule;
}

}  // namespace mil
