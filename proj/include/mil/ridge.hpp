#pragma once

#include "mil/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mil {

struct RidgeConfig {
  long N = 4000;
  std::vector<double> lambda_grid = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  long N_val = 2000;
  long N_test = 20000;
  double target_eps = 0.05;  // acceptance: test mse <= target_eps * 2P

  void validate() const;
  bool operator==(const RidgeConfig&) const = default;
};

/// Raised by ridge_fit at lambda = 0 when the features are rank deficient.
class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N x d matrix whose row n is the Gaussian sample drawn from substream (seed, tag, n).
Matrix sample_inputs(int d, long N, std::uint64_t seed, StreamTag tag);

/// Phi(n, j) = phi(<v_j, x_n>) with samples stored as rows of X.
Matrix design_matrix(const Matrix& V, const LinkSpec& link, const Matrix& X);

/// Minimizer of (1/2N) sum_n (y_n - Phi_n a)^2 + lambda |a|^2, i.e. the solution of
///   (Phi^T Phi / N + 2 lambda I) a = Phi^T y / N
/// by Cholesky.
Vector ridge_fit(const Matrix& Phi, const Vector& y, double lambda);

struct RidgeSelection {
  Vector a;
  double lambda_star = 0.0;
  double val_loss = 0.0;              // validation mse at lambda_star
  std::vector<double> val_losses;     // per grid entry
  std::vector<double> weight_norms;   // |a(lambda)| per grid entry
};

/// Fits on cfg.N fresh samples for every lambda in the grid and keeps the one
/// with the smallest validation mse on cfg.N_val further samples.
RidgeSelection select_lambda(const Matrix& V, const TargetModel& target, const RidgeConfig& cfg, std::uint64_t seed);

struct TestError {
  double mse = 0.0;
  double mse_se = 0.0;
  double l1 = 0.0;
  double l1_se = 0.0;
};

/// Monte Carlo E(f - f*)^2 and E|f - f*| over N_test samples from rng.
TestError eval_test_error(const LearnerModel& learner, const TargetModel& target, long N_test, StreamRng& rng);

/// Output weights with a single unit weight on the neuron most correlated with
/// each teacher direction (several directions may share a neuron).
Vector indicator_output_weights(const Matrix& V, const TargetModel& target);

/// m neurons where neuron p < P has squared correlation exactly 1 - eps_v with
/// direction p and the rest is spread uniformly on the orthogonal complement;
/// remaining neurons are uniform on the sphere.
Matrix synthetic_recovered_layer(const TargetModel& target, int m, double eps_v, std::uint64_t seed);

}  // namespace mil
