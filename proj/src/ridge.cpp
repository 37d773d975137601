#include "mil/ridge.hpp"

#include "mil/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mil {

void RidgeConfig::validate() const {
  if (N < 1 || N_val < 1 || N_test < 1) throw std::invalid_argument("RidgeConfig: sample counts must be positive");
  if (lambda_grid.empty()) throw std::invalid_argument("RidgeConfig: lambda_grid must be nonempty");
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end()))
    throw std::invalid_argument("RidgeConfig: lambda_grid must be sorted");
  if (lambda_grid.front() < 0.0) throw std::invalid_argument("RidgeConfig: lambdas must be >= 0");
}

Matrix sample_inputs(int d, long N, std::uint64_t seed, StreamTag tag) {
  Matrix X(N, d);
  for (long n = 0; n < N; ++n) {
    StreamRng rng(seed, tag, static_cast<std::uint64_t>(n));
    for (int k = 0; k < d; ++k) X(n, k) = rng.normal();
  }
  return X;
}

Matrix design_matrix(const Matrix& V, const LinkSpec& link, const Matrix& X) {
  if (X.cols() != V.rows()) throw std::invalid_argument("design_matrix: dimension mismatch");
  Matrix Phi = X * V;
  Phi = Phi.unaryExpr([&link](double z) { return link.eval(z); });
  return Phi;
}

Vector ridge_fit(const Matrix& Phi, const Vector& y, double lambda) {
  if (Phi.rows() != y.size()) throw std::invalid_argument("ridge_fit: Phi and y disagree on N");
  if (!(lambda >= 0.0)) throw std::invalid_argument("ridge_fit: lambda must be >= 0");
  const double N = static_cast<double>(Phi.rows());
  Matrix A = Phi.transpose() * Phi / N;
  A.diagonal().array() += 2.0 * lambda;
  const Vector b = Phi.transpose() * y / N;
  if (lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(Phi);
    qr.setThreshold(1e-12);
    if (qr.rank() < Phi.cols()) throw RankDeficient("ridge_fit: features are rank deficient at lambda = 0");
  }
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw RankDeficient("ridge_fit: normal equations are not positive definite");
  return llt.solve(b);
}

namespace {

Vector target_values(const TargetModel& target, const Matrix& X) {
  const Matrix proj = X * target.directions();
  Vector y(X.rows());
  const LinkSpec& link = target.link();
  for (Eigen::Index n = 0; n < X.rows(); ++n) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < proj.cols(); ++k) s += link.eval(proj(n, k));
    y(n) = s;
  }
  return y;
}

}  // namespace

RidgeSelection select_lambda(const Matrix& V, const TargetModel& target, const RidgeConfig& cfg,
                             std::uint64_t seed) {
  cfg.validate();
  if (V.rows() != target.d()) throw std::invalid_argument("select_lambda: dimension mismatch");
  const Matrix X = sample_inputs(target.d(), cfg.N, seed, StreamTag::ridge_train);
  const Matrix Xv = sample_inputs(target.d(), cfg.N_val, seed, StreamTag::ridge_val);
  const Matrix Phi = design_matrix(V, target.link(), X);
  const Matrix Phiv = design_matrix(V, target.link(), Xv);
  const Vector y = target_values(target, X);
  const Vector yv = target_values(target, Xv);

  RidgeSelection best;
  best.val_loss = std::numeric_limits<double>::infinity();
  for (double lambda : cfg.lambda_grid) {
    const Vector a = ridge_fit(Phi, y, lambda);
    const double loss = (yv - Phiv * a).squaredNorm() / static_cast<double>(cfg.N_val);
    best.val_losses.push_back(loss);
    best.weight_norms.push_back(a.norm());
    if (loss < best.val_loss) {
      best.val_loss = loss;
      best.lambda_star = lambda;
      best.a = a;
    }
  }
  return best;
}

TestError eval_test_error(const LearnerModel& learner, const TargetModel& target, long N_test, StreamRng& rng) {
  if (N_test < 1) throw std::invalid_argument("eval_test_error: N_test must be positive");
  if (learner.d() != target.d()) throw std::invalid_argument("eval_test_error: dimension mismatch");
  std::vector<double> sq(static_cast<std::size_t>(N_test));
  std::vector<double> ab(static_cast<std::size_t>(N_test));
  for (long n = 0; n < N_test; ++n) {
    const Vector x = sample_input(target.d(), rng);
    const double r = target.eval(x) - learner_eval(learner, target.link(), x);
    sq[static_cast<std::size_t>(n)] = r * r;
    ab[static_cast<std::size_t>(n)] = std::abs(r);
  }
  const MeanSe m = mean_se(sq);
  const MeanSe l = mean_se(ab);
  return {m.mean, m.se, l.mean, l.se};
}

Vector indicator_output_weights(const Matrix& V, const TargetModel& target) {
  if (V.rows() != target.d()) throw std::invalid_argument("indicator_output_weights: dimension mismatch");
  const Matrix corr = target.directions().transpose() * V;
  Vector a = Vector::Zero(V.cols());
  for (Eigen::Index p = 0; p < corr.rows(); ++p) {
    Eigen::Index best = 0;
    corr.row(p).cwiseAbs2().maxCoeff(&best);
    a(best) += 1.0;
  }
  return a;
}

Matrix synthetic_recovered_layer(const TargetModel& target, int m, double eps_v, std::uint64_t seed) {
  if (m < target.P()) throw std::invalid_argument("synthetic_recovered_layer: need m >= P");
  if (!(eps_v >= 0.0 && eps_v <= 1.0)) throw std::invalid_argument("synthetic_recovered_layer: eps_v must lie in [0, 1]");
  const int d = target.d();
  Matrix V(d, m);
  for (int j = 0; j < m; ++j) {
    StreamRng rng(seed, StreamTag::synthetic, static_cast<std::uint64_t>(j));
    Vector g = sample_sphere(d, rng);
    if (j < target.P()) {
      const auto vs = target.directions().col(j);
      g -= g.dot(vs) * vs;
      g.normalize();
      V.col(j) = std::sqrt(1.0 - eps_v) * vs + std::sqrt(eps_v) * g;
    } else {
      V.col(j) = g;
    }
  }
  return V;
}

}  // namespace mil
