#include "mil/model.hpp"

#include <cmath>
#include <stdexcept>

namespace mil {

TeacherMode teacher_mode_from_name(const std::string& name) {
  if (name == "canonical") return TeacherMode::canonical;
  if (name == "random_orthonormal") return TeacherMode::random_orthonormal;
  throw std::invalid_argument("unknown teacher mode '" + name + "' (expected canonical or random_orthonormal)");
}

std::string teacher_mode_name(TeacherMode mode) {
  return mode == TeacherMode::canonical ? "canonical" : "random_orthonormal";
}

Matrix make_directions(int d, int P, TeacherMode mode, std::uint64_t seed) {
  if (P < 1 || d < 1) throw std::invalid_argument("make_directions: d and P must be positive");
  if (P > d) throw std::invalid_argument("make_directions: P must not exceed d");
  if (mode == TeacherMode::canonical) return Matrix::Identity(d, P);

  Matrix g(d, P);
  for (int k = 0; k < P; ++k) {
    StreamRng rng(seed, StreamTag::directions, static_cast<std::uint64_t>(k));
    for (int r = 0; r < d; ++r) g(r, k) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, P);
  const Matrix r = qr.matrixQR().topLeftCorner(P, P).triangularView<Eigen::Upper>();
  for (int k = 0; k < P; ++k)
    if (r(k, k) < 0.0) q.col(k) *= -1.0;
  return q;
}

TargetModel::TargetModel(LinkSpec link, Matrix directions)
    : link_(std::move(link)), directions_(std::move(directions)) {
  const auto P = directions_.cols();
  if (P < 1 || P > directions_.rows())
    throw std::invalid_argument("TargetModel: need 1 <= P <= d");
  const double err = (directions_.transpose() * directions_ - Matrix::Identity(P, P)).cwiseAbs().maxCoeff();
  if (err > 1e-12) throw std::invalid_argument("TargetModel: directions are not orthonormal");
  canonical_ = directions_ == Matrix::Identity(directions_.rows(), P);
}

Vector TargetModel::project(const Eigen::Ref<const Vector>& u) const {
  if (u.size() != d()) throw std::invalid_argument("TargetModel::project: dimension mismatch");
  if (canonical_) return u.head(P());
  return directions_.transpose() * u;
}

double TargetModel::eval(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != d()) throw std::invalid_argument("target_eval: dimension mismatch");
  double acc = 0.0;
  if (canonical_) {
    for (int k = 0; k < P(); ++k) acc += link_.eval(x(k));
  } else {
    for (int k = 0; k < P(); ++k) acc += link_.eval(directions_.col(k).dot(x));
  }
  return acc;
}

Vector sample_input(int d, StreamRng& rng) {
  Vector x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.normal();
  return x;
}

Vector sample_sphere(int d, StreamRng& rng) {
  Vector g = sample_input(d, rng);
  return g / g.norm();
}

double target_eval(const TargetModel& target, const Eigen::Ref<const Vector>& x) { return target.eval(x); }

double learner_eval(const LearnerModel& learner, const LinkSpec& link, const Eigen::Ref<const Vector>& x) {
  if (x.size() != learner.d()) throw std::invalid_argument("learner_eval: dimension mismatch");
  if (learner.a.size() != learner.m()) throw std::invalid_argument("learner_eval: a and V disagree on width");
  double acc = 0.0;
  for (int j = 0; j < learner.m(); ++j) acc += learner.a(j) * link.eval(learner.V.col(j).dot(x));
  return acc;
}

LearnerModel init_network(int d, int m, const InitConfig& cfg) {
  if (m < 1 || d < 1) throw std::invalid_argument("init_network: d and m must be positive");
  if (!(cfg.a0 > 0.0)) throw std::invalid_argument("init_network: a0 must be positive");
  LearnerModel model{Vector::Constant(m, cfg.a0), Matrix(d, m)};
  for (int j = 0; j < m; ++j) {
    StreamRng rng(cfg.seed, StreamTag::init_neuron, static_cast<std::uint64_t>(j));
    model.V.col(j) = sample_sphere(d, rng);
  }
  return model;
}

LearnerModel teacher_copy(const TargetModel& target) {
  return LearnerModel{Vector::Ones(target.P()), target.directions()};
}

}  // namespace mil
