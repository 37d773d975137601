#include "mil/gradients.hpp"

#include <cmath>
#include <stdexcept>

namespace mil {
namespace {

void check_dims(const LearnerModel& learner, const TargetModel& target) {
  if (learner.d() != target.d()) throw std::invalid_argument("dimension mismatch between learner and target");
  if (learner.a.size() != learner.m()) throw std::invalid_argument("learner: a and V disagree on width");
}

void check_index(const LearnerModel& learner, int i) {
  if (i < 0 || i >= learner.m()) throw std::out_of_range("neuron index out of range");
}

}  // namespace

PopulationLossReport population_loss(const LearnerModel& learner, const TargetModel& target) {
  check_dims(learner, target);
  const LinkSpec& link = target.link();
  const Matrix& vs = target.directions();
  const Matrix teacher_gram = vs.transpose() * vs;
  const Matrix cross = vs.transpose() * learner.V;  // P x m
  const Matrix gram = learner.V.transpose() * learner.V;

  PopulationLossReport r;
  for (Eigen::Index k1 = 0; k1 < teacher_gram.rows(); ++k1)
    for (Eigen::Index k2 = 0; k2 < teacher_gram.cols(); ++k2)
      r.const_term += correlation_kernel(link, teacher_gram(k1, k2));
  r.const_term *= 0.5;
  for (Eigen::Index j = 0; j < cross.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < cross.rows(); ++k) s += correlation_kernel(link, cross(k, j));
    r.cross_term += learner.a(j) * s;
  }
  for (Eigen::Index j1 = 0; j1 < gram.rows(); ++j1)
    for (Eigen::Index j2 = 0; j2 < gram.cols(); ++j2)
      r.self_term += learner.a(j1) * learner.a(j2) * correlation_kernel(link, gram(j1, j2));
  r.self_term *= 0.5;
  r.total = r.const_term - r.cross_term + r.self_term;
  return r;
}

Vector teacher_grad_v(const LearnerModel& learner, const TargetModel& target, int i) {
  check_dims(learner, target);
  check_index(learner, i);
  const Vector corr = target.directions().transpose() * learner.V.col(i);
  Vector coef(corr.size());
  for (Eigen::Index k = 0; k < corr.size(); ++k) coef(k) = correlation_kernel_deriv(target.link(), corr(k));
  return -learner.a(i) * (target.directions() * coef);
}

Vector population_grad_v(const LearnerModel& learner, const TargetModel& target, int i) {
  Vector g = teacher_grad_v(learner, target, i);
  const Vector inner = learner.V.transpose() * learner.V.col(i);
  Vector coef(inner.size());
  for (Eigen::Index j = 0; j < inner.size(); ++j)
    coef(j) = learner.a(j) * correlation_kernel_deriv(target.link(), inner(j));
  // d/dv_i of 1/2 a_i^2 K(<v_i, v_i>) is a_i^2 K'(|v_i|^2) v_i, the same form as j != i.
  g += learner.a(i) * (learner.V * coef);
  return g;
}

double per_sample_loss(const LearnerModel& learner, const TargetModel& target, const Eigen::Ref<const Vector>& x) {
  check_dims(learner, target);
  const double r = target.eval(x) - learner_eval(learner, target.link(), x);
  return 0.5 * r * r;
}

Vector per_sample_grad_v(const LearnerModel& learner, const TargetModel& target, const Eigen::Ref<const Vector>& x,
                         int i) {
  check_dims(learner, target);
  check_index(learner, i);
  const double r = target.eval(x) - learner_eval(learner, target.link(), x);
  return (-learner.a(i) * r * target.link().deriv(learner.V.col(i).dot(x))) * x;
}

Vector spherical_project(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& g) {
  if (v.size() != g.size()) throw std::invalid_argument("spherical_project: dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-9) throw std::invalid_argument("spherical_project: v is not a unit vector");
  return g - g.dot(v) * v;
}

}  // namespace mil
