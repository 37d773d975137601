#pragma once

#include "mil/model.hpp"

namespace mil {

/// total = const_term - cross_term + self_term, where with K the link's
/// correlation kernel
///   const_term = 1/2 sum_{k1,k2} K(<v*_k1, v*_k2>)
///   cross_term = sum_k sum_j a_j K(<v*_k, v_j>)
///   self_term  = 1/2 sum_{j1,j2} a_j1 a_j2 K(<v_j1, v_j2>).
struct PopulationLossReport {
  double total = 0.0;
  double const_term = 0.0;
  double cross_term = 0.0;
  double self_term = 0.0;
};

PopulationLossReport population_loss(const LearnerModel& learner, const TargetModel& target);

/// Exact gradient of the closed-form population loss in v_i, including the
/// learner-learner interaction (with its j = i term).
Vector population_grad_v(const LearnerModel& learner, const TargetModel& target, int i);

/// Teacher terms only: -a_i sum_k K'(<v*_k, v_i>) v*_k.
Vector teacher_grad_v(const LearnerModel& learner, const TargetModel& target, int i);

/// 1/2 (f*(x) - f(x))^2.
double per_sample_loss(const LearnerModel& learner, const TargetModel& target, const Eigen::Ref<const Vector>& x);

/// -a_i (f*(x) - f(x)) phi'(<v_i, x>) x.
Vector per_sample_grad_v(const LearnerModel& learner, const TargetModel& target, const Eigen::Ref<const Vector>& x,
                         int i);

/// (I - v v^T) g. Rejects v with | |v| - 1 | > 1e-9.
Vector spherical_project(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& g);

}  // namespace mil
