#pragma once

#include "mil/hermite.hpp"
#include "mil/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>

namespace mil {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class TeacherMode { canonical, random_orthonormal };

TeacherMode teacher_mode_from_name(const std::string& name);
std::string teacher_mode_name(TeacherMode mode);

/// d x P matrix with orthonormal columns. canonical gives (e_1, ..., e_P);
/// random_orthonormal gives the Q factor of a Gaussian matrix, with signs fixed
/// so that diag(R) > 0.
Matrix make_directions(int d, int P, TeacherMode mode, std::uint64_t seed);

/// Teacher f*(x) = sum_k phi(<v*_k, x>) with orthonormal directions.
class TargetModel {
 public:
  TargetModel(LinkSpec link, Matrix directions);

  int d() const noexcept { return static_cast<int>(directions_.rows()); }
  int P() const noexcept { return static_cast<int>(directions_.cols()); }
  const LinkSpec& link() const noexcept { return link_; }
  const Matrix& directions() const noexcept { return directions_; }
  /// True when the directions are exactly e_1..e_P, so projections are plain coordinates.
  bool canonical() const noexcept { return canonical_; }

  /// Teacher correlations V*^T u.
  Vector project(const Eigen::Ref<const Vector>& u) const;

  double eval(const Eigen::Ref<const Vector>& x) const;

 private:
  LinkSpec link_;
  Matrix directions_;
  bool canonical_;
};

/// Student f(x) = sum_j a_j phi(<v_j, x>). Columns of V are the first-layer neurons.
struct LearnerModel {
  Vector a;
  Matrix V;

  int d() const noexcept { return static_cast<int>(V.rows()); }
  int m() const noexcept { return static_cast<int>(V.cols()); }
};

struct InitConfig {
  double a0 = 1e-3;
  std::uint64_t seed = 0;
};

/// x ~ N(0, I_d).
Vector sample_input(int d, StreamRng& rng);

double target_eval(const TargetModel& target, const Eigen::Ref<const Vector>& x);
double learner_eval(const LearnerModel& learner, const LinkSpec& link, const Eigen::Ref<const Vector>& x);

/// a_i = a0 and v_i = g_i / |g_i| with g_i drawn from the per-neuron substream.
LearnerModel init_network(int d, int m, const InitConfig& cfg);

/// Uniform draw on S^{d-1} as a normalized Gaussian.
Vector sample_sphere(int d, StreamRng& rng);

/// Learner equal to the teacher: m = P, a = 1, V = V*.
LearnerModel teacher_copy(const TargetModel& target);

}  // namespace mil
