#pragma once

#include "mil/model.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mil {

/// Raised when a step shrinks a neuron to (near) zero norm before renormalization.
class DegenerateStep : public std::runtime_error {
 public:
  DegenerateStep(long step, int neuron);
  long step() const noexcept { return step_; }
  int neuron() const noexcept { return neuron_; }

 private:
  long step_;
  int neuron_;
};

struct GapPair {
  int neuron = 0;
  int p = 0;
  int q = 1;
};

struct TrainConfig {
  double eta = 1e-4;  // absolute step size; see eta_from_c
  double a0 = 1e-3;
  long T_max = 100000;
  double recovery_threshold = 0.95;
  double ema_decay = 0.99;
  long diag_stride = 100;
  std::uint64_t seed = 0;
  int diag_order = 0;  // L used by rho; 0 means the link's order
  std::vector<GapPair> gap_pairs;

  static double eta_from_c(double eta_c, int d) { return eta_c / d; }
  void validate() const;
};

/// Snapshot of the first layer measured against the teacher directions.
/// "Coordinates" are the entries of V*^T v_i, which are the plain first P
/// coordinates for a canonical teacher.
struct DiagnosticsRecord {
  long t = 0;
  std::vector<double> head_sq;     // |v_{<=P}|^2 per neuron
  std::vector<double> tail_sq;     // |v_{>P}|^2 per neuron
  std::vector<double> norm_ratio;  // head/tail; +inf when tail_sq == 0
  std::vector<double> rho;         // 2|v_{<=P}|^2 + 2L |v_{<=P}|_{2L}^{2L}
  std::vector<double> max_corr;    // per direction p: max_i v_{i,p}^2
  std::vector<double> ema_corr;    // EMA of max_corr
  std::vector<double> share;       // per direction p: max_i v_{i,p}^2 / |v_{i,<=P}|^2
  std::vector<double> gap_ratios;  // v_{i,p}^2 / v_{i,q}^2 for each tracked GapPair

  double norm_ratio_min() const;
  double norm_ratio_median() const;
  double norm_ratio_max() const;
  double min_ema_corr() const;
};

DiagnosticsRecord compute_diagnostics(const LearnerModel& learner, const TargetModel& target, int L,
                                      const std::vector<GapPair>& gap_pairs = {});

/// One online spherical SGD step on the shared sample x:
///   v_k <- normalize(v_k - (eta/a0) (I - v_k v_k^T) grad_{v_k} l(x)).
/// The residual f*(x) - f(x) uses the pre-update V for every neuron.
void sgd_step(LearnerModel& learner, const TargetModel& target, const Eigen::Ref<const Vector>& x, double eta,
              double a0, long step = 0);

/// Same update with the exact population gradient in place of the per-sample one.
void population_gd_step(LearnerModel& learner, const TargetModel& target, double eta, double a0);

struct TrainResult {
  LearnerModel learner;
  std::vector<DiagnosticsRecord> trajectory;
  std::optional<long> stop_step;
  long steps_run = 0;
};

/// Runs sgd_step on fresh samples until every direction's EMA max-correlation
/// reaches the recovery threshold, or T_max steps. Sample t comes from the
/// substream (seed, sgd_sample, t). Diagnostics are recorded at t = 0, every
/// diag_stride steps, and at the final step.
TrainResult train_stage1(LearnerModel learner, const TargetModel& target, const TrainConfig& cfg);

}  // namespace mil
