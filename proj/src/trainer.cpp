#include "mil/trainer.hpp"

#include "mil/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mil {

DegenerateStep::DegenerateStep(long step, int neuron)
    : std::runtime_error("degenerate SGD step at t=" + std::to_string(step) + " for neuron " +
                         std::to_string(neuron)),
      step_(step),
      neuron_(neuron) {}

void TrainConfig::validate() const {
  if (!(eta >= 0.0)) throw std::invalid_argument("TrainConfig: eta must be >= 0");
  if (!(a0 > 0.0)) throw std::invalid_argument("TrainConfig: a0 must be > 0");
  if (T_max < 0) throw std::invalid_argument("TrainConfig: T_max must be >= 0");
  // 0 is accepted so that a zero threshold stops at the first diagnostic.
  if (!(recovery_threshold >= 0.0 && recovery_threshold < 1.0))
    throw std::invalid_argument("TrainConfig: recovery_threshold must lie in [0, 1)");
  if (!(ema_decay > 0.0 && ema_decay < 1.0)) throw std::invalid_argument("TrainConfig: ema_decay must lie in (0, 1)");
  if (diag_stride < 1) throw std::invalid_argument("TrainConfig: diag_stride must be >= 1");
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

// P x m teacher correlations.
Matrix teacher_correlations(const LearnerModel& learner, const TargetModel& target) {
  if (target.canonical()) return learner.V.topRows(target.P());
  return target.directions().transpose() * learner.V;
}

void max_correlations(const Matrix& corr, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(corr.rows()), 0.0);
  for (Eigen::Index j = 0; j < corr.cols(); ++j)
    for (Eigen::Index p = 0; p < corr.rows(); ++p) {
      const double c2 = corr(p, j) * corr(p, j);
      if (c2 > out[static_cast<std::size_t>(p)]) out[static_cast<std::size_t>(p)] = c2;
    }
}

}  // namespace

double DiagnosticsRecord::norm_ratio_min() const {
  return norm_ratio.empty() ? std::numeric_limits<double>::quiet_NaN()
                            : *std::min_element(norm_ratio.begin(), norm_ratio.end());
}

double DiagnosticsRecord::norm_ratio_median() const { return median_of(norm_ratio); }

double DiagnosticsRecord::norm_ratio_max() const {
  return norm_ratio.empty() ? std::numeric_limits<double>::quiet_NaN()
                            : *std::max_element(norm_ratio.begin(), norm_ratio.end());
}

double DiagnosticsRecord::min_ema_corr() const {
  return ema_corr.empty() ? 0.0 : *std::min_element(ema_corr.begin(), ema_corr.end());
}

DiagnosticsRecord compute_diagnostics(const LearnerModel& learner, const TargetModel& target, int L,
                                      const std::vector<GapPair>& gap_pairs) {
  if (learner.d() != target.d()) throw std::invalid_argument("compute_diagnostics: dimension mismatch");
  const Matrix corr = teacher_correlations(learner, target);
  const auto m = static_cast<std::size_t>(learner.m());
  const auto P = static_cast<std::size_t>(target.P());

  DiagnosticsRecord rec;
  rec.head_sq.resize(m);
  rec.tail_sq.resize(m);
  rec.norm_ratio.resize(m);
  rec.rho.resize(m);
  rec.share.assign(P, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const auto col = corr.col(static_cast<Eigen::Index>(j));
    const double head = col.squaredNorm();
    double tail = 0.0;
    if (target.canonical()) {
      const auto rest = learner.V.col(static_cast<Eigen::Index>(j)).tail(learner.d() - target.P());
      tail = rest.squaredNorm();
    } else {
      tail = std::max(0.0, learner.V.col(static_cast<Eigen::Index>(j)).squaredNorm() - head);
    }
    double high = 0.0;
    for (Eigen::Index p = 0; p < col.size(); ++p) high += std::pow(col(p) * col(p), L);
    rec.head_sq[j] = head;
    rec.tail_sq[j] = tail;
    rec.norm_ratio[j] = tail > 0.0 ? head / tail : std::numeric_limits<double>::infinity();
    rec.rho[j] = 2.0 * head + 2.0 * L * high;
    if (head > 0.0)
      for (std::size_t p = 0; p < P; ++p) {
        const double c = col(static_cast<Eigen::Index>(p));
        rec.share[p] = std::max(rec.share[p], c * c / head);
      }
  }
  max_correlations(corr, rec.max_corr);
  rec.ema_corr = rec.max_corr;
  for (const GapPair& g : gap_pairs) {
    if (g.neuron < 0 || g.neuron >= learner.m() || g.p < 0 || g.q < 0 || g.p >= target.P() || g.q >= target.P())
      throw std::out_of_range("compute_diagnostics: gap pair out of range");
    const double vp = corr(g.p, g.neuron);
    const double vq = corr(g.q, g.neuron);
    rec.gap_ratios.push_back(vq != 0.0 ? (vp * vp) / (vq * vq) : std::numeric_limits<double>::infinity());
  }
  return rec;
}

void sgd_step(LearnerModel& learner, const TargetModel& target, const Eigen::Ref<const Vector>& x, double eta,
              double a0, long step) {
  if (x.size() != learner.d() || learner.d() != target.d())
    throw std::invalid_argument("sgd_step: dimension mismatch");
  const LinkSpec& link = target.link();
  const Vector z = learner.V.transpose() * x;
  Vector slope(learner.m());
  double f = 0.0;
  for (int j = 0; j < learner.m(); ++j) {
    double value = 0.0;
    link.eval_with_deriv(z(j), value, slope(j));
    f += learner.a(j) * value;
  }
  const double residual = target.eval(x) - f;
  const double scale = eta / a0;
  for (int i = 0; i < learner.m(); ++i) {
    // grad = s x with s = -a_i r phi'(z_i); its tangent part is s (x - z_i v_i).
    const double beta = scale * (-learner.a(i) * residual * slope(i));
    if (beta == 0.0) continue;
    auto v = learner.V.col(i);
    v = (1.0 + beta * z(i)) * v - beta * x;
    const double norm = v.norm();
    if (!(norm >= 1e-12)) throw DegenerateStep(step, i);
    v /= norm;
  }
}

void population_gd_step(LearnerModel& learner, const TargetModel& target, double eta, double a0) {
  Matrix next = learner.V;
  for (int i = 0; i < learner.m(); ++i) {
    const Vector g = spherical_project(learner.V.col(i), population_grad_v(learner, target, i));
    Vector v = learner.V.col(i) - (eta / a0) * g;
    const double norm = v.norm();
    if (!(norm >= 1e-12)) throw DegenerateStep(0, i);
    next.col(i) = v / norm;
  }
  learner.V = std::move(next);
}

TrainResult train_stage1(LearnerModel learner, const TargetModel& target, const TrainConfig& cfg) {
  cfg.validate();
  if (learner.d() != target.d()) throw std::invalid_argument("train_stage1: dimension mismatch");
  const int L = cfg.diag_order > 0 ? cfg.diag_order : target.link().order();

  TrainResult out;
  DiagnosticsRecord first = compute_diagnostics(learner, target, L, cfg.gap_pairs);
  std::vector<double> ema = first.max_corr;
  std::vector<double> current;
  auto recovered = [&] {
    return *std::min_element(ema.begin(), ema.end()) >= cfg.recovery_threshold;
  };
  out.trajectory.push_back(std::move(first));

  long t = 0;
  bool stopped = recovered();
  while (!stopped && t < cfg.T_max) {
    StreamRng rng(cfg.seed, StreamTag::sgd_sample, static_cast<std::uint64_t>(t));
    const Vector x = sample_input(learner.d(), rng);
    sgd_step(learner, target, x, cfg.eta, cfg.a0, t);
    ++t;
    max_correlations(teacher_correlations(learner, target), current);
    for (std::size_t p = 0; p < ema.size(); ++p) ema[p] = cfg.ema_decay * ema[p] + (1.0 - cfg.ema_decay) * current[p];
    stopped = recovered();
    if (stopped || t % cfg.diag_stride == 0 || t == cfg.T_max) {
      DiagnosticsRecord rec = compute_diagnostics(learner, target, L, cfg.gap_pairs);
      rec.t = t;
      rec.ema_corr = ema;
      out.trajectory.push_back(std::move(rec));
    }
  }
  if (stopped) out.stop_step = t;
  out.steps_run = t;
  out.learner = std::move(learner);
  return out;
}

}  // namespace mil
