#pragma once

#include <cstdint>
#include <vector>

namespace mil {

/// Empirical event frequency with its binomial standard error and the
/// theoretical value it is compared against.
struct FrequencyReport {
  long trials = 0;
  long events = 0;
  double frequency = 0.0;
  double se = 0.0;
  double bound = 0.0;
  double threshold = 0.0;  // event threshold, when the event has one
  bool pass = false;
};

/// Frequency of max_i |v_i| > 4 sqrt(2 K log d) / sqrt(d) for v uniform on
/// S^{d-1}; passes when it stays below 4/d^K + 2 se.
FrequencyReport mc_max_coordinate(int d, double K, long trials, std::uint64_t seed);

/// Frequency that every p <= P has a neuron i with
/// |v_{i,p}| / max_{q <= P, q != p} |v_{i,q}| >= 3/2. The ratio is
/// scale-free, so only the first P Gaussian coordinates are drawn.
/// `bound` holds 1 - delta when delta > 0.
FrequencyReport mc_gap_existence(int d, int P, int m, long trials, std::uint64_t seed, double delta = 0.0);

/// Gap-existence frequencies for increasing widths on nested neuron sets: trial
/// i draws neurons in order from substream (seed, init_stats_trial, i), so the
/// width-m network is the first m neurons whatever the ladder.
std::vector<double> mc_gap_ladder(int P, const std::vector<int>& widths, long trials, std::uint64_t seed);

struct NormRatioReport {
  FrequencyReport inside;   // |v_{<=P}| / |v| in [sqrt(P)/(3 sqrt d), 3 sqrt(P)/sqrt(d)]
  double mean_sq = 0.0;     // mean of |v_{<=P}|^2 / |v|^2
  double mean_sq_se = 0.0;
};

/// Requires 8 <= P <= d.
NormRatioReport mc_norm_ratio(int d, int P, long trials, std::uint64_t seed);

/// 400 c P^{8 c^2} sqrt(log P) log(max(P, 1/delta)).
double gap_width_formula(int P, double c, double delta);

/// Smallest width on the ladder whose gap frequency, less two standard errors,
/// reaches 1 - delta; -1 when none does.
int calibrated_gap_width(int P, double delta, const std::vector<int>& ladder, long trials, std::uint64_t seed);

/// Low-order moments of one coordinate of a uniform point on S^{d-1}, against
/// E v_1^2 = 1/d and E v_1^4 = 3/(d(d+2)).
struct SphereMoments {
  double m2 = 0.0, m2_se = 0.0, m2_exact = 0.0;
  double m4 = 0.0, m4_se = 0.0, m4_exact = 0.0;
};

SphereMoments sphere_moments(int d, long trials, std::uint64_t seed);

}  // namespace mil
