#include "mil/init_stats.hpp"

#include "mil/model.hpp"
#include "mil/stats.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>

namespace mil {
namespace {

FrequencyReport finish(long trials, long events, double bound) {
  FrequencyReport r;
  r.trials = trials;
  r.events = events;
  r.frequency = static_cast<double>(events) / static_cast<double>(trials);
  r.se = binomial_se(r.frequency, trials);
  r.bound = bound;
  return r;
}

// Best gap ratio per direction for one neuron, folded into best[p].
void fold_gaps(const std::vector<double>& g, std::vector<double>& best) {
  const std::size_t P = g.size();
  for (std::size_t p = 0; p < P; ++p) {
    double other = 0.0;
    for (std::size_t q = 0; q < P; ++q)
      if (q != p) other = std::max(other, std::abs(g[q]));
    const double ratio = other > 0.0 ? std::abs(g[p]) / other : std::numeric_limits<double>::infinity();
    best[p] = std::max(best[p], ratio);
  }
}

bool all_gapped(const std::vector<double>& best) {
  return std::all_of(best.begin(), best.end(), [](double r) { return r >= 1.5; });
}

}  // namespace

FrequencyReport mc_max_coordinate(int d, double K, long trials, std::uint64_t seed) {
  if (d < 8 || !(K >= 1.0) || trials < 1) throw std::invalid_argument("mc_max_coordinate: need d >= 8, K >= 1, trials >= 1");
  const double threshold = 4.0 * std::sqrt(2.0 * K * std::log(static_cast<double>(d))) / std::sqrt(static_cast<double>(d));
  long events = 0;
  for (long i = 0; i < trials; ++i) {
    StreamRng rng(seed, StreamTag::init_stats_trial, static_cast<std::uint64_t>(i));
    const Vector v = sample_sphere(d, rng);
    if (v.cwiseAbs().maxCoeff() > threshold) ++events;
  }
  FrequencyReport r = finish(trials, events, 4.0 / std::pow(static_cast<double>(d), K));
  r.threshold = threshold;
  r.pass = r.frequency <= r.bound + 2.0 * r.se;
  return r;
}

std::vector<double> mc_gap_ladder(int P, const std::vector<int>& widths, long trials, std::uint64_t seed) {
  if (P < 1 || trials < 1 || widths.empty()) throw std::invalid_argument("mc_gap_ladder: need P >= 1, trials >= 1, widths");
  if (!std::is_sorted(widths.begin(), widths.end()) || widths.front() < 1)
    throw std::invalid_argument("mc_gap_ladder: widths must be positive and sorted");
  std::vector<long> hits(widths.size(), 0);
  std::vector<double> g(static_cast<std::size_t>(P));
  for (long i = 0; i < trials; ++i) {
    std::vector<double> best(static_cast<std::size_t>(P), 0.0);
    std::size_t rung = 0;
    StreamRng rng(seed, StreamTag::init_stats_trial, static_cast<std::uint64_t>(i));
    for (int j = 0; j < widths.back(); ++j) {
      for (auto& x : g) x = rng.normal();
      fold_gaps(g, best);
      while (rung < widths.size() && widths[rung] == j + 1) {
        if (all_gapped(best)) ++hits[rung];
        ++rung;
      }
    }
  }
  std::vector<double> out;
  for (long h : hits) out.push_back(static_cast<double>(h) / static_cast<double>(trials));
  return out;
}

FrequencyReport mc_gap_existence(int d, int P, int m, long trials, std::uint64_t seed, double delta) {
  if (P < 1 || P > d || m < P) throw std::invalid_argument("mc_gap_existence: need 1 <= P <= d and m >= P");
  const double freq = mc_gap_ladder(P, {m}, trials, seed).front();
  FrequencyReport r = finish(trials, std::lround(freq * static_cast<double>(trials)), delta > 0.0 ? 1.0 - delta : 0.0);
  r.threshold = 1.5;
  r.pass = r.frequency >= r.bound - 2.0 * r.se;
  return r;
}

NormRatioReport mc_norm_ratio(int d, int P, long trials, std::uint64_t seed) {
  if (P < 8 || P > d || trials < 1) throw std::invalid_argument("mc_norm_ratio: need 8 <= P <= d, trials >= 1");
  const double lo = std::sqrt(static_cast<double>(P)) / (3.0 * std::sqrt(static_cast<double>(d)));
  const double hi = 3.0 * std::sqrt(static_cast<double>(P)) / std::sqrt(static_cast<double>(d));
  long events = 0;
  std::vector<double> sq(static_cast<std::size_t>(trials));
  for (long i = 0; i < trials; ++i) {
    StreamRng rng(seed, StreamTag::init_stats_trial, static_cast<std::uint64_t>(i));
    const Vector v = sample_sphere(d, rng);
    const double head = v.head(P).squaredNorm() / v.squaredNorm();
    sq[static_cast<std::size_t>(i)] = head;
    const double ratio = std::sqrt(head);
    if (ratio >= lo - 1e-15 && ratio <= hi + 1e-15) ++events;
  }
  NormRatioReport r;
  r.inside = finish(trials, events, 0.99);
  r.inside.pass = r.inside.frequency >= r.inside.bound - 2.0 * r.inside.se;
  const MeanSe ms = mean_se(sq);
  r.mean_sq = ms.mean;
  r.mean_sq_se = ms.se;
  return r;
}

double gap_width_formula(int P, double c, double delta) {
  if (P < 2 || !(c > 0.0) || !(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("gap_width_formula: need P >= 2, c > 0, delta in (0, 1)");
  const double Pd = static_cast<double>(P);
  return 400.0 * c * std::pow(Pd, 8.0 * c * c) * std::sqrt(std::log(Pd)) * std::log(std::max(Pd, 1.0 / delta));
}

int calibrated_gap_width(int P, double delta, const std::vector<int>& ladder, long trials, std::uint64_t seed) {
  const std::vector<double> freq = mc_gap_ladder(P, ladder, trials, seed);
  for (std::size_t i = 0; i < ladder.size(); ++i)
    if (freq[i] - 2.0 * binomial_se(freq[i], trials) >= 1.0 - delta) return ladder[i];
  return -1;
}

SphereMoments sphere_moments(int d, long trials, std::uint64_t seed) {
  if (d < 1 || trials < 2) throw std::invalid_argument("sphere_moments: need d >= 1, trials >= 2");
  std::vector<double> a(static_cast<std::size_t>(trials));
  std::vector<double> b(static_cast<std::size_t>(trials));
  for (long i = 0; i < trials; ++i) {
    StreamRng rng(seed, StreamTag::init_stats_trial, static_cast<std::uint64_t>(i));
    const double v1 = sample_sphere(d, rng)(0);
    a[static_cast<std::size_t>(i)] = v1 * v1;
    b[static_cast<std::size_t>(i)] = v1 * v1 * v1 * v1;
  }
  const MeanSe ma = mean_se(a);
  const MeanSe mb = mean_se(b);
  const double dd = static_cast<double>(d);
  return {ma.mean, ma.se, 1.0 / dd, mb.mean, mb.se, 3.0 / (dd * (dd + 2.0))};
}

}  // namespace mil
