#pragma once

#include "mil/config.hpp"
#include "mil/ridge.hpp"
#include "mil/trainer.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mil {

/// Outcome of init -> train_stage1 -> select_lambda -> eval_test_error for one (d, seed).
struct SeedRecord {
  int d = 0;
  std::uint64_t seed = 0;
  std::string link;
  std::optional<long> stop_step;
  bool recovered = false;
  bool failed = false;  // degenerate step or other runtime error
  std::string error;
  long steps_run = 0;
  std::vector<double> final_ema;
  double final_loss = 0.0;  // population loss with the fitted output weights
  double test_mse = 0.0;
  double test_mse_se = 0.0;
  double test_l1 = 0.0;
  double test_l1_se = 0.0;
  double lambda_star = 0.0;
  std::vector<double> a;
  std::vector<DiagnosticsRecord> trajectory;
};

SeedRecord run_single(const ExperimentConfig& cfg, int d, std::uint64_t seed);

struct RunReport {
  ExperimentConfig config;
  std::vector<SeedRecord> records;           // ordered by (d, seed) as in the config
  std::map<int, double> median_stop;         // over recovered runs
  std::map<int, double> success_rate;
  std::vector<double> ratios;                // consecutive median ratios, when every d has >= 80% success
  bool ratios_reported = false;
};

/// Runs `job(i)` for i in [0, n) on `threads` workers. Results must be written
/// into per-index slots so that the outcome does not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job);

RunReport scaling_study(const ExperimentConfig& cfg, int threads = 1);

struct AblationSeed {
  SeedRecord run;
  bool subspace_recovered = false;   // median norm ratio reached 1
  double max_corr_seen = 0.0;        // over the trajectory and all directions
  double max_share_change = 0.0;     // max_p |share_p(end) / share_p(0) - 1|
  std::optional<SeedRecord> paired;  // same seed with h2 + h_{2L}
};

struct AblationReport {
  ExperimentConfig config;
  std::vector<AblationSeed> seeds;
  bool pass = false;  // every seed: subspace recovered, no direction recovered, shares within 20%
};

/// Requires link kind h2_only. Uses d_list.front() as the dimension.
AblationReport ablation_h2_only(const ExperimentConfig& cfg, int threads = 1);

nlohmann::json to_json_report(const RunReport& report);
nlohmann::json to_json_report(const AblationReport& report);

/// run.json, summary.csv, traj_<d>_<seed>.csv and the figure file
/// (fig1_left for h2_h2L, fig1_right for abs).
void emit_outputs(const RunReport& report, const std::string& out_dir);

/// run.json, summary.csv, traj files, fig2_left (max_corr and norm ratio) and
/// fig2_right (shares).
void emit_outputs(const AblationReport& report, const std::string& out_dir);

}  // namespace mil
