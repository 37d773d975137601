#pragma once

#include "mil/ridge.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mil {

inline constexpr int kConfigSchemaVersion = 1;

struct LinkConfig {
  std::string kind = "h2_h2L";  // "h2_h2L", "h2_only" or "abs"
  int L = 2;

  LinkSpec make() const { return LinkSpec::from_name(kind, L); }
  bool operator==(const LinkConfig&) const = default;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::vector<int> d_list = {32, 64, 128};
  int P = 5;
  LinkConfig link;
  int m = 0;          // 0 selects the rule m = round(c_m P^2)
  double c_m = 2.0;
  double a0 = 1e-3;
  double eta_c = 2e-4;  // eta = eta_c / d
  long T_max = 4000000;
  double recovery_threshold = 0.95;
  double ema_decay = 0.99;
  long diag_stride = 1000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  RidgeConfig ridge;
  std::string teacher_mode = "canonical";
  std::string out_dir = "out";
  bool teacher_copy_debug = false;  // skip Stage 1 and use V = V*
  bool paired_hermite = false;      // ablation: rerun the seeds with h2 + h_{2L}
  long paired_T_max = 0;            // 0 reuses T_max

  int width() const;
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

void to_json(nlohmann::json& j, const RidgeConfig& c);
void from_json(const nlohmann::json& j, RidgeConfig& c);
void to_json(nlohmann::json& j, const LinkConfig& c);
void from_json(const nlohmann::json& j, LinkConfig& c);
void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

/// Missing keys keep their defaults; unknown keys and a schema_version other
/// than the current one are rejected.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
std::string emit_config(const ExperimentConfig& c);

/// Applies MIL_<KEY> variables: "__" separates nested keys (MIL_RIDGE__N) and
/// commas build lists (MIL_SEEDS=1,2,3). Keys are matched case-insensitively
/// against the existing JSON; unknown keys are rejected.
void apply_env_overrides(nlohmann::json& j, const std::map<std::string, std::string>& env);

/// The MIL_* subset of the process environment.
std::map<std::string, std::string> mil_environment();

}  // namespace mil
