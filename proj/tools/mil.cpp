// mil: command-line front end for training runs, scaling studies and the
// recurrence / initialization / gradient-flow checkers.

#include "mil/config.hpp"
#include "mil/experiment.hpp"
#include "mil/gf_oracle.hpp"
#include "mil/gronwall.hpp"
#include "mil/init_stats.hpp"
#include "mil/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitThreshold = 2;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--out", o.out_dir, "output directory (overrides out_dir)");
  cmd->add_option("--seeds", o.seeds, "comma-separated seeds (overrides seeds)");
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

mil::ExperimentConfig resolve_config(const CommonOptions& o, mil::ExperimentConfig defaults = {}) {
  json j = defaults;
  if (!o.config_path.empty()) {
    const json file = json::parse(mil::read_text_file(o.config_path));
    j.merge_patch(file);
  }
  mil::apply_env_overrides(j, mil::mil_environment());
  if (!o.seeds.empty()) mil::apply_env_overrides(j, {{"MIL_SEEDS", o.seeds}});
  if (!o.out_dir.empty()) j["out_dir"] = o.out_dir;
  return mil::parse_config(j);
}

void print_records(const std::vector<mil::SeedRecord>& records) {
  for (const auto& r : records)
    std::printf("d=%d seed=%llu link=%s stop=%s test_mse=%.4g lambda=%.3g%s\n", r.d,
                static_cast<unsigned long long>(r.seed), r.link.c_str(),
                r.stop_step ? std::to_string(*r.stop_step).c_str() : "none", r.test_mse, r.lambda_star,
                r.failed ? (" FAILED: " + r.error).c_str() : "");
}

int cmd_run(const CommonOptions& o) {
  const mil::ExperimentConfig cfg = resolve_config(o);
  mil::RunReport report = mil::scaling_study(cfg, o.threads);
  mil::emit_outputs(report, cfg.out_dir);
  print_records(report.records);
  const bool all = std::all_of(report.records.begin(), report.records.end(), [](const auto& r) { return r.recovered; });
  return all ? kExitOk : kExitThreshold;
}

int cmd_scaling(const CommonOptions& o, double lo, double hi) {
  const mil::ExperimentConfig cfg = resolve_config(o);
  const mil::RunReport report = mil::scaling_study(cfg, o.threads);
  mil::emit_outputs(report, cfg.out_dir);
  print_records(report.records);
  for (const auto& [d, v] : report.median_stop) std::printf("median stop d=%d: %.0f\n", d, v);
  bool ok = report.ratios_reported;
  for (double r : report.ratios) {
    std::printf("ratio %.3f\n", r);
    ok = ok && r >= lo && r <= hi;
  }
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitThreshold;
}

int cmd_ablation(const CommonOptions& o) {
  mil::ExperimentConfig defaults;
  defaults.link = {"h2_only", 2};
  defaults.d_list = {100};
  defaults.P = 10;
  defaults.T_max = 600000;
  const mil::ExperimentConfig cfg = resolve_config(o, defaults);
  const mil::AblationReport report = mil::ablation_h2_only(cfg, o.threads);
  mil::emit_outputs(report, cfg.out_dir);
  for (const auto& s : report.seeds)
    std::printf("seed=%llu subspace=%d max_corr=%.3f share_change=%.3f%s\n",
                static_cast<unsigned long long>(s.run.seed), s.subspace_recovered ? 1 : 0, s.max_corr_seen,
                s.max_share_change, s.paired ? (s.paired->recovered ? " paired=recovered" : " paired=stuck") : "");
  std::printf("%s\n", report.pass ? "PASS" : "FAIL");
  return report.pass ? kExitOk : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online spherical SGD for orthogonal multi-index models"};
  app.require_subcommand(1);

  CommonOptions common;
  auto* run = app.add_subcommand("run", "train every (d, seed) in the config and fit the output layer");
  add_common(run, common);

  double ratio_lo = 1.4, ratio_hi = 2.8;
  auto* scaling = app.add_subcommand("scaling", "median stop step versus d");
  add_common(scaling, common);
  scaling->add_option("--ratio-min", ratio_lo, "lower bound on consecutive median ratios");
  scaling->add_option("--ratio-max", ratio_hi, "upper bound on consecutive median ratios");

  auto* ablation = app.add_subcommand("ablation", "h2-only link: subspace without direction recovery");
  add_common(ablation, common);

  mil::GronwallSpec spec;
  std::string kind = "linear", xi_model = "none", z_model = "gaussian";
  long trials = 2000;
  std::uint64_t seed = 0;
  std::string out_path;
  auto* gron = app.add_subcommand("gronwall-verify", "simulate a noisy recurrence against its envelope");
  gron->add_option("--kind", kind, "linear | zero_drift | polynomial");
  gron->add_option("--alpha", spec.alpha);
  gron->add_option("--p", spec.p);
  gron->add_option("--x0", spec.x0);
  gron->add_option("--T", spec.T);
  gron->add_option("--xi-model", xi_model, "none | uniform | adversarial");
  gron->add_option("--xi", spec.Xi);
  gron->add_option("--delta-xi", spec.delta_xi);
  gron->add_option("--z-model", z_model, "none | gaussian | rademacher | weibull");
  gron->add_option("--sigma", spec.sigma_z);
  gron->add_option("--weibull-c", spec.weibull_c);
  gron->add_flag("--state-coupled", spec.state_coupled);
  gron->add_option("--delta", spec.delta);
  gron->add_option("--trials", trials);
  gron->add_option("--seed", seed);
  gron->add_option("--out", out_path, "write the JSON report here");

  int d = 256, P = 64, m = 0;
  double K = 1.0, delta = 0.2;
  long is_trials = 10000;
  std::string is_out;
  auto* init = app.add_subcommand("init-stats", "Monte Carlo checks of the initialization structure");
  init->add_option("--d", d);
  init->add_option("--P", P, "norm-ratio check runs for P >= 8");
  init->add_option("--K", K);
  init->add_option("--m", m, "width for the gap check; 0 skips it");
  init->add_option("--delta", delta);
  init->add_option("--trials", is_trials);
  init->add_option("--seed", seed);
  init->add_option("--out", is_out, "write the JSON report here");

  int gf_d = 64, gf_P = 5, gf_L = 2;
  double tau = 2.0, dt = 1e-3;
  bool no_higher = false;
  std::string gf_out;
  auto* gf = app.add_subcommand("gf-oracle", "integrate the squared-coordinate gradient flow from a random start");
  gf->add_option("--d", gf_d);
  gf->add_option("--P", gf_P);
  gf->add_option("--L", gf_L);
  gf->add_option("--tau", tau);
  gf->add_option("--dt", dt);
  gf->add_option("--seed", seed);
  gf->add_flag("--no-higher-order", no_higher);
  gf->add_option("--out", gf_out, "write the trajectory CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(common);
    if (*scaling) return cmd_scaling(common, ratio_lo, ratio_hi);
    if (*ablation) return cmd_ablation(common);
    if (*gron) {
      spec.kind = mil::gronwall_kind_from_name(kind);
      spec.xi_model = mil::xi_model_from_name(xi_model);
      spec.z_model = mil::z_model_from_name(z_model);
      const mil::EnvelopeReport r = mil::verify_envelope(spec, trials, seed);
      const json j{{"kind", kind},
                   {"alpha", spec.alpha},
                   {"p", spec.p},
                   {"x0", spec.x0},
                   {"T", spec.T},
                   {"xi_model", xi_model},
                   {"Xi", spec.Xi},
                   {"delta_xi", spec.delta_xi},
                   {"z_model", z_model},
                   {"sigma_z", spec.sigma_z},
                   {"delta", spec.delta},
                   {"trials", r.trials},
                   {"stay_fraction", r.stay_fraction},
                   {"stay_se", r.stay_se},
                   {"theoretical_floor", r.theoretical_floor},
                   {"condition_satisfied", r.condition_satisfied},
                   {"xi_slack", r.conditions.xi_slack},
                   {"sigma2_slack", r.conditions.sigma2_slack},
                   {"pass", r.pass}};
      if (!out_path.empty()) mil::write_text_file(out_path, j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
      return r.pass ? kExitOk : kExitThreshold;
    }
    if (*init) {
      const mil::FrequencyReport mx = mil::mc_max_coordinate(d, K, is_trials, seed);
      json j{{"max_coordinate", {{"d", d}, {"K", K}, {"threshold", mx.threshold}, {"frequency", mx.frequency},
                                 {"se", mx.se}, {"bound", mx.bound}, {"pass", mx.pass}}}};
      bool ok = mx.pass;
      if (P >= 8) {
        const mil::NormRatioReport nr = mil::mc_norm_ratio(d, P, is_trials, seed);
        j["norm_ratio"] = {{"d", d}, {"P", P}, {"frequency", nr.inside.frequency}, {"se", nr.inside.se},
                           {"mean_sq", nr.mean_sq}, {"mean_sq_se", nr.mean_sq_se}, {"pass", nr.inside.pass}};
        ok = ok && nr.inside.pass;
      }
      if (m > 0) {
        const mil::FrequencyReport gap = mil::mc_gap_existence(d, P, m, is_trials, seed, delta);
        j["gap_existence"] = {{"P", P}, {"m", m}, {"frequency", gap.frequency}, {"se", gap.se},
                              {"bound", gap.bound}, {"pass", gap.pass}};
        if (P >= 2) j["gap_existence"]["width_formula"] = mil::gap_width_formula(P, 1.0, delta);
        ok = ok && gap.pass;
      }
      j["pass"] = ok;
      if (!is_out.empty()) mil::write_text_file(is_out, j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
      return ok ? kExitOk : kExitThreshold;
    }
    if (*gf) {
      mil::StreamRng rng(seed, mil::StreamTag::init_neuron, 0);
      const mil::Vector v = mil::sample_sphere(gf_d, rng);
      const mil::Vector w0 = v.cwiseAbs2();
      const auto traj = mil::integrate(w0, gf_P, gf_L, tau, dt, !no_higher, std::max(1L, std::lround(0.01 / dt)));
      std::ostringstream csv;
      csv << "tau";
      const int shown = std::min(gf_d, 16);
      for (int k = 1; k <= shown; ++k) csv << ",w" << k;
      csv << ",norm_ratio\n";
      for (const auto& s : traj) {
        csv << mil::format_double(s.tau);
        for (int k = 0; k < shown; ++k) csv << "," << mil::format_double(s.w(k));
        csv << "," << mil::format_double(mil::flow_norm_ratio(s.w, gf_P)) << "\n";
      }
      if (!gf_out.empty())
        mil::write_text_file(gf_out, csv.str());
      else
        std::cout << csv.str();
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mil: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
