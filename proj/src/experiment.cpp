#include "mil/experiment.hpp"

#include "mil/gradients.hpp"
#include "mil/io.hpp"
#include "mil/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace mil {

using nlohmann::json;

SeedRecord run_single(const ExperimentConfig& cfg, int d, std::uint64_t seed) {
  cfg.validate();
  const LinkSpec link = cfg.link.make();
  const TargetModel target(link, make_directions(d, cfg.P, teacher_mode_from_name(cfg.teacher_mode), seed));

  SeedRecord rec;
  rec.d = d;
  rec.seed = seed;
  rec.link = link.name();
  try {
    LearnerModel learner;
    if (cfg.teacher_copy_debug) {
      learner = teacher_copy(target);
      rec.stop_step = 0;
      rec.recovered = true;
      rec.final_ema.assign(static_cast<std::size_t>(cfg.P), 1.0);
    } else {
      learner = init_network(d, cfg.width(), {cfg.a0, seed});
      TrainConfig tc;
      tc.eta = TrainConfig::eta_from_c(cfg.eta_c, d);
      tc.a0 = cfg.a0;
      tc.T_max = cfg.T_max;
      tc.recovery_threshold = cfg.recovery_threshold;
      tc.ema_decay = cfg.ema_decay;
      tc.diag_stride = cfg.diag_stride;
      tc.seed = seed;
      TrainResult tr = train_stage1(std::move(learner), target, tc);
      learner = std::move(tr.learner);
      rec.stop_step = tr.stop_step;
      rec.recovered = tr.stop_step.has_value();
      rec.steps_run = tr.steps_run;
      rec.final_ema = tr.trajectory.back().ema_corr;
      rec.trajectory = std::move(tr.trajectory);
    }
    const RidgeSelection sel = select_lambda(learner.V, target, cfg.ridge, seed);
    learner.a = sel.a;
    rec.lambda_star = sel.lambda_star;
    rec.a.assign(sel.a.data(), sel.a.data() + sel.a.size());
    StreamRng rng(seed, StreamTag::ridge_test, 0);
    const TestError te = eval_test_error(learner, target, cfg.ridge.N_test, rng);
    rec.test_mse = te.mse;
    rec.test_mse_se = te.mse_se;
    rec.test_l1 = te.l1;
    rec.test_l1_se = te.l1_se;
    rec.final_loss = population_loss(learner, target).total;
  } catch (const std::runtime_error& e) {
    rec.failed = true;
    rec.recovered = false;
    rec.error = e.what();
  }
  return rec;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

RunReport scaling_study(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  RunReport report;
  report.config = cfg;
  const std::size_t n_seeds = cfg.seeds.size();
  report.records.resize(cfg.d_list.size() * n_seeds);
  parallel_for(report.records.size(), threads, [&](std::size_t i) {
    report.records[i] = run_single(cfg, cfg.d_list[i / n_seeds], cfg.seeds[i % n_seeds]);
  });

  bool all_ok = true;
  for (int d : cfg.d_list) {
    std::vector<double> stops;
    long total = 0;
    for (const SeedRecord& r : report.records)
      if (r.d == d) {
        ++total;
        if (r.recovered) stops.push_back(static_cast<double>(*r.stop_step));
      }
    report.success_rate[d] = static_cast<double>(stops.size()) / static_cast<double>(total);
    if (!stops.empty()) report.median_stop[d] = median(stops);
    if (report.success_rate[d] < 0.8 || stops.empty()) all_ok = false;
  }
  if (all_ok && cfg.d_list.size() > 1) {
    for (std::size_t i = 1; i < cfg.d_list.size(); ++i)
      report.ratios.push_back(report.median_stop[cfg.d_list[i]] / report.median_stop[cfg.d_list[i - 1]]);
  }
  report.ratios_reported = all_ok;
  return report;
}

AblationReport ablation_h2_only(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.link.kind != "h2_only") throw std::invalid_argument("ablation_h2_only: link must be h2_only");
  AblationReport report;
  report.config = cfg;
  const int d = cfg.d_list.front();
  ExperimentConfig paired_cfg = cfg;
  paired_cfg.link = {"h2_h2L", std::max(2, cfg.link.L)};
  if (cfg.paired_T_max > 0) paired_cfg.T_max = cfg.paired_T_max;

  report.seeds.resize(cfg.seeds.size());
  parallel_for(cfg.seeds.size(), threads, [&](std::size_t i) {
    AblationSeed& s = report.seeds[i];
    s.run = run_single(cfg, d, cfg.seeds[i]);
    const auto& traj = s.run.trajectory;
    for (const DiagnosticsRecord& r : traj) {
      if (r.norm_ratio_median() >= 1.0) s.subspace_recovered = true;
      for (double c : r.max_corr) s.max_corr_seen = std::max(s.max_corr_seen, c);
    }
    if (!traj.empty())
      for (std::size_t p = 0; p < traj.front().share.size(); ++p) {
        const double s0 = traj.front().share[p];
        const double s1 = traj.back().share[p];
        s.max_share_change = std::max(s.max_share_change, std::abs(s1 / s0 - 1.0));
      }
    if (cfg.paired_hermite) s.paired = run_single(paired_cfg, d, cfg.seeds[i]);
  });

  report.pass = std::all_of(report.seeds.begin(), report.seeds.end(), [&](const AblationSeed& s) {
    return !s.run.failed && s.subspace_recovered && s.max_corr_seen < cfg.recovery_threshold &&
           s.max_share_change <= 0.2 && (!s.paired || s.paired->recovered);
  });
  return report;
}

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json record_json(const SeedRecord& r) {
  return json{{"d", r.d},
              {"seed", r.seed},
              {"link", r.link},
              {"stop_step", r.stop_step ? json(*r.stop_step) : json(nullptr)},
              {"recovered", r.recovered},
              {"failed", r.failed},
              {"error", r.error},
              {"steps_run", r.steps_run},
              {"final_ema", r.final_ema},
              {"final_loss", finite_or_null(r.final_loss)},
              {"test_mse", finite_or_null(r.test_mse)},
              {"test_mse_se", finite_or_null(r.test_mse_se)},
              {"test_l1", finite_or_null(r.test_l1)},
              {"test_l1_se", finite_or_null(r.test_l1_se)},
              {"lambda_star", r.lambda_star},
              {"a", r.a}};
}

std::string summary_csv(const std::vector<const SeedRecord*>& records) {
  std::string out = "d,seed,stop_step,recovered,test_mse,lambda_star\n";
  for (const SeedRecord* r : records)
    out += std::to_string(r->d) + "," + std::to_string(r->seed) + "," +
           (r->stop_step ? std::to_string(*r->stop_step) : std::string()) + "," + (r->recovered ? "true" : "false") +
           "," + format_double(r->test_mse) + "," + format_double(r->lambda_star) + "\n";
  return out;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_trajectories(const std::vector<const SeedRecord*>& records, int P, const std::string& out_dir) {
  for (const SeedRecord* r : records)
    write_text_file(join(out_dir, "traj_" + std::to_string(r->d) + "_" + std::to_string(r->seed) + ".csv"),
                    trajectory_csv(r->trajectory, P));
}

}  // namespace

json to_json_report(const RunReport& report) {
  json j;
  j["config"] = report.config;
  j["records"] = json::array();
  for (const SeedRecord& r : report.records) j["records"].push_back(record_json(r));
  json med = json::object();
  for (const auto& [d, v] : report.median_stop) med[std::to_string(d)] = v;
  json succ = json::object();
  for (const auto& [d, v] : report.success_rate) succ[std::to_string(d)] = v;
  j["median_stop_step"] = med;
  j["success_rate"] = succ;
  j["ratios"] = report.ratios;
  j["ratios_reported"] = report.ratios_reported;
  return j;
}

json to_json_report(const AblationReport& report) {
  json j;
  j["config"] = report.config;
  j["seeds"] = json::array();
  for (const AblationSeed& s : report.seeds) {
    json e{{"run", record_json(s.run)},
           {"subspace_recovered", s.subspace_recovered},
           {"max_corr_seen", s.max_corr_seen},
           {"max_share_change", s.max_share_change}};
    if (s.paired) e["paired"] = record_json(*s.paired);
    j["seeds"].push_back(e);
  }
  j["pass"] = report.pass;
  return j;
}

void emit_outputs(const RunReport& report, const std::string& out_dir) {
  report.config.validate();
  std::vector<const SeedRecord*> records;
  for (const SeedRecord& r : report.records) records.push_back(&r);
  write_text_file(join(out_dir, "run.json"), to_json_report(report).dump(2) + "\n");
  write_text_file(join(out_dir, "summary.csv"), summary_csv(records));
  write_trajectories(records, report.config.P, out_dir);

  std::vector<PlotPoint> fig;
  for (const SeedRecord& r : report.records)
    if (r.recovered) fig.push_back({"seed_" + std::to_string(r.seed), static_cast<double>(r.d), static_cast<double>(*r.stop_step)});
  for (const auto& [d, v] : report.median_stop) fig.push_back({"median", static_cast<double>(d), v});
  const std::string name = report.config.link.kind == "abs" ? "fig1_right.csv" : "fig1_left.csv";
  write_text_file(join(out_dir, name), plot_csv(fig));
}

void emit_outputs(const AblationReport& report, const std::string& out_dir) {
  report.config.validate();
  std::vector<const SeedRecord*> records;
  for (const AblationSeed& s : report.seeds) records.push_back(&s.run);
  write_text_file(join(out_dir, "run.json"), to_json_report(report).dump(2) + "\n");
  write_text_file(join(out_dir, "summary.csv"), summary_csv(records));
  write_trajectories(records, report.config.P, out_dir);

  std::vector<PlotPoint> left;
  std::vector<PlotPoint> right;
  for (const AblationSeed& s : report.seeds) {
    const std::string tag = "seed" + std::to_string(s.run.seed) + "_";
    for (const DiagnosticsRecord& r : s.run.trajectory) {
      const auto t = static_cast<double>(r.t);
      for (std::size_t p = 0; p < r.max_corr.size(); ++p) {
        left.push_back({tag + "max_corr_" + std::to_string(p + 1), t, r.max_corr[p]});
        right.push_back({tag + "share_" + std::to_string(p + 1), t, r.share[p]});
      }
      left.push_back({tag + "norm_ratio_median", t, r.norm_ratio_median()});
    }
  }
  write_text_file(join(out_dir, "fig2_left.csv"), plot_csv(left));
  write_text_file(join(out_dir, "fig2_right.csv"), plot_csv(right));
}

}  // namespace mil
