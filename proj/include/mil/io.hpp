#pragma once

#include "mil/model.hpp"
#include "mil/trainer.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mil {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

/// Writes the file in one go, creating parent directories. Errors carry the path.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Trajectory CSV: t, norm_ratio_{min,median,max}, then max_corr_1..P,
/// ema_corr_1..P and share_1..P.
std::string trajectory_csv(const std::vector<DiagnosticsRecord>& traj, int P);

/// One row of a long-format plot-data file.
struct PlotPoint {
  std::string series;
  double t = 0.0;
  double value = 0.0;
};

std::string plot_csv(const std::vector<PlotPoint>& points);

/// Model snapshot: <stem>.json holds {d, P, m, link, L, layout} and <stem>.bin
/// holds a (m values) followed by V (d x m, row-major), as little-endian float64.
void save_snapshot(const std::string& stem, const LearnerModel& learner, const TargetModel& target);

struct Snapshot {
  LearnerModel learner;
  nlohmann::json header;
};

Snapshot load_snapshot(const std::string& stem);

}  // namespace mil
