#include "mil/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mil {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  if (ec) throw std::runtime_error(path + ": cannot create directory: " + ec.message());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trajectory_csv(const std::vector<DiagnosticsRecord>& traj, int P) {
  std::string out = "t,norm_ratio_min,norm_ratio_median,norm_ratio_max";
  for (const char* name : {"max_corr_", "ema_corr_", "share_"})
    for (int p = 1; p <= P; ++p) out += "," + std::string(name) + std::to_string(p);
  out += "\n";
  for (const DiagnosticsRecord& r : traj) {
    out += std::to_string(r.t) + "," + format_double(r.norm_ratio_min()) + "," + format_double(r.norm_ratio_median()) +
           "," + format_double(r.norm_ratio_max());
    for (const auto* v : {&r.max_corr, &r.ema_corr, &r.share})
      for (int p = 0; p < P; ++p)
        out += "," + format_double(static_cast<std::size_t>(p) < v->size() ? (*v)[static_cast<std::size_t>(p)] : NAN);
    out += "\n";
  }
  return out;
}

std::string plot_csv(const std::vector<PlotPoint>& points) {
  std::string out = "series,t,value\n";
  for (const PlotPoint& pt : points) out += pt.series + "," + format_double(pt.t) + "," + format_double(pt.value) + "\n";
  return out;
}

static_assert(std::endian::native == std::endian::little, "snapshots assume a little-endian host");

void save_snapshot(const std::string& stem, const LearnerModel& learner, const TargetModel& target) {
  const json header{{"d", learner.d()},
                    {"P", target.P()},
                    {"m", learner.m()},
                    {"link", target.link().name()},
                    {"L", target.link().order()},
                    {"layout", "a[m] then V[d][m] row-major, float64 little-endian"}};
  write_text_file(stem + ".json", header.dump(2) + "\n");
  std::string blob;
  blob.reserve(static_cast<std::size_t>(learner.m()) * (learner.d() + 1) * sizeof(double));
  auto put = [&blob](double x) {
    char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof x);
    blob.append(bytes, sizeof bytes);
  };
  for (int j = 0; j < learner.m(); ++j) put(learner.a(j));
  for (int r = 0; r < learner.d(); ++r)
    for (int j = 0; j < learner.m(); ++j) put(learner.V(r, j));
  write_text_file(stem + ".bin", blob);
}

Snapshot load_snapshot(const std::string& stem) {
  Snapshot s;
  try {
    s.header = json::parse(read_text_file(stem + ".json"));
  } catch (const json::exception& e) {
    throw std::runtime_error(stem + ".json: " + e.what());
  }
  const int d = s.header.at("d").get<int>();
  const int m = s.header.at("m").get<int>();
  const std::string blob = read_text_file(stem + ".bin");
  const std::size_t expected = static_cast<std::size_t>(m) * static_cast<std::size_t>(d + 1) * sizeof(double);
  if (blob.size() != expected) throw std::runtime_error(stem + ".bin: size does not match header");
  std::size_t off = 0;
  auto get = [&]() {
    double x;
    std::memcpy(&x, blob.data() + off, sizeof x);
    off += sizeof x;
    return x;
  };
  s.learner.a.resize(m);
  s.learner.V.resize(d, m);
  for (int j = 0; j < m; ++j) s.learner.a(j) = get();
  for (int r = 0; r < d; ++r)
    for (int j = 0; j < m; ++j) s.learner.V(r, j) = get();
  return s;
}

}  // namespace mil
