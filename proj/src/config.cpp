#include "mil/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

extern char** environ;

namespace mil {

using nlohmann::json;

int ExperimentConfig::width() const {
  return m > 0 ? m : static_cast<int>(std::lround(c_m * P * P));
}

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion) throw std::invalid_argument("config: unsupported schema_version");
  if (d_list.empty()) throw std::invalid_argument("config: d_list must be nonempty");
  for (int d : d_list)
    if (d < P) throw std::invalid_argument("config: every d must be >= P");
  if (P < 1) throw std::invalid_argument("config: P must be positive");
  if (m < 0 || (m == 0 && !(c_m > 0.0))) throw std::invalid_argument("config: need m > 0 or c_m > 0");
  if (width() < 1) throw std::invalid_argument("config: width must be positive");
  if (!(a0 > 0.0) || !(eta_c > 0.0)) throw std::invalid_argument("config: a0 and eta_c must be positive");
  if (T_max < 0 || diag_stride < 1) throw std::invalid_argument("config: need T_max >= 0 and diag_stride >= 1");
  if (seeds.empty()) throw std::invalid_argument("config: seeds must be nonempty");
  if (!(recovery_threshold >= 0.0 && recovery_threshold < 1.0))
    throw std::invalid_argument("config: recovery_threshold must lie in [0, 1)");
  if (!(ema_decay > 0.0 && ema_decay < 1.0)) throw std::invalid_argument("config: ema_decay must lie in (0, 1)");
  (void)link.make();
  (void)teacher_mode_from_name(teacher_mode);
  ridge.validate();
}

void to_json(json& j, const RidgeConfig& c) {
  j = json{{"N", c.N}, {"lambda_grid", c.lambda_grid}, {"N_val", c.N_val}, {"N_test", c.N_test}, {"target_eps", c.target_eps}};
}

namespace {

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      throw std::invalid_argument(std::string(where) + ": unknown key '" + it.key() + "'");
}

}  // namespace

void from_json(const json& j, RidgeConfig& c) {
  reject_unknown(j, {"N", "lambda_grid", "N_val", "N_test", "target_eps"}, "ridge");
  read(j, "N", c.N);
  read(j, "lambda_grid", c.lambda_grid);
  read(j, "N_val", c.N_val);
  read(j, "N_test", c.N_test);
  read(j, "target_eps", c.target_eps);
}

void to_json(json& j, const LinkConfig& c) { j = json{{"kind", c.kind}, {"L", c.L}}; }

void from_json(const json& j, LinkConfig& c) {
  reject_unknown(j, {"kind", "L"}, "link");
  read(j, "kind", c.kind);
  read(j, "L", c.L);
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"schema_version", c.schema_version},
           {"d_list", c.d_list},
           {"P", c.P},
           {"link", c.link},
           {"m", c.m},
           {"c_m", c.c_m},
           {"a0", c.a0},
           {"eta_c", c.eta_c},
           {"T_max", c.T_max},
           {"recovery_threshold", c.recovery_threshold},
           {"ema_decay", c.ema_decay},
           {"diag_stride", c.diag_stride},
           {"seeds", c.seeds},
           {"ridge", c.ridge},
           {"teacher_mode", c.teacher_mode},
           {"out_dir", c.out_dir},
           {"teacher_copy_debug", c.teacher_copy_debug},
           {"paired_hermite", c.paired_hermite},
           {"paired_T_max", c.paired_T_max}};
}

void from_json(const json& j, ExperimentConfig& c) {
  reject_unknown(j,
                 {"schema_version", "d_list", "P", "link", "m", "c_m", "a0", "eta_c", "T_max", "recovery_threshold",
                  "ema_decay", "diag_stride", "seeds", "ridge", "teacher_mode", "out_dir", "teacher_copy_debug",
                  "paired_hermite", "paired_T_max"},
                 "config");
  read(j, "schema_version", c.schema_version);
  read(j, "d_list", c.d_list);
  read(j, "P", c.P);
  read(j, "link", c.link);
  read(j, "m", c.m);
  read(j, "c_m", c.c_m);
  read(j, "a0", c.a0);
  read(j, "eta_c", c.eta_c);
  read(j, "T_max", c.T_max);
  read(j, "recovery_threshold", c.recovery_threshold);
  read(j, "ema_decay", c.ema_decay);
  read(j, "diag_stride", c.diag_stride);
  read(j, "seeds", c.seeds);
  read(j, "ridge", c.ridge);
  read(j, "teacher_mode", c.teacher_mode);
  read(j, "out_dir", c.out_dir);
  read(j, "teacher_copy_debug", c.teacher_copy_debug);
  read(j, "paired_hermite", c.paired_hermite);
  read(j, "paired_T_max", c.paired_T_max);
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c = j.get<ExperimentConfig>();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return parse_config(j);
}

std::string emit_config(const ExperimentConfig& c) { return json(c).dump(2) + "\n"; }

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

json parse_scalar(const std::string& text, const json& like) {
  if (like.is_string()) return text;
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    throw std::invalid_argument("environment override: cannot parse '" + text + "'");
  }
}

json parse_value(const std::string& text, const json& like) {
  if (!like.is_array()) return parse_scalar(text, like);
  const json elem = like.empty() ? json(0) : like.front();
  json arr = json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) arr.push_back(parse_scalar(item, elem));
  return arr;
}

}  // namespace

void apply_env_overrides(json& j, const std::map<std::string, std::string>& env) {
  for (const auto& [name, value] : env) {
    if (name.rfind("MIL_", 0) != 0) continue;
    std::string path = name.substr(4);
    json* node = &j;
    std::size_t start = 0;
    while (true) {
      const std::size_t sep = path.find("__", start);
      const std::string part = lower(path.substr(start, sep == std::string::npos ? std::string::npos : sep - start));
      if (!node->is_object()) throw std::invalid_argument("environment override " + name + ": not an object path");
      json* next = nullptr;
      for (auto k = node->begin(); k != node->end(); ++k)
        if (lower(k.key()) == part) next = &k.value();
      if (next == nullptr) throw std::invalid_argument("environment override " + name + ": unknown key");
      node = next;
      if (sep == std::string::npos) break;
      start = sep + 2;
    }
    *node = parse_value(value, *node);
  }
}

std::map<std::string, std::string> mil_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = entry.substr(0, eq);
    if (key.rfind("MIL_", 0) == 0) out[key] = entry.substr(eq + 1);
  }
  return out;
}

}  // namespace mil
