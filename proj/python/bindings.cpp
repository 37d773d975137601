#include "mil/config.hpp"
#include "mil/experiment.hpp"
#include "mil/gf_oracle.hpp"
#include "mil/gradients.hpp"
#include "mil/gronwall.hpp"
#include "mil/init_stats.hpp"
#include "mil/ridge.hpp"
#include "mil/trainer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace mil;

namespace {

py::dict diagnostics_dict(const DiagnosticsRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["norm_ratio"] = r.norm_ratio;
  d["rho"] = r.rho;
  d["max_corr"] = r.max_corr;
  d["ema_corr"] = r.ema_corr;
  d["share"] = r.share;
  return d;
}

// JSON round trip through Python's json module keeps the bindings small.
py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-index model learning with online spherical SGD";

  py::class_<LinkSpec>(m, "LinkSpec")
      .def_static("hermite_pair", &LinkSpec::hermite_pair, py::arg("L"), py::arg("cap") = kDefaultCoeffCap)
      .def_static("h2_only", &LinkSpec::h2_only, py::arg("cap") = kDefaultCoeffCap)
      .def_static("abs_value", &LinkSpec::abs_value, py::arg("cap") = kDefaultCoeffCap)
      .def_static("from_name", &LinkSpec::from_name, py::arg("name"), py::arg("L") = 2, py::arg("cap") = kDefaultCoeffCap)
      .def_property_readonly("name", &LinkSpec::name)
      .def_property_readonly("order", &LinkSpec::order)
      .def_property_readonly("coeffs", &LinkSpec::coeffs)
      .def("eval", &LinkSpec::eval)
      .def("deriv", &LinkSpec::deriv)
      .def("__repr__", [](const LinkSpec& l) { return "LinkSpec('" + l.name() + "')"; });

  m.def("hermite_eval", &hermite_eval, py::arg("l"), py::arg("z"));
  m.def("correlated_moment", &correlated_moment, py::arg("link"), py::arg("rho"));

  m.def("make_directions",
        [](int d, int P, const std::string& mode, std::uint64_t seed) {
          return make_directions(d, P, teacher_mode_from_name(mode), seed);
        },
        py::arg("d"), py::arg("P"), py::arg("mode") = "canonical", py::arg("seed") = 0);

  m.def("init_network",
        [](int d, int m_, double a0, std::uint64_t seed) {
          const LearnerModel l = init_network(d, m_, {a0, seed});
          return py::make_tuple(l.a, l.V);
        },
        py::arg("d"), py::arg("m"), py::arg("a0") = 1e-3, py::arg("seed") = 0,
        "Returns (a, V) with neurons as the columns of V.");

  m.def("population_loss",
        [](const Vector& a, const Matrix& V, const Matrix& directions, const LinkSpec& link) {
          return population_loss({a, V}, TargetModel(link, directions)).total;
        },
        py::arg("a"), py::arg("V"), py::arg("directions"), py::arg("link"));

  m.def("population_grad_v",
        [](const Vector& a, const Matrix& V, const Matrix& directions, const LinkSpec& link, int i) {
          return population_grad_v({a, V}, TargetModel(link, directions), i);
        },
        py::arg("a"), py::arg("V"), py::arg("directions"), py::arg("link"), py::arg("i"));

  m.def("train_stage1",
        [](const Vector& a, const Matrix& V, const Matrix& directions, const LinkSpec& link, double eta, double a0,
           long T_max, double threshold, double ema_decay, long diag_stride, std::uint64_t seed) {
          TrainConfig cfg;
          cfg.eta = eta;
          cfg.a0 = a0;
          cfg.T_max = T_max;
          cfg.recovery_threshold = threshold;
          cfg.ema_decay = ema_decay;
          cfg.diag_stride = diag_stride;
          cfg.seed = seed;
          TrainResult r;
          {
            py::gil_scoped_release release;
            r = train_stage1({a, V}, TargetModel(link, directions), cfg);
          }
          py::dict out;
          out["V"] = r.learner.V;
          out["stop_step"] = r.stop_step ? py::object(py::int_(*r.stop_step)) : py::object(py::none());
          out["steps_run"] = r.steps_run;
          py::list traj;
          for (const auto& rec : r.trajectory) traj.append(diagnostics_dict(rec));
          out["trajectory"] = traj;
          return out;
        },
        py::arg("a"), py::arg("V"), py::arg("directions"), py::arg("link"), py::arg("eta"), py::arg("a0") = 1e-3,
        py::arg("T_max") = 100000, py::arg("threshold") = 0.95, py::arg("ema_decay") = 0.99,
        py::arg("diag_stride") = 100, py::arg("seed") = 0);

  m.def("flow",
        [](const Vector& w0, int P, int L, double tau_max, double dt, bool higher_order, long record_every) {
          const auto traj = integrate(w0, P, L, tau_max, dt, higher_order, record_every);
          Vector tau(static_cast<Eigen::Index>(traj.size()));
          Matrix W(static_cast<Eigen::Index>(traj.size()), w0.size());
          for (std::size_t k = 0; k < traj.size(); ++k) {
            tau(static_cast<Eigen::Index>(k)) = traj[k].tau;
            W.row(static_cast<Eigen::Index>(k)) = traj[k].w.transpose();
          }
          return py::make_tuple(tau, W);
        },
        py::arg("w0"), py::arg("P"), py::arg("L"), py::arg("tau_max"), py::arg("dt") = 1e-3,
        py::arg("higher_order") = true, py::arg("record_every") = 1,
        "Gradient flow of the squared coordinates; returns (tau, W) with one row per recorded state.");
  m.def("stage2_rate_constant", &stage2_rate_constant, py::arg("L"), py::arg("c_gap"));
  m.def("stage2_escape_time", &stage2_escape_time, py::arg("w1_0"), py::arg("L"), py::arg("c_L"));

  m.def("verify_envelope",
        [](const std::string& kind, double alpha, double p, double x0, long T, double Xi, double sigma_z,
           double delta, long trials, std::uint64_t seed) {
          GronwallSpec s;
          s.kind = gronwall_kind_from_name(kind);
          s.alpha = alpha;
          s.p = p;
          s.x0 = x0;
          s.T = T;
          s.xi_model = Xi > 0.0 ? XiModel::uniform : XiModel::none;
          s.Xi = Xi;
          s.sigma_z = sigma_z;
          s.delta = delta;
          const EnvelopeReport r = verify_envelope(s, trials, seed);
          py::dict out;
          out["stay_fraction"] = r.stay_fraction;
          out["floor"] = r.theoretical_floor;
          out["condition_satisfied"] = r.condition_satisfied;
          out["pass"] = r.pass;
          return out;
        },
        py::arg("kind"), py::arg("alpha") = 0.0, py::arg("p") = 2.0, py::arg("x0") = 1.0, py::arg("T") = 100,
        py::arg("Xi") = 0.0, py::arg("sigma_z") = 0.0, py::arg("delta") = 0.1, py::arg("trials") = 1000,
        py::arg("seed") = 0);
  m.def("poly_hitting_time", &poly_hitting_time, py::arg("x0"), py::arg("alpha"), py::arg("p"),
        py::arg("target") = 0.9);

  m.def("max_coordinate_frequency",
        [](int d, double K, long trials, std::uint64_t seed) {
          const FrequencyReport r = mc_max_coordinate(d, K, trials, seed);
          return py::make_tuple(r.frequency, r.bound);
        },
        py::arg("d"), py::arg("K"), py::arg("trials"), py::arg("seed") = 0, "Returns (frequency, bound).");

  m.def("default_config", [] { return to_python(nlohmann::json(ExperimentConfig{})); });
  m.def("run_single",
        [](const std::string& config_json, int d, std::uint64_t seed) {
          const ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json));
          SeedRecord r;
          {
            py::gil_scoped_release release;
            r = run_single(cfg, d, seed);
          }
          py::dict out;
          out["stop_step"] = r.stop_step ? py::object(py::int_(*r.stop_step)) : py::object(py::none());
          out["recovered"] = r.recovered;
          out["failed"] = r.failed;
          out["test_mse"] = r.test_mse;
          out["lambda_star"] = r.lambda_star;
          out["final_ema"] = r.final_ema;
          return out;
        },
        py::arg("config_json"), py::arg("d"), py::arg("seed"));
  m.def("scaling_study",
        [](const std::string& config_json, int threads) {
          const ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json));
          RunReport r;
          {
            py::gil_scoped_release release;
            r = scaling_study(cfg, threads);
          }
          return to_python(to_json_report(r));
        },
        py::arg("config_json"), py::arg("threads") = 1);
}
