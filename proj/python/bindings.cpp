#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cqsim/analytics.hpp"
#include "cqsim/curves.hpp"
#include "cqsim/pcq.hpp"
#include "cqsim/scenario.hpp"

namespace py = pybind11;
using namespace cqsim;

namespace {

py::dict mode_dict(const ModeExponent& m) {
  py::dict d;
  d["E"] = m.E;
  d["n_star"] = m.mode.n_star;
  d["r_star"] = m.mode.r_star;
  d["lam_d"] = m.mode.lam_d;
  d["C_d"] = m.mode.C_d;
  d["B_d"] = m.mode.B_d;
  d["gamma_star"] = m.mode.gamma_star;
  return d;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["drop_rate"] = s.drop_rate;
  d["critical_util"] = s.critical_util ? py::cast(*s.critical_util) : py::none();
  d["mean_delay"] = s.mean_delay ? py::cast(*s.mean_delay) : py::none();
  d["order_violations"] = s.order_violations;
  d["idle_violations"] = s.idle_violations;
  d["max_counter_span"] = s.max_counter_span;
  d["max_deflections"] = s.max_deflections;
  d["arrivals"] = s.arrivals;
  d["drops"] = s.drops;
  d["departures"] = s.departures;
  d["resident"] = s.resident;
  d["conserved"] = s.conserved;
  return d;
}

KeyValueConfig config_from(const std::string& text, const std::map<std::string, std::string>& overrides,
                           const std::string& base_dir) {
  std::istringstream in(text);
  auto cfg = KeyValueConfig::parse(in, base_dir);
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Crosspoint-queued switch simulator and overflow analytics";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);

  m.def("lambda_star", &lambda_star, py::arg("x"), py::arg("lam"));
  m.def(
      "exponent_oq",
      [](int n, double C, double lam) {
        const auto e = exponent_oq(n, C, lam);
        return py::make_tuple(e.E, e.gamma_star);
      },
      py::arg("n"), py::arg("C"), py::arg("lam"), "Returns (E, gamma_star).");
  m.def(
      "exponent_cq_lqf", [](int N, double C, double lam) { return mode_dict(exponent_cq_lqf(N, C, lam)); },
      py::arg("N"), py::arg("C"), py::arg("lam"));
  m.def(
      "exponent_pcq",
      [](int N, double C, double lam, int w, int r) { return mode_dict(exponent_pcq(N, C, lam, w, r)); },
      py::arg("N"), py::arg("C"), py::arg("lam"), py::arg("w"), py::arg("r"));
  m.def("pool_simul_arrival_prob", &pool_simul_arrival_prob, py::arg("w"), py::arg("r"), py::arg("lam"),
        py::arg("k"));
  m.def(
      "variance_time",
      [](double p01, double p10, std::int64_t t) {
        return variance_time_onoff(OnOffModel::from_rates(p01, p10), t);
      },
      py::arg("p01"), py::arg("p10"), py::arg("t"));
  m.def(
      "variance_lb_distance",
      [](double p01, double p10, int N, int k, std::int64_t t) {
        const auto r = variance_lb_distance(OnOffModel::from_rates(p01, p10), N, k, t);
        py::dict d;
        d["sigma2_lb"] = r.sigma2_lb;
        d["sigma2_orig"] = r.sigma2_orig;
        d["mean_delta"] = r.mean_delta;
        return d;
      },
      py::arg("p01"), py::arg("p10"), py::arg("N"), py::arg("k"), py::arg("t"));
  m.def(
      "solve_contention",
      [](const std::vector<std::vector<std::int64_t>>& W, int s_r) {
        const int P = static_cast<int>(W.size());
        if (P == 0) throw ConfigError("solve_contention: empty weight matrix");
        const int r = static_cast<int>(W[0].size());
        std::vector<std::int64_t> flat;
        for (const auto& row : W) {
          if (static_cast<int>(row.size()) != r) throw ConfigError("solve_contention: ragged weight matrix");
          flat.insert(flat.end(), row.begin(), row.end());
        }
        const auto res = solve_contention(flat, P, r, s_r);
        return py::make_tuple(res.pool, res.total);
      },
      py::arg("weights"), py::arg("s_r"),
      "weights[pool][output]; returns (pool per output or -1, total weight).");
  m.def(
      "simulate",
      [](const std::string& text, const std::map<std::string, std::string>& overrides, const std::string& base_dir) {
        const Scenario s = scenario_from_config(config_from(text, overrides, base_dir));
        RunSummary r;
        {
          py::gil_scoped_release release;
          r = run_scenario(s);
        }
        return summary_dict(r);
      },
      py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("base_dir") = "",
      "Runs one scenario given as config text.");
  m.def("emit_curves", &emit_curves, py::arg("kind"), py::arg("params") = std::map<std::string, std::string>{});
  m.def("csv_columns", &csv_columns);
}
