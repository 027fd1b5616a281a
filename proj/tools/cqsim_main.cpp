#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cqsim/curves.hpp"
#include "cqsim/scenario.hpp"

using namespace cqsim;

namespace {

void apply_overrides(KeyValueConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    cfg.set(s.substr(0, eq), s.substr(eq + 1));
  }
}

int simulate(const std::string& path, const std::vector<std::string>& sets) {
  auto cfg = KeyValueConfig::load(path);
  apply_overrides(cfg, sets);
  const Scenario s = scenario_from_config(cfg);
  const RunSummary r = run_scenario(s);
  std::cout << csv_header_comment() << '\n' << csv_columns() << '\n' << csv_row("", s.seed, r) << '\n';
  if (!r.audits_clean()) {
    std::cerr << "audit failure: order_violations=" << r.order_violations
              << " idle_violations=" << r.idle_violations << " conserved=" << r.conserved << '\n';
    return 2;
  }
  return 0;
}

int sweep(const std::string& path, const std::vector<std::string>& sets, int threads) {
  auto cfg = KeyValueConfig::load(path);
  apply_overrides(cfg, sets);
  SweepSpec spec = sweep_from_config(cfg);
  if (threads > 0) spec.threads = threads;
  const auto rows = run_sweep(spec);
  std::cout << csv_header_comment() << " axis=" << spec.axis << '\n' << csv_columns() << '\n';
  bool clean = true;
  for (const auto& row : rows) {
    std::cout << csv_row(row.axis_value, row.seed, row.summary) << '\n';
    clean = clean && row.summary.audits_clean();
  }
  return clean ? 0 : 2;
}

int curves(const std::string& kind, const std::vector<std::string>& params) {
  std::map<std::string, std::string> p;
  for (const auto& s : params) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("curves: parameters are key=value, got '" + s + "'");
    p[s.substr(0, eq)] = s.substr(eq + 1);
  }
  std::cout << emit_curves(kind, p);
  return 0;
}

int ingest(const std::string& trace, const std::string& table, std::int64_t slot_ns, int cell_bytes,
           int input, int ports) {
  std::ifstream tin(trace), fin(table);
  if (!tin) throw ConfigError("cannot open trace '" + trace + "'");
  if (!fin) throw ConfigError("cannot open lookup table '" + table + "'");
  const auto cells = ingest_trace(read_trace_csv(tin), input, cell_bytes, slot_ns, ports, read_flow_table_csv(fin));
  std::cout << "# cqsim schedule v1\nslot,input,output,seq\n";
  for (const auto& c : cells) std::cout << c.slot << ',' << c.input << ',' << c.output << ',' << c.seq << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crosspoint-queued switch simulator"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> sets;
  auto* sim = app.add_subcommand("simulate", "Run one scenario and print a CSV row");
  sim->add_option("config", config, "Scenario file")->required();
  sim->add_option("--set", sets, "Override a config entry (key=value)");

  int threads = 0;
  auto* sw = app.add_subcommand("sweep", "Run a parameter sweep");
  sw->add_option("config", config, "Sweep file")->required();
  sw->add_option("--set", sets, "Override a config entry (key=value)");
  sw->add_option("--threads", threads, "Worker threads (overrides sweep.threads)");

  std::string kind;
  std::vector<std::string> params;
  auto* cv = app.add_subcommand("curves", "Emit an analytic curve as CSV");
  cv->add_option("kind", kind, "oq_exponent | cq_lqf_exponent | pcq_exponent | variance_time | lb_distance")
      ->required();
  cv->add_option("params", params, "key=value parameters");

  std::string trace, table;
  std::int64_t slot_ns = 5;
  int cell_bytes = 64, input = 0, ports = 32;
  auto* ing = app.add_subcommand("ingest", "Convert a packet trace into a cell schedule");
  ing->add_option("trace", trace, "Trace CSV (time_ns,len_bytes,flow_key)")->required();
  ing->add_option("table", table, "Lookup CSV (flow_key,output_port)")->required();
  ing->add_option("--slot-ns", slot_ns, "Slot duration in ns")->check(CLI::PositiveNumber);
  ing->add_option("--cell-bytes", cell_bytes, "Cell size in bytes")->check(CLI::PositiveNumber);
  ing->add_option("--input", input, "Input port receiving the trace");
  ing->add_option("--ports", ports, "Switch size N");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(config, sets);
    if (*sw) return sweep(config, sets, threads);
    if (*cv) return curves(kind, params);
    if (*ing) return ingest(trace, table, slot_ns, cell_bytes, input, ports);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
