#include "cqsim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "cqsim/fabric.hpp"

namespace cqsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError(key + ": cannot parse '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "on" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "off" || text == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

Sched default_sched(Arch a) {
  switch (a) {
    case Arch::CQ:
      return Sched::LQF;
    case Arch::OQ:
      return Sched::FIFO;
    case Arch::CCQ:
      return Sched::RR;
    case Arch::PCQ:
      return Sched::GLQF_MWM;
  }
  return Sched::LQF;
}

std::string resolve(const KeyValueConfig& cfg, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !cfg.base_dir().empty()) path = cfg.base_dir() / path;
  return path.string();
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, std::filesystem::path base_dir) {
  KeyValueConfig cfg;
  cfg.base_dir_ = std::move(base_dir);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.set(key, trim(t.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
  return parse(in, file.parent_path());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = known_config_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key + ": unknown key");
  entries_[key] = value;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "switch.N",      "switch.B",       "switch.arch",   "switch.sched",     "switch.w",
      "switch.r",      "switch.s_w",     "switch.s_r",    "switch.K",         "switch.lb",
      "switch.dr",     "switch.counter_modulus",          "traffic.kind",     "traffic.mu",
      "traffic.dest",  "traffic.a",      "traffic.matrix", "traffic.H",       "traffic.L",
      "traffic.p01",   "traffic.p10",    "traffic.trace", "traffic.table",    "traffic.slot_ns",
      "traffic.cell_bytes",              "run.slots",     "run.warmup",       "run.seed",
      "sweep.axis",    "sweep.values",   "sweep.seeds",   "sweep.threads"};
  return keys;
}

void Scenario::validate() const {
  sw.validate();
  if (slots < 1) throw ConfigError("run.slots: must be >= 1");
  if (warmup < 0 || warmup >= slots) throw ConfigError("run.warmup: need 0 <= warmup < slots");
  const auto& k = traffic.kind;
  if (k != "bernoulli" && k != "onoff" && k != "lrd" && k != "trace")
    throw ConfigError("traffic.kind: expected bernoulli, onoff, lrd or trace");
  const auto& d = traffic.dest;
  if (d != "uniform" && d != "hotspot" && d != "matrix")
    throw ConfigError("traffic.dest: expected uniform, hotspot or matrix");
  if (!(traffic.mu >= 0.0 && traffic.mu <= 1.0)) throw ConfigError("traffic.mu: must lie in [0, 1]");
  if (k == "lrd") LrdModel{traffic.H, traffic.L, 1.0}.validate();
  if (k == "onoff") OnOffModel::from_rates(traffic.p01, traffic.p10).validate();
  if (k == "trace" && static_cast<int>(traffic.trace_paths.size()) > sw.N)
    throw ConfigError("traffic.trace: more trace files than inputs");
  if (k == "trace" && traffic.table_path.empty()) throw ConfigError("traffic.table: required for trace traffic");
}

Scenario scenario_from_config(const KeyValueConfig& cfg) {
  Scenario s;
  auto str = [&](const char* key, auto& field) {
    if (auto v = cfg.get(key)) field = *v;
  };
  auto num = [&](const char* key, auto& field) {
    using T = std::remove_reference_t<decltype(field)>;
    if (auto v = cfg.get(key)) field = parse_number<T>(key, *v);
  };
  auto& sw = s.sw;
  num("switch.N", sw.N);
  num("switch.B", sw.B);
  if (auto v = cfg.get("switch.arch")) sw.arch = parse_arch(*v);
  sw.sched = default_sched(sw.arch);
  if (auto v = cfg.get("switch.sched")) sw.sched = parse_sched(*v);
  num("switch.w", sw.w);
  num("switch.r", sw.r);
  num("switch.s_w", sw.s_w);
  num("switch.s_r", sw.s_r);
  num("switch.K", sw.K);
  if (auto v = cfg.get("switch.K"); v && sw.K < 0) throw ConfigError("switch.K: must be >= 0");
  if (auto v = cfg.get("switch.lb")) sw.lb_enabled = parse_bool("switch.lb", *v);
  if (auto v = cfg.get("switch.dr")) sw.dr_enabled = parse_bool("switch.dr", *v);
  num("switch.counter_modulus", sw.counter_modulus);

  auto& t = s.traffic;
  str("traffic.kind", t.kind);
  num("traffic.mu", t.mu);
  str("traffic.dest", t.dest);
  num("traffic.a", t.a);
  if (auto v = cfg.get("traffic.matrix")) t.matrix_path = resolve(cfg, *v);
  num("traffic.H", t.H);
  num("traffic.L", t.L);
  num("traffic.p01", t.p01);
  num("traffic.p10", t.p10);
  if (auto v = cfg.get("traffic.trace"))
    for (const auto& p : split_list(*v)) t.trace_paths.push_back(resolve(cfg, p));
  if (auto v = cfg.get("traffic.table")) t.table_path = resolve(cfg, *v);
  num("traffic.slot_ns", t.slot_ns);
  num("traffic.cell_bytes", t.cell_bytes);

  num("run.slots", s.slots);
  num("run.warmup", s.warmup);
  num("run.seed", s.seed);
  sw.seed = s.seed;
  s.validate();
  return s;
}

std::unique_ptr<TrafficSource> make_traffic(const Scenario& s) {
  const auto& t = s.traffic;
  const int N = s.sw.N;
  if (t.kind == "trace") {
    std::ifstream tin(t.table_path);
    if (!tin) throw ConfigError("traffic.table: cannot open '" + t.table_path + "'");
    const FlowTable table = read_flow_table_csv(tin);
    std::vector<std::vector<ScheduledCell>> per_input;
    for (std::size_t i = 0; i < t.trace_paths.size(); ++i) {
      std::ifstream in(t.trace_paths[i]);
      if (!in) throw ConfigError("traffic.trace: cannot open '" + t.trace_paths[i] + "'");
      per_input.push_back(ingest_trace(read_trace_csv(in), static_cast<int>(i), t.cell_bytes, t.slot_ns, N, table));
    }
    return make_schedule_source(N, merge_schedules(std::move(per_input)));
  }
  TrafficMatrix m;
  if (t.dest == "uniform") {
    m = uniform_matrix(N, t.mu);
  } else if (t.dest == "hotspot") {
    m = hotspot_matrix(N, t.mu, t.a);
  } else {
    std::ifstream in(t.matrix_path);
    if (!in) throw ConfigError("traffic.matrix: cannot open '" + t.matrix_path + "'");
    m = read_matrix_csv(in, N);
  }
  if (t.kind == "bernoulli") return make_bernoulli_source(m, s.seed);
  if (t.kind == "onoff") {
    // The chain sets the load; the matrix only chooses destinations.
    if (t.dest == "uniform") m = uniform_matrix(N, 1.0);
    return make_onoff_source(OnOffModel::from_rates(t.p01, t.p10), m, s.seed);
  }
  return make_lrd_source(t.H, t.L, m, s.seed);
}

RunSummary run_scenario(const Scenario& s) {
  s.validate();
  auto fabric = make_fabric(s.sw);
  auto source = make_traffic(s);
  MetricsLedger ledger(s.sw.N, s.warmup);
  StepResult step;
  std::vector<Cell> arrivals;
  arrivals.reserve(s.sw.N);
  for (Slot t = 0; t < s.slots; ++t) {
    arrivals.clear();
    source->next_slot(t, arrivals);
    fabric->step(t, arrivals, step);
    ledger.record(t, arrivals, step);
  }
  RunSummary out;
  out.drop_rate = ledger.arrivals > 0 ? drop_rate(ledger) : 0.0;
  out.critical_util = critical_utilization(ledger);
  out.mean_delay = delay_stats(ledger);
  out.order_violations = ledger.order_violations;
  out.idle_violations = ledger.idle_violations;
  const auto st = fabric->stats();
  out.max_counter_span = st.max_counter_span;
  out.max_deflections = st.max_deflections;
  out.arrivals = ledger.arrivals;
  out.drops = ledger.drops;
  out.departures = ledger.departures;
  out.resident = fabric->resident();
  out.conserved = conservation_holds(ledger, out.resident);
  return out;
}

SweepSpec sweep_from_config(const KeyValueConfig& cfg) {
  SweepSpec spec;
  spec.base = cfg;
  const auto axis = cfg.get("sweep.axis");
  if (!axis) throw ConfigError("sweep.axis: required");
  spec.axis = *axis;
  const auto& keys = known_config_keys();
  if (spec.axis.rfind("sweep.", 0) == 0 || std::find(keys.begin(), keys.end(), spec.axis) == keys.end())
    throw ConfigError("sweep.axis: '" + spec.axis + "' is not a scenario parameter");
  const auto values = cfg.get("sweep.values");
  if (!values) throw ConfigError("sweep.values: required");
  spec.values = split_list(*values);
  if (spec.values.empty()) throw ConfigError("sweep.values: empty list");
  if (auto v = cfg.get("sweep.seeds")) {
    for (const auto& s : split_list(*v)) spec.seeds.push_back(parse_number<std::uint64_t>("sweep.seeds", s));
  } else {
    std::uint64_t seed = 1;
    if (auto r = cfg.get("run.seed")) seed = parse_number<std::uint64_t>("run.seed", *r);
    spec.seeds.push_back(seed);
  }
  if (spec.seeds.empty()) throw ConfigError("sweep.seeds: empty list");
  if (auto v = cfg.get("sweep.threads")) spec.threads = parse_number<int>("sweep.threads", *v);
  if (spec.threads < 1) throw ConfigError("sweep.threads: must be >= 1");
  // Validate every point before starting any work.
  for (const auto& val : spec.values) {
    KeyValueConfig point = spec.base;
    point.set(spec.axis, val);
    scenario_from_config(point);
  }
  return spec;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  std::vector<SweepRow> rows;
  std::vector<Scenario> points;
  for (const auto& val : spec.values) {
    for (auto seed : spec.seeds) {
      KeyValueConfig point = spec.base;
      point.set(spec.axis, val);
      point.set("run.seed", std::to_string(seed));
      points.push_back(scenario_from_config(point));
      rows.push_back({val, seed, {}});
    }
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(points.size());
  auto worker = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      try {
        rows[k].summary = run_scenario(points[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n = std::min<int>(spec.threads, static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_header_comment() { return "# cqsim results v1"; }

std::string csv_columns() {
  return "axis_value,seed,drop_rate,critical_util,mean_delay,order_violations,max_counter_span,max_deflections";
}

std::string csv_row(const std::string& axis_value, std::uint64_t seed, const RunSummary& s) {
  std::string row = axis_value + "," + std::to_string(seed) + "," + format_number(s.drop_rate) + ",";
  if (s.critical_util) row += format_number(*s.critical_util);
  row += ",";
  if (s.mean_delay) row += format_number(*s.mean_delay);
  row += "," + std::to_string(s.order_violations) + "," + std::to_string(s.max_counter_span) + "," +
         std::to_string(s.max_deflections);
  return row;
}

}  // namespace cqsim
