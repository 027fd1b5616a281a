#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqsim/metrics.hpp"
#include "cqsim/traffic.hpp"

namespace cqsim {

// Line-oriented `key = value` text. Blank lines and lines starting with '#'
// are ignored; keys are dotted (`switch.N`). Later assignments win.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, std::filesystem::path base_dir = {});
  static KeyValueConfig load(const std::filesystem::path& file);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, std::string> entries_;
  std::filesystem::path base_dir_;
};

// Every key accepted by scenario_from_config and sweeps.
const std::vector<std::string>& known_config_keys();

struct TrafficSpec {
  std::string kind = "bernoulli";  // bernoulli | onoff | lrd | trace
  double mu = 0.9;
  std::string dest = "uniform";    // uniform | hotspot | matrix
  double a = 0.0;
  std::string matrix_path;
  double H = 0.75;
  int L = 1000;
  double p01 = 1.0 / 390.0;
  double p10 = 0.1;
  std::vector<std::string> trace_paths;  // one file per input, in input order
  std::string table_path;
  std::int64_t slot_ns = 5;
  int cell_bytes = 64;
};

struct Scenario {
  SwitchConfig sw;
  TrafficSpec traffic;
  Slot slots = 100000;
  Slot warmup = 0;
  std::uint64_t seed = 1;
  void validate() const;
};

Scenario scenario_from_config(const KeyValueConfig& cfg);
std::unique_ptr<TrafficSource> make_traffic(const Scenario& s);

struct RunSummary {
  double drop_rate = 0.0;
  std::optional<double> critical_util;
  std::optional<double> mean_delay;
  std::int64_t order_violations = 0;
  std::int64_t idle_violations = 0;
  std::int64_t max_counter_span = 0;
  std::uint32_t max_deflections = 0;
  std::int64_t arrivals = 0;
  std::int64_t drops = 0;
  std::int64_t departures = 0;
  std::int64_t resident = 0;
  bool conserved = true;

  bool audits_clean() const { return order_violations == 0 && idle_violations == 0 && conserved; }
};

RunSummary run_scenario(const Scenario& s);

struct SweepRow {
  std::string axis_value;
  std::uint64_t seed;
  RunSummary summary;
};

struct SweepSpec {
  KeyValueConfig base;
  std::string axis;
  std::vector<std::string> values;
  std::vector<std::uint64_t> seeds;
  int threads = 1;
};

SweepSpec sweep_from_config(const KeyValueConfig& cfg);
// Rows come back ordered by (value, seed) in input order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

// CSV output.
std::string format_number(double v);
std::string csv_header_comment();
std::string csv_columns();
std::string csv_row(const std::string& axis_value, std::uint64_t seed, const RunSummary& s);

}  // namespace cqsim
