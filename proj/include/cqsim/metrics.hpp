#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cqsim/fabric.hpp"
#include "cqsim/traffic.hpp"

namespace cqsim {

struct DepartureRecord {
  Slot slot;
  int input;
  int output;
  std::uint64_t seq;
};

// Running totals of one simulation. Rate and delay figures only count cells
// that arrived at or after the warmup slot; the totals cover the whole run.
class MetricsLedger {
 public:
  explicit MetricsLedger(int N, Slot warmup = 0);

  void record(Slot slot, std::span<const Cell> arrivals, const StepResult& r);

  std::int64_t arrivals = 0;
  std::int64_t drops = 0;
  std::int64_t departures = 0;
  double util_sum = 0.0;
  std::int64_t util_samples = 0;
  double delay_sum = 0.0;
  std::int64_t delay_count = 0;

  std::int64_t total_arrivals = 0;
  std::int64_t total_drops = 0;
  std::int64_t total_departures = 0;
  std::int64_t order_violations = 0;
  std::int64_t idle_violations = 0;
  std::vector<DepartureRecord> first_violations;  // at most 16 kept

 private:
  int n_;
  Slot warmup_;
  std::vector<std::uint64_t> last_seq_;
};

// drops / arrivals; throws when nothing arrived.
double drop_rate(const MetricsLedger& m);
// Mean column utilization at drop instants; empty when nothing was dropped.
std::optional<double> critical_utilization(const MetricsLedger& m);
// Mean (departure slot - arrival slot) over departed cells; empty without departures.
std::optional<double> delay_stats(const MetricsLedger& m);
// arrivals = drops + departures + resident over the whole run.
bool conservation_holds(const MetricsLedger& m, std::int64_t resident);

// Entries whose seq does not exceed the previous departure of the same flow.
std::vector<DepartureRecord> verify_flow_order(const std::vector<DepartureRecord>& log);

struct DominanceViolation {
  Slot slot;
  int output;
};

struct DominanceResult {
  std::vector<DominanceViolation> violations;
  MetricsLedger cq;
  MetricsLedger oq;
};

// Drives a CQ-LQF switch and an OQ switch with one arrival stream and
// compares per-output occupancy after every slot.
DominanceResult dominance_check(const SwitchConfig& cq_cfg, const SwitchConfig& oq_cfg,
                                TrafficSource& source, Slot slots);

// Same comparison against two pre-recorded arrival schedules, which must be
// identical.
DominanceResult dominance_check(const SwitchConfig& cq_cfg, const SwitchConfig& oq_cfg,
                                const std::vector<ScheduledCell>& cq_arrivals,
                                const std::vector<ScheduledCell>& oq_arrivals, Slot slots);

}  // namespace cqsim
