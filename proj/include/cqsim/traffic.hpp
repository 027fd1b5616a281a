#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cqsim/core.hpp"

namespace cqsim {

// Two-state Gilbert-Elliott chain, state 0 = OFF, state 1 = ON.
struct OnOffModel {
  double p00 = 1.0, p01 = 0.0, p10 = 0.0, p11 = 1.0;

  static OnOffModel from_rates(double p01, double p10) {
    return OnOffModel{1.0 - p01, p01, p10, 1.0 - p10};
  }
  void validate() const;
  double rate() const { return p01 / (p10 + p01); }
  // Lag-one autocorrelation of the ON indicator.
  double alpha() const { return p11 - p01; }
};

// The example chain used throughout the load-balancing analysis:
// mean ON burst 10 slots, stationary rate 1/40.
inline OnOffModel example_onoff_model() { return OnOffModel::from_rates(1.0 / 390.0, 0.1); }

struct TrafficMatrix {
  int N = 0;
  std::vector<double> rates;  // row-major, rates[i*N + j]

  TrafficMatrix() = default;
  explicit TrafficMatrix(int n) : N(n), rates(static_cast<std::size_t>(n) * n, 0.0) {}

  double& at(int i, int j) { return rates[static_cast<std::size_t>(i) * N + j]; }
  double at(int i, int j) const { return rates[static_cast<std::size_t>(i) * N + j]; }
  double row_sum(int i) const;
  double col_sum(int j) const;
  // Non-negative entries, every row and column sum at most 1.
  void validate() const;
};

TrafficMatrix uniform_matrix(int N, double mu);
TrafficMatrix hotspot_matrix(int N, double mu, double a);
TrafficMatrix read_matrix_csv(std::istream& in, int N);

struct LrdModel {
  double H = 0.75;
  int L = 1000;
  double mu = 0.9;
  void validate() const;
};

struct PacketRecord {
  std::int64_t time_ns = 0;
  std::int64_t len_bytes = 0;
  std::string flow_key;
};

// Single-draw primitives.
bool bernoulli_next(double rate, RngStream& rng);

struct OnOffStep {
  bool arrival;
  int state;
};
OnOffStep onoff_next(const OnOffModel& model, int state, RngStream& rng);

// Heavy-tailed ON/OFF source. ON lengths follow a discrete Pareto law with
// shape 3-2H truncated to [1, L]; OFF lengths are geometric on {0, 1, ...}
// with the mean that makes the long-run rate equal to mu.
class LrdProcess {
 public:
  explicit LrdProcess(const LrdModel& model);

  struct Step {
    bool arrival;
    bool burst_start;  // first cell of a new burst: draw a fresh destination
  };
  Step next(RngStream& rng);

  double mean_on() const { return mean_on_; }
  double mean_off() const { return mean_off_; }
  int draw_on_length(RngStream& rng) const;
  std::int64_t draw_off_length(RngStream& rng) const;

 private:
  LrdModel model_;
  double shape_;
  double tail_floor_;  // (L+1)^-shape
  double mean_on_;
  double mean_off_;
  double off_continue_;  // geometric continuation probability
  std::int64_t remaining_on_ = 0;
  std::int64_t remaining_off_ = 0;
  bool started_ = false;
};

// Mean of the truncated discrete Pareto ON length.
double lrd_mean_on(double H, int L);

// Source of per-slot arrivals for all inputs of a switch. Implementations
// assign per-flow sequence numbers and never emit more than one cell per
// input per slot; cells are appended in increasing input order.
class TrafficSource {
 public:
  virtual ~TrafficSource() = default;
  virtual void next_slot(Slot slot, std::vector<Cell>& out) = 0;
  virtual int ports() const = 0;
};

class FlowSequencer {
 public:
  explicit FlowSequencer(int n) : n_(n), next_(static_cast<std::size_t>(n) * n, 1) {}
  Cell make(int input, int output, Slot slot) {
    return Cell{input, output, next_[static_cast<std::size_t>(input) * n_ + output]++, slot, 0, 0};
  }

 private:
  int n_;
  std::vector<std::uint64_t> next_;
};

// Samples a destination from one row of a traffic matrix.
class DestinationPicker {
 public:
  DestinationPicker() = default;
  explicit DestinationPicker(std::vector<double> weights);
  int pick(RngStream& rng) const;
  double total() const { return total_; }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

// Independent Bernoulli arrivals per input with rate row_sum(i), destination
// drawn from the row.
std::unique_ptr<TrafficSource> make_bernoulli_source(const TrafficMatrix& m, std::uint64_t seed);
// One Gilbert-Elliott chain per input; each ON burst picks one destination.
// The chain is started from its stationary law.
std::unique_ptr<TrafficSource> make_onoff_source(const OnOffModel& model, const TrafficMatrix& dest,
                                                 std::uint64_t seed);
// One LrdProcess per input with load = row_sum(i) of the destination matrix;
// every cell of a burst shares a destination drawn from the row.
std::unique_ptr<TrafficSource> make_lrd_source(double H, int L, const TrafficMatrix& dest,
                                               std::uint64_t seed);

// Trace ingestion.
struct ScheduledCell {
  Slot slot;
  int input;
  int output;
  std::uint64_t seq;
};

using FlowTable = std::map<std::string, int>;

// Converts one input's packet trace into a per-slot cell schedule. Packets
// become ceil(len/cell_bytes) back-to-back cells starting at the first free
// slot at or after floor(time_ns/slot_ns).
std::vector<ScheduledCell> ingest_trace(const std::vector<PacketRecord>& records, int input,
                                        int cell_bytes, std::int64_t slot_ns, int N,
                                        const FlowTable& table);

std::vector<PacketRecord> read_trace_csv(std::istream& in);
FlowTable read_flow_table_csv(std::istream& in);

// Replays a merged schedule. Cells must be sorted by (slot, input) with at
// most one cell per (slot, input).
std::unique_ptr<TrafficSource> make_schedule_source(int N, std::vector<ScheduledCell> cells);

// Merges per-input schedules (each sorted by slot) into one slot/input order
// and renumbers sequence numbers per (input, output) flow.
std::vector<ScheduledCell> merge_schedules(std::vector<std::vector<ScheduledCell>> per_input);

}  // namespace cqsim
