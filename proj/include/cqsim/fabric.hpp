#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cqsim/core.hpp"

namespace cqsim {

struct DropEvent {
  Cell cell;
  // Resident cells destined to the dropped cell's output over N*B, taken at
  // the drop instant.
  double utilization;
};

// Everything a fabric reports about one slot. Buffers are reused across
// slots; the fabric clears them at the start of step().
struct StepResult {
  std::vector<DropEvent> drops;
  std::vector<Cell> departures;
  // Outputs that idled although cells destined to them were resident and
  // eligible under the scheme's audit rule.
  int idle_violations = 0;
  int deflections = 0;

  void clear() {
    drops.clear();
    departures.clear();
    idle_violations = 0;
    deflections = 0;
  }
};

struct FabricStats {
  // Largest tag difference between resident cells of one chain (CCQ only).
  std::int64_t max_counter_span = 0;
  std::uint32_t max_deflections = 0;
  std::int64_t total_deflections = 0;
};

class Fabric {
 public:
  virtual ~Fabric() = default;
  // Arrivals must carry at most one cell per input and be sorted by input.
  virtual void step(Slot slot, std::span<const Cell> arrivals, StepResult& out) = 0;
  virtual std::int64_t column_occupancy(int output) const = 0;
  virtual std::int64_t resident() const = 0;
  virtual FabricStats stats() const { return {}; }
  const SwitchConfig& config() const { return cfg_; }

 protected:
  explicit Fabric(const SwitchConfig& cfg) : cfg_(cfg) { cfg_.validate(); }
  SwitchConfig cfg_;
};

// Fixed-capacity FIFO ring.
class CellRing {
 public:
  explicit CellRing(std::size_t capacity = 0) : buf_(capacity) {}
  bool empty() const { return size_ == 0; }
  bool full() const { return size_ == buf_.size(); }
  std::size_t size() const { return size_; }
  const Cell& front() const { return buf_[head_]; }
  const Cell& at(std::size_t k) const { return buf_[(head_ + k) % buf_.size()]; }
  void push_back(const Cell& c) {
    buf_[(head_ + size_) % buf_.size()] = c;
    ++size_;
  }
  Cell pop_front() {
    Cell c = buf_[head_];
    head_ = (head_ + 1) % buf_.size();
    --size_;
    return c;
  }

 private:
  std::vector<Cell> buf_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

// Single-stage crosspoint-queued switch, longest queue first per output,
// uniform random tie-break.
class CqLqfSwitch final : public Fabric {
 public:
  explicit CqLqfSwitch(const SwitchConfig& cfg);
  void step(Slot slot, std::span<const Cell> arrivals, StepResult& out) override;
  std::int64_t column_occupancy(int output) const override { return col_[output]; }
  std::int64_t resident() const override;
  std::size_t occupancy(int input, int output) const { return q(input, output).size(); }
  // Appends a cell to crosspoint (input, output) without a slot step.
  void preload(const Cell& c);

 private:
  CellRing& q(int i, int j) { return queues_[static_cast<std::size_t>(i) * cfg_.N + j]; }
  const CellRing& q(int i, int j) const { return queues_[static_cast<std::size_t>(i) * cfg_.N + j]; }

  std::vector<CellRing> queues_;
  std::vector<int> occ_;  // column-major copy of queue sizes for the LQF scan
  std::vector<std::int64_t> col_;
  std::vector<int> ties_;
  RngStream tie_rng_;
};

// Output-queued reference switch with N*B cells per output and tail drop.
class OqSwitch final : public Fabric {
 public:
  explicit OqSwitch(const SwitchConfig& cfg);
  void step(Slot slot, std::span<const Cell> arrivals, StepResult& out) override;
  std::int64_t column_occupancy(int output) const override {
    return static_cast<std::int64_t>(queues_[output].size());
  }
  std::int64_t resident() const override;
  void preload(const Cell& c);

 private:
  std::vector<CellRing> queues_;
};

std::unique_ptr<Fabric> make_fabric(const SwitchConfig& cfg);

}  // namespace cqsim
