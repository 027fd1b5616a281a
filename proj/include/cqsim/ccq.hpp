#pragma once

#include <vector>

#include "cqsim/fabric.hpp"

namespace cqsim {

struct ArbiterState {
  int A = 0;   // last polled crosspoint
  Tag R = 0;   // completed polling cycles
};

struct Notification {
  Tag CA = 0;
  int SN = 0;
  bool active = false;
};

// Two-stage chained CQ switch: round-robin load balancer in front of a
// crosspoint array whose columns form daisy chains. Supports the OCF
// (oldest timestamp first) and RR (wait-counter) schedulers with deflection
// to the predecessor crosspoint.
class CcqSwitch final : public Fabric {
 public:
  explicit CcqSwitch(const SwitchConfig& cfg);
  void step(Slot slot, std::span<const Cell> arrivals, StepResult& out) override;
  std::int64_t column_occupancy(int output) const override { return col_[output]; }
  std::int64_t resident() const override;
  FabricStats stats() const override { return stats_; }

  // Crosspoint (x, j) contents in tag order, and its anticipatory counter.
  std::vector<Cell> cells(int x, int j) const;
  int occupancy(int x, int j) const { return size_[at(x, j)]; }
  Tag anticipatory(int x, int j) const { return ant_[at(x, j)]; }
  const ArbiterState& arbiter(int j) const { return arb_[j]; }

  // State seeding, used to set up hand-traced scenarios.
  void preload(int x, int j, Cell c);
  void set_anticipatory(int x, int j, Tag v) { ant_[at(x, j)] = reduce(v); }
  void set_arbiter(int j, int A, Tag R) { arb_[j] = {A, reduce(R)}; }

  // Tag arithmetic in the configured counter space.
  Tag reduce(Tag v) const;
  Tag add(Tag a, Tag d) const { return M_ == 0 ? a + d : reduce(a + d); }
  // Signed difference a - b; modular runs map it into (-M/2, M/2].
  Tag diff(Tag a, Tag b) const { return M_ == 0 ? a - b : mod_diff(a, b); }

 private:
  // Storage is column-major: crosspoints of one output are adjacent.
  std::size_t at(int x, int j) const { return static_cast<std::size_t>(j) * cfg_.N + x; }
  Cell& slot_ref(std::size_t q, int k) { return buf_[q * cap_ + ((head_[q] + k) & mask_)]; }
  const Cell& slot_ref(std::size_t q, int k) const { return buf_[q * cap_ + ((head_[q] + k) & mask_)]; }
  const Cell& front(std::size_t q) const { return slot_ref(q, 0); }
  const Cell& back(std::size_t q) const { return slot_ref(q, size_[q] - 1); }
  void refresh(std::size_t q) {
    if (size_[q] > 0) {
      front_tag_[q] = front(q).tag;
      back_tag_[q] = back(q).tag;
    }
  }
  Cell pop_front(std::size_t q);
  void push_back(std::size_t q, const Cell& c);
  void insert_sorted(std::size_t q, const Cell& c);
  Tag mod_diff(Tag a, Tag b) const;
  void arrive(Slot slot, std::span<const Cell> arrivals, StepResult& out);
  void notify();
  void depart_ocf(StepResult& out);
  void depart_rr(StepResult& out);
  void deflect(StepResult& out);
  void measure_span();

  bool rr_;
  int K_;
  Tag M_;
  std::size_t cap_;
  std::uint32_t mask_;
  std::vector<Cell> buf_;
  std::vector<std::uint32_t> head_;
  std::vector<int> size_;
  std::vector<Tag> ant_;
  std::vector<Tag> front_tag_;  // valid while the queue is nonempty
  std::vector<Tag> back_tag_;
  std::vector<std::int64_t> col_;
  std::vector<ArbiterState> arb_;
  // Per (x, j): fresh notification from this slot's arrival; pending relay.
  std::vector<Notification> fresh_;
  std::vector<Notification> relay_;
  std::vector<std::size_t> fresh_list_;
  std::vector<std::size_t> relay_list_;
  std::vector<std::size_t> next_relay_list_;
  std::vector<std::pair<std::size_t, Notification>> outbox_;
  std::vector<int> occ_snapshot_;
  std::vector<Cell> moving_;
  std::vector<int> moving_to_;
  FabricStats stats_;
};

}  // namespace cqsim
