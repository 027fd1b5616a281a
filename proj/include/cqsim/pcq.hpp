#pragma once

#include <deque>
#include <vector>

#include "cqsim/fabric.hpp"

namespace cqsim {

struct PoolCoord {
  int I;
  int J;
};

inline PoolCoord pool_of(int input, int output, int w, int r) { return {input / w, output / r}; }

enum class MatchMethod { Auto, Exhaustive, Flow };

// Result of one output group's contention problem. pool[o] is the pool
// serving group output o, or -1.
struct Matching {
  std::vector<int> pool;
  std::int64_t total = 0;
};

// Maximum-weight assignment of r outputs to P pools, each pool serving at
// most s_r outputs. weights is P x r row-major (pools are rows). Only
// positive weights can be matched. Among optimal assignments the one whose
// (pool[0], pool[1], ...) vector is lexicographically smallest wins, with
// "unmatched" ordered after every pool.
Matching solve_contention(const std::vector<std::int64_t>& weights, int P, int r, int s_r,
                          MatchMethod method = MatchMethod::Auto);

// Pooled CQ switch: (N/w) x (N/r) shared buffer pools of w*r*B cells with
// write speedup s_w and read speedup s_r, served by generalized LQF with
// exact matching per output group.
class PcqSwitch final : public Fabric {
 public:
  explicit PcqSwitch(const SwitchConfig& cfg);
  void step(Slot slot, std::span<const Cell> arrivals, StepResult& out) override;
  std::int64_t column_occupancy(int output) const override { return col_[output]; }
  std::int64_t resident() const override;
  std::int64_t pool_occupancy(int I, int J) const { return pool_occ_[idx(I, J)]; }
  // Stores a cell in its pool without a slot step.
  void preload(const Cell& c);

 private:
  std::size_t idx(int I, int J) const { return static_cast<std::size_t>(I) * groups_ + J; }
  std::deque<Cell>& sub(int i, int j) { return subq_[static_cast<std::size_t>(i) * cfg_.N + j]; }

  int rows_;    // N / w
  int groups_;  // N / r
  std::int64_t capacity_;
  std::vector<std::deque<Cell>> subq_;
  std::vector<std::int64_t> pool_occ_;
  std::vector<int> writes_;
  std::vector<std::int64_t> count_;  // cells in pool row I destined to output j: [I*N + j]
  std::vector<std::int64_t> col_;
  std::vector<std::int64_t> weights_;
};

}  // namespace cqsim
