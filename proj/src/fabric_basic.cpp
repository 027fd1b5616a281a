#include <numeric>

#include "cqsim/ccq.hpp"
#include "cqsim/fabric.hpp"
#include "cqsim/pcq.hpp"

namespace cqsim {

CqLqfSwitch::CqLqfSwitch(const SwitchConfig& cfg)
    : Fabric(cfg), col_(cfg.N, 0), tie_rng_(derive_stream(cfg.seed, "tie:lqf")) {
  if (cfg_.arch != Arch::CQ) throw ConfigError("switch.arch: CqLqfSwitch needs CQ");
  queues_.reserve(static_cast<std::size_t>(cfg_.N) * cfg_.N);
  for (int k = 0; k < cfg_.N * cfg_.N; ++k) queues_.emplace_back(cfg_.B);
  occ_.assign(static_cast<std::size_t>(cfg_.N) * cfg_.N, 0);
  ties_.reserve(cfg_.N);
}

std::int64_t CqLqfSwitch::resident() const {
  return std::accumulate(col_.begin(), col_.end(), std::int64_t{0});
}

void CqLqfSwitch::preload(const Cell& c) {
  auto& queue = q(c.input, c.output);
  if (queue.full()) throw ConfigError("preload: crosspoint full");
  queue.push_back(c);
  ++occ_[static_cast<std::size_t>(c.output) * cfg_.N + c.input];
  ++col_[c.output];
}

void CqLqfSwitch::step(Slot slot, std::span<const Cell> arrivals, StepResult& out) {
  out.clear();
  const int N = cfg_.N;
  const double denom = static_cast<double>(N) * cfg_.B;
  for (const Cell& c : arrivals) {
    auto& queue = q(c.input, c.output);
    if (queue.full()) {
      out.drops.push_back({c, static_cast<double>(col_[c.output]) / denom});
      continue;
    }
    queue.push_back(c);
    ++occ_[static_cast<std::size_t>(c.output) * N + c.input];
    ++col_[c.output];
  }
  for (int j = 0; j < N; ++j) {
    if (col_[j] == 0) continue;
    int best = 0;
    ties_.clear();
    const int* occ = &occ_[static_cast<std::size_t>(j) * N];
    for (int i = 0; i < N; ++i) {
      const int b = occ[i];
      if (b == 0 || b < best) continue;
      if (b > best) {
        best = b;
        ties_.clear();
      }
      ties_.push_back(i);
    }
    const int pick = ties_.size() == 1 ? ties_[0] : ties_[tie_rng_.below(ties_.size())];
    out.departures.push_back(q(pick, j).pop_front());
    --occ_[static_cast<std::size_t>(j) * N + pick];
    --col_[j];
  }
  (void)slot;
}

OqSwitch::OqSwitch(const SwitchConfig& cfg) : Fabric(cfg) {
  if (cfg_.arch != Arch::OQ) throw ConfigError("switch.arch: OqSwitch needs OQ");
  queues_.reserve(cfg_.N);
  for (int j = 0; j < cfg_.N; ++j) queues_.emplace_back(static_cast<std::size_t>(cfg_.N) * cfg_.B);
}

std::int64_t OqSwitch::resident() const {
  std::int64_t s = 0;
  for (const auto& q : queues_) s += static_cast<std::int64_t>(q.size());
  return s;
}

void OqSwitch::preload(const Cell& c) {
  auto& q = queues_[c.output];
  if (q.full()) throw ConfigError("preload: output queue full");
  q.push_back(c);
}

void OqSwitch::step(Slot, std::span<const Cell> arrivals, StepResult& out) {
  out.clear();
  for (const Cell& c : arrivals) {
    auto& q = queues_[c.output];
    if (q.full()) {
      out.drops.push_back({c, 1.0});
      continue;
    }
    q.push_back(c);
  }
  for (auto& q : queues_)
    if (!q.empty()) out.departures.push_back(q.pop_front());
}

std::unique_ptr<Fabric> make_fabric(const SwitchConfig& cfg) {
  cfg.validate();
  switch (cfg.arch) {
    case Arch::CQ:
      return std::make_unique<CqLqfSwitch>(cfg);
    case Arch::OQ:
      return std::make_unique<OqSwitch>(cfg);
    case Arch::CCQ:
      return std::make_unique<CcqSwitch>(cfg);
    case Arch::PCQ:
      return std::make_unique<PcqSwitch>(cfg);
  }
  throw ConfigError("switch.arch: unsupported");
}

}  // namespace cqsim
