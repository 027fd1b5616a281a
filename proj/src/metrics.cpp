#include "cqsim/metrics.hpp"

#include <map>

namespace cqsim {

MetricsLedger::MetricsLedger(int N, Slot warmup)
    : n_(N), warmup_(warmup), last_seq_(static_cast<std::size_t>(N) * N, 0) {}

void MetricsLedger::record(Slot slot, std::span<const Cell> in, const StepResult& r) {
  total_arrivals += static_cast<std::int64_t>(in.size());
  total_drops += static_cast<std::int64_t>(r.drops.size());
  total_departures += static_cast<std::int64_t>(r.departures.size());
  idle_violations += r.idle_violations;
  for (const Cell& c : in)
    if (c.arrival_slot >= warmup_) ++arrivals;
  for (const auto& d : r.drops) {
    if (d.cell.arrival_slot < warmup_) continue;
    ++drops;
    util_sum += d.utilization;
    ++util_samples;
  }
  for (const Cell& c : r.departures) {
    auto& last = last_seq_[static_cast<std::size_t>(c.input) * n_ + c.output];
    if (c.seq <= last) {
      ++order_violations;
      if (first_violations.size() < 16) first_violations.push_back({slot, c.input, c.output, c.seq});
    } else {
      last = c.seq;
    }
    if (c.arrival_slot < warmup_) continue;
    ++departures;
    delay_sum += static_cast<double>(slot - c.arrival_slot);
    ++delay_count;
  }
}

double drop_rate(const MetricsLedger& m) {
  if (m.arrivals == 0) throw ConfigError("drop_rate: no arrivals recorded");
  return static_cast<double>(m.drops) / static_cast<double>(m.arrivals);
}

std::optional<double> critical_utilization(const MetricsLedger& m) {
  if (m.util_samples == 0) return std::nullopt;
  return m.util_sum / static_cast<double>(m.util_samples);
}

std::optional<double> delay_stats(const MetricsLedger& m) {
  if (m.delay_count == 0) return std::nullopt;
  return m.delay_sum / static_cast<double>(m.delay_count);
}

bool conservation_holds(const MetricsLedger& m, std::int64_t resident) {
  return m.total_arrivals == m.total_drops + m.total_departures + resident;
}

std::vector<DepartureRecord> verify_flow_order(const std::vector<DepartureRecord>& log) {
  std::map<std::pair<int, int>, std::uint64_t> last;
  std::vector<DepartureRecord> bad;
  for (const auto& d : log) {
    auto [it, fresh] = last.try_emplace({d.input, d.output}, d.seq);
    if (fresh) continue;
    if (d.seq <= it->second) {
      bad.push_back(d);
    } else {
      it->second = d.seq;
    }
  }
  return bad;
}

namespace {

DominanceResult co_run(const SwitchConfig& cq_cfg, const SwitchConfig& oq_cfg, Slot slots,
                       const auto& next_arrivals) {
  if (cq_cfg.arch != Arch::CQ || oq_cfg.arch != Arch::OQ)
    throw ConfigError("dominance_check: expects a CQ and an OQ configuration");
  if (cq_cfg.N != oq_cfg.N || cq_cfg.B != oq_cfg.B)
    throw ConfigError("dominance_check: both switches need the same N and B");
  CqLqfSwitch cq(cq_cfg);
  OqSwitch oq(oq_cfg);
  const int N = cq_cfg.N;
  DominanceResult res{{}, MetricsLedger(N), MetricsLedger(N)};
  StepResult rc, ro;
  std::vector<Cell> arrivals;
  for (Slot t = 0; t < slots; ++t) {
    arrivals.clear();
    next_arrivals(t, arrivals);
    cq.step(t, arrivals, rc);
    oq.step(t, arrivals, ro);
    res.cq.record(t, arrivals, rc);
    res.oq.record(t, arrivals, ro);
    for (int j = 0; j < N; ++j)
      if (cq.column_occupancy(j) > oq.column_occupancy(j)) res.violations.push_back({t, j});
  }
  return res;
}

}  // namespace

DominanceResult dominance_check(const SwitchConfig& cq_cfg, const SwitchConfig& oq_cfg,
                                TrafficSource& source, Slot slots) {
  if (source.ports() != cq_cfg.N) throw ConfigError("dominance_check: traffic port count differs from N");
  return co_run(cq_cfg, oq_cfg, slots, [&](Slot t, std::vector<Cell>& out) { source.next_slot(t, out); });
}

DominanceResult dominance_check(const SwitchConfig& cq_cfg, const SwitchConfig& oq_cfg,
                                const std::vector<ScheduledCell>& cq_arrivals,
                                const std::vector<ScheduledCell>& oq_arrivals, Slot slots) {
  if (cq_arrivals.size() != oq_arrivals.size())
    throw ConfigError("dominance_check: arrival schedules differ");
  for (std::size_t k = 0; k < cq_arrivals.size(); ++k) {
    const auto& a = cq_arrivals[k];
    const auto& b = oq_arrivals[k];
    if (a.slot != b.slot || a.input != b.input || a.output != b.output || a.seq != b.seq)
      throw ConfigError("dominance_check: arrival schedules differ");
  }
  auto src = make_schedule_source(cq_cfg.N, cq_arrivals);
  return dominance_check(cq_cfg, oq_cfg, *src, slots);
}

}  // namespace cqsim
