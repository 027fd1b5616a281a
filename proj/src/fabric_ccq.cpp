#include <algorithm>
#include <bit>
#include <numeric>

#include "cqsim/ccq.hpp"

namespace cqsim {

CcqSwitch::CcqSwitch(const SwitchConfig& cfg)
    : Fabric(cfg), rr_(cfg.sched == Sched::RR), K_(cfg.deflection_cap()), M_(cfg.counter_modulus),
      cap_(std::bit_ceil(static_cast<std::size_t>(cfg.B))), mask_(static_cast<std::uint32_t>(cap_ - 1)) {
  if (cfg_.arch != Arch::CCQ) throw ConfigError("switch.arch: CcqSwitch needs CCQ");
  const auto n = static_cast<std::size_t>(cfg_.N) * cfg_.N;
  buf_.resize(n * cap_);
  head_.assign(n, 0);
  size_.assign(n, 0);
  ant_.assign(n, 0);
  front_tag_.assign(n, 0);
  back_tag_.assign(n, 0);
  col_.assign(cfg_.N, 0);
  arb_.assign(cfg_.N, ArbiterState{});
  fresh_.assign(n, Notification{});
  relay_.assign(n, Notification{});
  occ_snapshot_.assign(cfg_.N, 0);
}

Tag CcqSwitch::reduce(Tag v) const {
  if (M_ == 0) return v;
  v %= M_;
  return v < 0 ? v + M_ : v;
}

Tag CcqSwitch::mod_diff(Tag a, Tag b) const {
  Tag d = (a - b) % M_;
  if (d < 0) d += M_;
  return d > M_ / 2 ? d - M_ : d;
}

std::int64_t CcqSwitch::resident() const {
  return std::accumulate(col_.begin(), col_.end(), std::int64_t{0});
}

std::vector<Cell> CcqSwitch::cells(int x, int j) const {
  const auto q = at(x, j);
  std::vector<Cell> out;
  for (int k = 0; k < size_[q]; ++k) out.push_back(slot_ref(q, k));
  return out;
}

Cell CcqSwitch::pop_front(std::size_t q) {
  Cell c = front(q);
  head_[q] = (head_[q] + 1) & mask_;
  --size_[q];
  refresh(q);
  return c;
}

void CcqSwitch::push_back(std::size_t q, const Cell& c) {
  slot_ref(q, size_[q]) = c;
  ++size_[q];
  refresh(q);
}

void CcqSwitch::insert_sorted(std::size_t q, const Cell& c) {
  // Behind every cell with an equal tag. Deflected tags are old, so the
  // slot is usually near the head: shift the prefix one place forward.
  int pos = 0;
  while (pos < size_[q] && diff(slot_ref(q, pos).tag, c.tag) <= 0) ++pos;
  head_[q] = (head_[q] + mask_) & mask_;
  for (int k = 0; k < pos; ++k) slot_ref(q, k) = slot_ref(q, k + 1);
  slot_ref(q, pos) = c;
  ++size_[q];
  refresh(q);
}

void CcqSwitch::preload(int x, int j, Cell c) {
  const auto q = at(x, j);
  if (size_[q] >= cfg_.B) throw ConfigError("preload: crosspoint full");
  c.tag = reduce(c.tag);
  insert_sorted(q, c);
  ++col_[j];
}

void CcqSwitch::step(Slot slot, std::span<const Cell> arrivals, StepResult& out) {
  out.clear();
  arrive(slot, arrivals, out);
  if (rr_) {
    notify();
    depart_rr(out);
  } else {
    depart_ocf(out);
  }
  if (cfg_.dr_enabled) deflect(out);
  if (rr_) measure_span();
}

void CcqSwitch::arrive(Slot slot, std::span<const Cell> arrivals, StepResult& out) {
  const int N = cfg_.N;
  const double denom = static_cast<double>(N) * cfg_.B;
  for (const Cell& in : arrivals) {
    const int j = in.output;
    const int x = cfg_.lb_enabled ? lb_route(in.input, slot, N) : in.input;
    const auto q = at(x, j);
    if (size_[q] >= cfg_.B) {
      out.drops.push_back({in, static_cast<double>(col_[j]) / denom});
      continue;
    }
    Cell c = in;
    c.deflections = 0;
    if (rr_) {
      // The anticipatory counter always exceeds every resident tag.
      c.tag = ant_[q];
      ant_[q] = add(c.tag, 1);
      fresh_[q] = {add(c.tag, x == N - 1 ? 1 : 0), x, true};
      fresh_list_.push_back(q);
    } else {
      c.tag = slot;
    }
    push_back(q, c);
    ++col_[j];
  }
}

void CcqSwitch::notify() {
  const int N = cfg_.N;
  next_relay_list_.clear();
  auto deliver = [&](std::size_t src, const Notification& msg) {
    const int x = static_cast<int>(src % N);
    const int y = x + 1 == N ? 0 : x + 1;
    if (msg.SN == y) return;
    const std::size_t dst = src + 1 - (x + 1 == N ? N : 0);
    if (diff(msg.CA, ant_[dst]) < 0) return;
    ant_[dst] = msg.CA;
    relay_[dst] = {add(msg.CA, y == N - 1 ? 1 : 0), msg.SN, true};
    next_relay_list_.push_back(dst);
  };
  // Pending relays go out unless a fresh notification replaced them. All
  // outgoing messages are fixed before any is delivered.
  for (std::size_t src : relay_list_) {
    Notification msg = relay_[src];
    relay_[src].active = false;
    if (!fresh_[src].active) outbox_.push_back({src, msg});
  }
  for (std::size_t src : fresh_list_) {
    outbox_.push_back({src, fresh_[src]});
    fresh_[src].active = false;
  }
  fresh_list_.clear();
  for (const auto& [src, msg] : outbox_) deliver(src, msg);
  outbox_.clear();
  relay_list_.swap(next_relay_list_);
}

void CcqSwitch::depart_ocf(StepResult& out) {
  const int N = cfg_.N;
  for (int j = 0; j < N; ++j) {
    if (col_[j] == 0) continue;
    std::size_t best = 0;
    bool found = false;
    for (int x = 0; x < N; ++x) {
      const auto q = at(x, j);
      if (size_[q] == 0) continue;
      if (!found || front_tag_[q] < front_tag_[best]) {
        best = q;
        found = true;
      }
    }
    out.departures.push_back(pop_front(best));
    --col_[j];
  }
}

void CcqSwitch::depart_rr(StepResult& out) {
  const int N = cfg_.N;
  const int budget = N + K_ + 1;
  for (int j = 0; j < N; ++j) {
    auto& arb = arb_[j];
    const bool nonempty = col_[j] > 0;
    const int limit = nonempty ? budget : N;
    int x = arb.A;
    int last = x;
    bool served = false;
    for (int p = 0; p < limit; ++p) {
      const auto q = at(x, j);
      last = x;
      if (size_[q] > 0) {
        if (diff(front_tag_[q], arb.R) == 0) {
          out.departures.push_back(pop_front(q));
          --col_[j];
          served = true;
          break;
        }
      } else {
        const Tag next = add(arb.R, 1);
        if (diff(ant_[q], next) < 0) ant_[q] = next;
      }
      if (p + 1 == limit) break;
      if (++x == N) {
        x = 0;
        arb.R = add(arb.R, 1);
      }
    }
    arb.A = last;
    if (nonempty && !served) ++out.idle_violations;
  }
}

void CcqSwitch::deflect(StepResult& out) {
  const int N = cfg_.N;
  for (int j = 0; j < N; ++j) {
    if (col_[j] == 0) continue;
    const std::size_t base = at(0, j);
    for (int x = 0; x < N; ++x) occ_snapshot_[x] = size_[base + x];
    moving_.clear();
    moving_to_.clear();
    for (int x = 0; x < N; ++x) {
      const int pred = x == 0 ? N - 1 : x - 1;
      if (occ_snapshot_[x] <= occ_snapshot_[pred]) continue;
      const auto q = base + x;
      if (rr_ && x == arb_[j].A && diff(front_tag_[q], arb_[j].R) == 0) continue;
      if (static_cast<int>(front(q).deflections) >= K_) continue;
      Cell c = pop_front(q);
      if (rr_ && x == 0) c.tag = add(c.tag, -1);
      ++c.deflections;
      moving_.push_back(c);
      moving_to_.push_back(pred);
    }
    for (std::size_t k = 0; k < moving_.size(); ++k) {
      const auto dst = base + moving_to_[k];
      const Cell& c = moving_[k];
      insert_sorted(dst, c);
      if (rr_ && diff(c.tag, ant_[dst]) >= 0) ant_[dst] = add(c.tag, 1);
      stats_.max_deflections = std::max(stats_.max_deflections, c.deflections);
    }
    out.deflections += static_cast<int>(moving_.size());
    stats_.total_deflections += static_cast<std::int64_t>(moving_.size());
  }
}

void CcqSwitch::measure_span() {
  const int N = cfg_.N;
  for (int j = 0; j < N; ++j) {
    if (col_[j] == 0) continue;
    const Tag R = arb_[j].R;
    const std::size_t base = at(0, j);
    Tag lo = 0, hi = 0;
    bool any = false;
    for (int x = 0; x < N; ++x) {
      const auto q = base + x;
      if (size_[q] == 0) continue;
      const Tag a = diff(front_tag_[q], R);
      const Tag b = diff(back_tag_[q], R);
      if (!any) {
        lo = a;
        hi = b;
        any = true;
      } else {
        lo = std::min(lo, a);
        hi = std::max(hi, b);
      }
    }
    stats_.max_counter_span = std::max<std::int64_t>(stats_.max_counter_span, hi - lo);
  }
}

}  // namespace cqsim
