#include <algorithm>
#include <limits>
#include <numeric>

#include "cqsim/pcq.hpp"

namespace cqsim {

namespace {

using Weights = std::vector<std::int64_t>;

std::int64_t wt(const Weights& W, int r, int p, int o) { return W[static_cast<std::size_t>(p) * r + o]; }

// Pools an output may use in some lexicographically smallest optimum: its r
// best pools by (weight desc, index asc). At most r-1 other outputs can
// saturate pools, so one of these is always free and at least as good.
std::vector<std::vector<int>> candidate_pools(const Weights& W, int P, int r) {
  std::vector<std::vector<int>> cand(r);
  for (int o = 0; o < r; ++o) {
    auto& c = cand[o];
    for (int p = 0; p < P; ++p)
      if (wt(W, r, p, o) > 0) c.push_back(p);
    std::stable_sort(c.begin(), c.end(), [&](int a, int b) { return wt(W, r, a, o) > wt(W, r, b, o); });
    if (static_cast<int>(c.size()) > r) c.resize(r);
    std::sort(c.begin(), c.end());
  }
  return cand;
}

bool argmax_assignment(const Weights& W, int P, int r, int s_r, Matching& m) {
  std::vector<int> used(P, 0);
  m.pool.assign(r, -1);
  m.total = 0;
  for (int o = 0; o < r; ++o) {
    int best = -1;
    for (int p = 0; p < P; ++p)
      if (wt(W, r, p, o) > 0 && (best < 0 || wt(W, r, p, o) > wt(W, r, best, o))) best = p;
    if (best < 0) continue;
    if (++used[best] > s_r) return false;
    m.pool[o] = best;
    m.total += wt(W, r, best, o);
  }
  return true;
}

struct Dfs {
  const Weights& W;
  int r;
  int s_r;
  const std::vector<std::vector<int>>& cand;
  std::vector<int> used, cur, best;
  std::int64_t best_total = -1;

  void run(int o, std::int64_t total) {
    if (o == r) {
      if (total > best_total) {
        best_total = total;
        best = cur;
      }
      return;
    }
    for (int p : cand[o]) {
      if (used[p] >= s_r) continue;
      ++used[p];
      cur[o] = p;
      run(o + 1, total + wt(W, r, p, o));
      --used[p];
    }
    cur[o] = -1;
    run(o + 1, total);
  }
};

Matching exhaustive(const Weights& W, int P, int r, int s_r) {
  const auto cand = candidate_pools(W, P, r);
  Dfs d{W, r, s_r, cand, std::vector<int>(P, 0), std::vector<int>(r, -1), {}, -1};
  d.run(0, 0);
  return {d.best, d.best_total};
}

// Successive shortest paths on a small bipartite network; returns the
// maximum total weight over outputs [from, r) given per-pool capacities.
class FlowSolver {
 public:
  FlowSolver(const Weights& W, int P, int r) : W_(W), P_(P), r_(r) {}

  std::int64_t best(int from, const std::vector<int>& cap) {
    const int nout = r_ - from;
    const int S = 0, T = 1, n = 2 + nout + P_;
    edges_.clear();
    for (int k = 0; k < nout; ++k) {
      add_edge(S, 2 + k, 1, 0);
      for (int p = 0; p < P_; ++p) {
        const std::int64_t w = wt(W_, r_, p, from + k);
        if (w > 0 && cap[p] > 0) add_edge(2 + k, 2 + nout + p, 1, -w);
      }
    }
    for (int p = 0; p < P_; ++p)
      if (cap[p] > 0) add_edge(2 + nout + p, T, cap[p], 0);
    std::int64_t cost = 0;
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> dist(n);
    std::vector<int> via(n);
    while (true) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(via.begin(), via.end(), -1);
      dist[S] = 0;
      for (int round = 0; round < n; ++round) {
        bool changed = false;
        for (std::size_t e = 0; e < edges_.size(); ++e) {
          const auto& ed = edges_[e];
          if (ed.cap <= 0 || dist[ed.from] == kInf) continue;
          if (dist[ed.from] + ed.cost < dist[ed.to]) {
            dist[ed.to] = dist[ed.from] + ed.cost;
            via[ed.to] = static_cast<int>(e);
            changed = true;
          }
        }
        if (!changed) break;
      }
      if (dist[T] >= 0) break;
      for (int v = T; v != S; v = edges_[via[v]].from) {
        edges_[via[v]].cap -= 1;
        edges_[via[v] ^ 1].cap += 1;
      }
      cost += dist[T];
    }
    return -cost;
  }

 private:
  struct Edge {
    int from, to;
    int cap;
    std::int64_t cost;
  };
  void add_edge(int a, int b, int cap, std::int64_t cost) {
    edges_.push_back({a, b, cap, cost});
    edges_.push_back({b, a, 0, -cost});
  }

  const Weights& W_;
  int P_, r_;
  std::vector<Edge> edges_;
};

Matching flow_based(const Weights& W, int P, int r, int s_r) {
  FlowSolver solver(W, P, r);
  std::vector<int> cap(P, s_r);
  const std::int64_t opt = solver.best(0, cap);
  const auto cand = candidate_pools(W, P, r);
  Matching m{std::vector<int>(r, -1), opt};
  std::int64_t fixed = 0;
  for (int o = 0; o < r; ++o) {
    bool done = false;
    for (int p : cand[o]) {
      if (cap[p] == 0) continue;
      --cap[p];
      if (fixed + wt(W, r, p, o) + solver.best(o + 1, cap) == opt) {
        m.pool[o] = p;
        fixed += wt(W, r, p, o);
        done = true;
        break;
      }
      ++cap[p];
    }
    if (!done && fixed + solver.best(o + 1, cap) != opt)
      throw InvariantError("solve_contention: sequential fixing lost the optimum");
  }
  return m;
}

}  // namespace

Matching solve_contention(const std::vector<std::int64_t>& weights, int P, int r, int s_r,
                          MatchMethod method) {
  if (P < 1 || r < 1 || s_r < 1) throw ConfigError("solve_contention: P, r and s_r must be >= 1");
  if (weights.size() != static_cast<std::size_t>(P) * r)
    throw ConfigError("solve_contention: weight matrix must be P x r");
  for (auto w : weights)
    if (w < 0) throw ConfigError("solve_contention: weights must be non-negative");
  switch (method) {
    case MatchMethod::Exhaustive:
      return exhaustive(weights, P, r, s_r);
    case MatchMethod::Flow:
      return flow_based(weights, P, r, s_r);
    case MatchMethod::Auto:
      break;
  }
  Matching m;
  if (argmax_assignment(weights, P, r, s_r, m)) return m;
  return r <= 4 ? exhaustive(weights, P, r, s_r) : flow_based(weights, P, r, s_r);
}

PcqSwitch::PcqSwitch(const SwitchConfig& cfg)
    : Fabric(cfg), rows_(cfg.N / cfg.w), groups_(cfg.N / cfg.r),
      capacity_(std::int64_t{cfg.w} * cfg.r * cfg.B) {
  if (cfg_.arch != Arch::PCQ) throw ConfigError("switch.arch: PcqSwitch needs PCQ");
  const int N = cfg_.N;
  subq_.resize(static_cast<std::size_t>(N) * N);
  pool_occ_.assign(static_cast<std::size_t>(rows_) * groups_, 0);
  writes_.assign(pool_occ_.size(), 0);
  count_.assign(static_cast<std::size_t>(rows_) * N, 0);
  col_.assign(N, 0);
  weights_.assign(static_cast<std::size_t>(rows_) * cfg_.r, 0);
}

std::int64_t PcqSwitch::resident() const {
  return std::accumulate(col_.begin(), col_.end(), std::int64_t{0});
}

void PcqSwitch::preload(const Cell& c) {
  const auto [I, J] = pool_of(c.input, c.output, cfg_.w, cfg_.r);
  const auto k = idx(I, J);
  if (pool_occ_[k] >= capacity_) throw ConfigError("preload: pool full");
  sub(c.input, c.output).push_back(c);
  ++pool_occ_[k];
  ++count_[static_cast<std::size_t>(I) * cfg_.N + c.output];
  ++col_[c.output];
}

void PcqSwitch::step(Slot, std::span<const Cell> arrivals, StepResult& out) {
  out.clear();
  const int N = cfg_.N, w = cfg_.w, r = cfg_.r;
  const double denom = static_cast<double>(N) * cfg_.B;
  std::fill(writes_.begin(), writes_.end(), 0);
  for (const Cell& c : arrivals) {
    const auto [I, J] = pool_of(c.input, c.output, w, r);
    const auto k = idx(I, J);
    if (writes_[k] >= cfg_.s_w || pool_occ_[k] >= capacity_) {
      out.drops.push_back({c, static_cast<double>(col_[c.output]) / denom});
      continue;
    }
    sub(c.input, c.output).push_back(c);
    ++writes_[k];
    ++pool_occ_[k];
    ++count_[static_cast<std::size_t>(I) * N + c.output];
    ++col_[c.output];
  }

  for (int J = 0; J < groups_; ++J) {
    bool any = false;
    for (int o = 0; o < r; ++o) any = any || col_[J * r + o] > 0;
    if (!any) continue;
    for (int I = 0; I < rows_; ++I)
      for (int o = 0; o < r; ++o)
        weights_[static_cast<std::size_t>(I) * r + o] = count_[static_cast<std::size_t>(I) * N + J * r + o];
    const Matching m = solve_contention(weights_, rows_, r, cfg_.s_r);
    std::vector<int> reads(rows_, 0);
    for (int o = 0; o < r; ++o) {
      const int I = m.pool[o];
      if (I < 0) continue;
      ++reads[I];
      const int j = J * r + o;
      int pick = -1;
      for (int i = I * w; i < (I + 1) * w; ++i) {
        const auto& sq = sub(i, j);
        if (sq.empty()) continue;
        if (pick < 0 || sq.front().arrival_slot < sub(pick, j).front().arrival_slot) pick = i;
      }
      auto& sq = sub(pick, j);
      out.departures.push_back(sq.front());
      sq.pop_front();
      --pool_occ_[idx(I, J)];
      --count_[static_cast<std::size_t>(I) * N + j];
      --col_[j];
    }
    // A maximum matching never leaves an output idle while a pool holding
    // its cells still has read bandwidth.
    for (int o = 0; o < r; ++o) {
      if (m.pool[o] >= 0) continue;
      for (int I = 0; I < rows_; ++I)
        if (reads[I] < cfg_.s_r && weights_[static_cast<std::size_t>(I) * r + o] > 0) {
          ++out.idle_violations;
          break;
        }
    }
  }
}

}  // namespace cqsim
