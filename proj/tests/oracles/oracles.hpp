#pragma once
// Independent reference computations used only by tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cqsim/core.hpp"
#include "cqsim/pcq.hpp"
#include "cqsim/traffic.hpp"

namespace oracle {

// Exact steady-state drop rate of a 2x2 CQ-LQF switch under Bernoulli
// traffic with per-flow rate lam. State = the four crosspoint occupancies.
inline double markov_cq2_drop_rate(int B, double lam) {
  const int L = B + 1;
  const int S = L * L * L * L;
  auto enc = [&](const std::array<int, 4>& b) { return b[0] + L * (b[1] + L * (b[2] + L * b[3])); };
  // b index = 2*input + output
  std::vector<double> P(static_cast<std::size_t>(S) * S, 0.0);
  std::vector<double> drops(S, 0.0);
  const double pa[3] = {1.0 - 2.0 * lam, lam, lam};  // none, to output 0, to output 1
  for (int s = 0; s < S; ++s) {
    std::array<int, 4> b{s % L, (s / L) % L, (s / (L * L)) % L, s / (L * L * L)};
    for (int a0 = 0; a0 < 3; ++a0)
      for (int a1 = 0; a1 < 3; ++a1) {
        const double pr = pa[a0] * pa[a1];
        if (pr == 0.0) continue;
        auto c = b;
        double d = 0.0;
        const int arr[2] = {a0, a1};
        for (int i = 0; i < 2; ++i) {
          if (arr[i] == 0) continue;
          const int q = 2 * i + (arr[i] - 1);
          if (c[q] == B) d += 1.0; else ++c[q];
        }
        drops[s] += pr * d;
        // Each output independently; enumerate tie outcomes.
        std::vector<std::pair<std::array<int, 4>, double>> outcomes{{c, 1.0}};
        for (int j = 0; j < 2; ++j) {
          std::vector<std::pair<std::array<int, 4>, double>> next;
          for (auto& [st, w] : outcomes) {
            const int q0 = j, q1 = 2 + j;
            if (st[q0] == 0 && st[q1] == 0) {
              next.push_back({st, w});
            } else if (st[q0] > st[q1]) {
              auto t = st; --t[q0]; next.push_back({t, w});
            } else if (st[q1] > st[q0]) {
              auto t = st; --t[q1]; next.push_back({t, w});
            } else {
              auto t0 = st; --t0[q0]; next.push_back({t0, w * 0.5});
              auto t1 = st; --t1[q1]; next.push_back({t1, w * 0.5});
            }
          }
          outcomes.swap(next);
        }
        for (auto& [st, w] : outcomes) P[static_cast<std::size_t>(s) * S + enc(st)] += pr * w;
      }
  }
  // Solve pi (P - I) = 0 with sum(pi) = 1 by Gaussian elimination on the
  // transposed system, last equation replaced by normalization.
  std::vector<double> A(static_cast<std::size_t>(S) * (S + 1), 0.0);
  for (int r = 0; r < S; ++r) {
    for (int c = 0; c < S; ++c) A[static_cast<std::size_t>(r) * (S + 1) + c] = P[static_cast<std::size_t>(c) * S + r] - (r == c ? 1.0 : 0.0);
  }
  for (int c = 0; c < S; ++c) A[static_cast<std::size_t>(S - 1) * (S + 1) + c] = 1.0;
  A[static_cast<std::size_t>(S - 1) * (S + 1) + S] = 1.0;
  for (int col = 0; col < S; ++col) {
    int piv = col;
    for (int r = col + 1; r < S; ++r)
      if (std::abs(A[static_cast<std::size_t>(r) * (S + 1) + col]) > std::abs(A[static_cast<std::size_t>(piv) * (S + 1) + col])) piv = r;
    for (int c = 0; c <= S; ++c) std::swap(A[static_cast<std::size_t>(col) * (S + 1) + c], A[static_cast<std::size_t>(piv) * (S + 1) + c]);
    const double d = A[static_cast<std::size_t>(col) * (S + 1) + col];
    for (int r = 0; r < S; ++r) {
      if (r == col) continue;
      const double f = A[static_cast<std::size_t>(r) * (S + 1) + col] / d;
      if (f == 0.0) continue;
      for (int c = col; c <= S; ++c) A[static_cast<std::size_t>(r) * (S + 1) + c] -= f * A[static_cast<std::size_t>(col) * (S + 1) + c];
    }
  }
  double expected_drops = 0.0;
  for (int s = 0; s < S; ++s)
    expected_drops += drops[s] * A[static_cast<std::size_t>(s) * (S + 1) + S] / A[static_cast<std::size_t>(s) * (S + 1) + s];
  return expected_drops / (2.0 * 2.0 * lam);
}

// Exhaustive enumeration of every assignment output -> pool or none.
inline cqsim::Matching brute_force_matching(const std::vector<std::int64_t>& W, int P, int r, int s_r) {
  cqsim::Matching best{std::vector<int>(r, -1), -1};
  std::vector<int> code(r, 0);  // 0..P-1 pool, P = unmatched
  std::vector<int> used(P);
  while (true) {
    std::fill(used.begin(), used.end(), 0);
    bool ok = true;
    std::int64_t total = 0;
    for (int o = 0; o < r && ok; ++o) {
      if (code[o] == P) continue;
      const auto w = W[static_cast<std::size_t>(code[o]) * r + o];
      if (w <= 0 || ++used[code[o]] > s_r) ok = false;
      total += w;
    }
    // Enumeration runs in lexicographic order, so the first maximum wins.
    if (ok && total > best.total) {
      best.total = total;
      for (int o = 0; o < r; ++o) best.pool[o] = code[o] == P ? -1 : code[o];
    }
    int o = r - 1;
    while (o >= 0 && code[o] == P) code[o--] = 0;
    if (o < 0) break;
    ++code[o];
  }
  return best;
}

// Overflow exponent by nested zooming grid search over gamma and theta,
// using only the log-MGF log(1 - lam + lam e^theta).
inline double grid_exponent_oq(int n, double C, double lam) {
  auto conj = [&](double x) {
    auto g = [&](double th) { return th * x - std::log(1.0 - lam + lam * std::exp(th)); };
    double lo = -60.0, hi = 60.0, best = -1e300, arg = 0.0;
    for (int round = 0; round < 40; ++round) {
      const int M = 64;
      for (int k = 0; k <= M; ++k) {
        const double th = lo + (hi - lo) * k / M;
        const double v = g(th);
        if (v > best) { best = v; arg = th; }
      }
      const double h = (hi - lo) / M;
      lo = arg - 2 * h;
      hi = arg + 2 * h;
    }
    return best;
  };
  const double g0 = 1.0 / (n - C);
  auto f = [&](double u) {  // gamma = g0 * e^u
    const double gamma = g0 * std::exp(u);
    return gamma * conj((C + 1.0 / gamma) / n);
  };
  double lo = 0.0, hi = 12.0, best = 1e300, arg = 0.0;
  for (int round = 0; round < 40; ++round) {
    const int M = 64;
    for (int k = 0; k <= M; ++k) {
      const double u = lo + (hi - lo) * k / M;
      const double v = f(u);
      if (v < best) { best = v; arg = u; }
    }
    const double h = (hi - lo) / M;
    lo = std::max(0.0, arg - 2 * h);
    hi = arg + 2 * h;
  }
  return static_cast<double>(n) * n * best;
}

using Mat2 = std::array<std::array<double, 2>, 2>;

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

inline Mat2 mat_pow(Mat2 m, std::int64_t k) {
  Mat2 r{{{1, 0}, {0, 1}}};
  while (k > 0) {
    if (k & 1) r = mat_mul(r, m);
    m = mat_mul(m, m);
    k >>= 1;
  }
  return r;
}

struct MeanVar {
  double mean;
  double var;
};

// Monte Carlo variance of Y(t) for each t in ts (ascending), stationary start,
// simulated by jumping over whole ON/OFF sojourns.
inline std::vector<MeanVar> mc_variance_time(const cqsim::OnOffModel& m, const std::vector<std::int64_t>& ts,
                                             std::int64_t paths, std::uint64_t seed) {
  auto rng = cqsim::derive_stream(seed, "oracle:vt");
  const double lam = m.p01 / (m.p01 + m.p10);
  std::vector<double> s1(ts.size(), 0.0), s2(ts.size(), 0.0);
  auto sojourn = [&](double leave) {
    return static_cast<std::int64_t>(std::floor(std::log(rng.uniform_pos()) / std::log1p(-leave))) + 1;
  };
  for (std::int64_t p = 0; p < paths; ++p) {
    int state = rng.uniform() < lam ? 1 : 0;
    std::int64_t pos = 0, y = 0;
    std::size_t k = 0;
    while (k < ts.size()) {
      const std::int64_t len = sojourn(state ? m.p10 : m.p01);
      const std::int64_t end = pos + len;
      while (k < ts.size() && ts[k] <= end) {
        const double v = static_cast<double>(y + (state ? ts[k] - pos : 0));
        s1[k] += v;
        s2[k] += v * v;
        ++k;
      }
      if (state) y += len;
      pos = end;
      state ^= 1;
    }
  }
  std::vector<MeanVar> out;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double mean = s1[k] / static_cast<double>(paths);
    out.push_back({mean, s2[k] / static_cast<double>(paths) - mean * mean});
  }
  return out;
}

// Monte Carlo variance of A_k(Nt) - A_0(Nt) under round-robin load
// balancing, for each k in ks: flow i's slot s goes to crosspoint
// (i + s) mod N. Each flow's chain is simulated sojourn by sojourn over
// [0, Nt) and its ON slots are counted per crosspoint.
inline std::vector<MeanVar> mc_lb_distance(const cqsim::OnOffModel& m, int N, const std::vector<int>& ks,
                                           std::int64_t t, std::int64_t paths, std::uint64_t seed) {
  auto rng = cqsim::derive_stream(seed, "oracle:lb");
  const double lam = m.p01 / (m.p01 + m.p10);
  const std::int64_t T = static_cast<std::int64_t>(N) * t;
  const double log_stay_on = std::log1p(-m.p10), log_stay_off = std::log1p(-m.p01);
  // Slots s in [0, x) with s = r (mod N).
  auto upto = [N](std::int64_t x, std::int64_t r) { return x <= r ? std::int64_t{0} : (x - r - 1) / N + 1; };
  std::vector<double> s1(ks.size(), 0.0), s2(ks.size(), 0.0);
  std::vector<std::int64_t> diff(ks.size());
  for (std::int64_t p = 0; p < paths; ++p) {
    std::fill(diff.begin(), diff.end(), 0);
    for (int i = 0; i < N; ++i) {
      const std::int64_t r0 = (N - i) % N;
      int state = rng.uniform() < lam ? 1 : 0;
      std::int64_t pos = 0;
      while (pos < T) {
        const double lg = state ? log_stay_on : log_stay_off;
        const auto len = static_cast<std::int64_t>(std::floor(std::log(rng.uniform_pos()) / lg)) + 1;
        const std::int64_t end = std::min(T, pos + len);
        if (state) {
          const std::int64_t a0 = upto(end, r0) - upto(pos, r0);
          for (std::size_t q = 0; q < ks.size(); ++q) {
            const std::int64_t rk = ((ks[q] - i) % N + N) % N;
            diff[q] += upto(end, rk) - upto(pos, rk) - a0;
          }
        }
        pos = end;
        state ^= 1;
      }
    }
    for (std::size_t q = 0; q < ks.size(); ++q) {
      const double d = static_cast<double>(diff[q]);
      s1[q] += d;
      s2[q] += d * d;
    }
  }
  std::vector<MeanVar> out;
  for (std::size_t q = 0; q < ks.size(); ++q) {
    const double mean = s1[q] / static_cast<double>(paths);
    out.push_back({mean, s2[q] / static_cast<double>(paths) - mean * mean});
  }
  return out;
}

}  // namespace oracle
