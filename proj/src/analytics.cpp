#include "cqsim/analytics.hpp"

#include <cmath>
#include <limits>

namespace cqsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lam(double lam) {
  if (!(lam > 0.0 && lam < 1.0)) throw ConfigError("analytics: lam must lie in (0, 1)");
}

// Golden-section minimum of a convex function on [a, b].
template <class F>
std::pair<double, double> golden_min(F f, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 400 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

double xlogx_ratio(double x, double p) { return x == 0.0 ? 0.0 : x * std::log(x / p); }

}  // namespace

double lambda_star(double x, double lam) {
  check_lam(lam);
  if (!(x >= 0.0 && x <= 1.0)) return kInf;
  return xlogx_ratio(x, lam) + xlogx_ratio(1.0 - x, 1.0 - lam);
}

OqExponent exponent_oq(int n, double C, double lam) {
  check_lam(lam);
  if (!(C > 0.0)) throw ConfigError("exponent_oq: C must be > 0");
  if (!(n > C)) throw ConfigError("exponent_oq: need n > C for overflow to be possible");
  if (!(n * lam < C)) throw ConfigError("exponent_oq: unstable scenario, n*lam >= C");
  const double lo = 1.0 / (n - C);
  auto f = [&](double g) { return g * lambda_star((C + 1.0 / g) / n, lam); };
  // Expand geometrically until the objective turns upward.
  double left = lo, mid = lo, right = 2.0 * lo;
  double fmid = f(mid), fright = f(right);
  while (fright < fmid) {
    left = mid;
    mid = right;
    fmid = fright;
    right *= 2.0;
    fright = f(right);
    if (right > 1e300) break;
  }
  const auto [g, v] = golden_min(f, left, right);
  double best_g = g, best_v = v;
  if (f(lo) <= best_v) {
    best_g = lo;
    best_v = f(lo);
  }
  return {static_cast<double>(n) * n * best_v, best_g};
}

ModeExponent exponent_cq_lqf(int N, double C, double lam) {
  if (N < 2) throw ConfigError("exponent_cq_lqf: N must be >= 2");
  ModeExponent best{kInf, {}};
  for (int n = static_cast<int>(std::floor(C)) + 1; n <= N; ++n) {
    const auto e = exponent_oq(n, C, lam);
    if (e.E < best.E) best = {e.E, {n, lam, C, static_cast<double>(n), e.gamma_star, 1}};
  }
  if (!std::isfinite(best.E)) throw ConfigError("exponent_cq_lqf: no n in (C, N]");
  return best;
}

double predicted_critical_utilization(const OverflowMode& mode, int N) {
  const double n = mode.n_star;
  const double other = std::min(n * mode.gamma_star * mode.lam_d, 1.0);
  return (n + (N - n) * other) / N;
}

ModeExponent exponent_pcq(int N, double C, double lam, int w, int r) {
  if (w < 1 || r < 1 || N % w != 0 || N % r != 0) throw ConfigError("exponent_pcq: w and r must divide N");
  ModeExponent best{kInf, {}};
  for (int rp = 1; rp <= r; ++rp) {
    if (rp * lam >= 1.0) continue;
    for (int n = 1; n <= N / w; ++n) {
      if (!(n * w > rp * C)) continue;
      const auto e = exponent_oq(n * w, rp * C, rp * lam);
      const double E = r * e.E;
      if (E < best.E) best = {E, {n * w, rp * lam, rp * C, static_cast<double>(n) * w * r, e.gamma_star, rp}};
    }
  }
  if (!std::isfinite(best.E)) throw ConfigError("exponent_pcq: no feasible mode");
  return best;
}

double pool_simul_arrival_prob(int w, int r, double lam, int k) {
  if (w < 1 || r < 1) throw ConfigError("pool_simul_arrival_prob: w and r must be >= 1");
  if (k < 0 || k > w) throw ConfigError("pool_simul_arrival_prob: need 0 <= k <= w");
  const double p = r * lam;
  if (!(lam >= 0.0 && p <= 1.0)) throw ConfigError("pool_simul_arrival_prob: need 0 <= r*lam <= 1");
  return std::exp(std::lgamma(w + 1.0) - std::lgamma(k + 1.0) - std::lgamma(w - k + 1.0)) *
         std::pow(p, k) * std::pow(1.0 - p, w - k);
}

std::array<std::array<double, 2>, 2> transition_power(const OnOffModel& m, std::int64_t k) {
  m.validate();
  if (k < 0) throw ConfigError("transition_power: k must be >= 0");
  const double s = m.p01 + m.p10;
  if (s == 0.0) return {{{1.0, 0.0}, {0.0, 1.0}}};
  const double lam = m.p01 / s;
  const double ak = std::pow(m.alpha(), static_cast<double>(k));
  const double p01 = lam * (1.0 - ak);
  const double p10 = (1.0 - lam) * (1.0 - ak);
  return {{{1.0 - p01, p01}, {p10, 1.0 - p10}}};
}

double onoff_mean_arrivals(const OnOffModel& m, std::int64_t t) {
  m.validate();
  if (m.p01 + m.p10 == 0.0) throw ConfigError("onoff: degenerate chain (p01 + p10 = 0)");
  return m.p01 * static_cast<double>(t) / (m.p01 + m.p10);
}

double variance_time_onoff(const OnOffModel& m, std::int64_t t) {
  m.validate();
  if (m.p01 + m.p10 == 0.0) throw ConfigError("onoff: degenerate chain (p01 + p10 = 0)");
  if (t < 1) throw ConfigError("variance_time_onoff: t must be >= 1");
  const double p00 = m.p00, p01 = m.p01, p10 = m.p10, p11 = m.p11;
  const double a = m.alpha(), q = 1.0 - a;
  if (t == 1) {
    const double lam = p01 / q;
    return lam * (1.0 - lam);
  }
  const double c1 = (p01 * p11 - 3 * p01 * p01 + p01) / q + 2 * p01 * p10 / (q * q);
  const double c2 = 2 * p10 * p10 * a / (q * q);
  const double c3 = 2 * p01 * p01 / q;
  const double c4 = 1 + 3 * p11 + c3 * a * (3 * a - 2) / (q * q * q) +
                    (3 * p11 * a - 2 * c1 - 3 * c3 - 2 * c2 * a) / q +
                    (2 * c3 * a + c2 * a * (3 - 2 * a) - c1 * a) / (q * q);
  const double c5 = (2 * c1 + c3) / (2 * q) - c3 * a / (q * q);
  const double c6 = c3 / (2 * q);
  const double c7 = (2 * c2 - 3 * p11) / q + (c1 - c2) / (q * q) - c3 * (3 * a - 2) / (q * q * q);
  const double c8 = -c2 / q;
  // Second moment of Y(s) starting ON, s >= 2.
  auto ey1sq = [&](double s) {
    const double as = std::pow(a, s - 1);
    return c4 + c5 * s + c6 * s * s + c7 * as + c8 * s * as;
  };
  // Starting OFF: first ON slot at tau + 1.
  double ey0sq = p01 * std::pow(p00, static_cast<double>(t - 2));
  double wgt = p01;
  for (std::int64_t tau = 1; tau <= t - 2; ++tau) {
    ey0sq += wgt * ey1sq(static_cast<double>(t - tau));
    wgt *= p00;
  }
  const double T = static_cast<double>(t);
  return p01 / q * ey1sq(T) + p10 / q * ey0sq - p01 * p01 * T * T / (q * q);
}

LbDistance variance_lb_distance(const OnOffModel& m, int N, int k, std::int64_t t) {
  m.validate();
  if (m.p01 + m.p10 == 0.0) throw ConfigError("onoff: degenerate chain (p01 + p10 = 0)");
  if (N < 2 || k < 1 || k > N - 1) throw ConfigError("variance_lb_distance: need 1 <= k <= N-1");
  if (t < 1) throw ConfigError("variance_lb_distance: t must be >= 1");
  const double p01 = m.p01, p10 = m.p10, a = m.alpha(), q = 1.0 - a;
  const double ak = std::pow(a, k), ank = std::pow(a, N - k), aN = std::pow(a, N);
  const double aNt = std::pow(a, static_cast<double>(N) * static_cast<double>(t));
  const double Nt = static_cast<double>(N) * static_cast<double>(t);
  LbDistance out{};
  out.sigma2_lb = 2 * Nt * p01 * p10 * (1 - ak) * (1 - ank) / (q * q * (1 - aN)) +
                  2 * p01 * p10 * (1 - aNt) / (q * q * (1 - aN) * (1 - aN)) *
                      ((N - k) * ank * (1 - ak) * (1 - ak) + k * ak * (1 - ank) * (1 - ank));
  out.sigma2_orig = 2.0 * variance_time_onoff(m, static_cast<std::int64_t>(N) * t);
  out.mean_delta_on = -p10 * (1 - ak) * (1 - aNt) / (q * (1 - aN));
  out.mean_delta_off = p01 * (1 - ak) * (1 - aNt) / (q * (1 - aN));
  out.mean_delta = (p01 * out.mean_delta_on + p10 * out.mean_delta_off) / (p01 + p10);
  return out;
}

}  // namespace cqsim
