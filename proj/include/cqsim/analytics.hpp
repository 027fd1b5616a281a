#pragma once

#include <array>
#include <cstdint>

#include "cqsim/traffic.hpp"

namespace cqsim {

// Fenchel-Legendre transform of the Bernoulli log-MGF:
// x log(x/lam) + (1-x) log((1-x)/(1-lam)), +inf outside [0, 1].
double lambda_star(double x, double lam);

struct OqExponent {
  double E;
  double gamma_star;
};

// n^2 * inf_gamma gamma * lambda_star((C + 1/gamma)/n, lam) for n sources of
// rate lam sharing a server of rate C. Requires n*lam < C < n.
OqExponent exponent_oq(int n, double C, double lam);

// (n_d, lam_d, C_d, B_d) with B_d in multiples of B.
struct OverflowMode {
  int n_star;
  double lam_d;
  double C_d;
  double B_d;
  double gamma_star;
  int r_star = 1;
};

struct ModeExponent {
  double E;
  OverflowMode mode;
};

ModeExponent exponent_cq_lqf(int N, double C, double lam);

// Expected column utilization at overflow for a given dominant mode.
double predicted_critical_utilization(const OverflowMode& mode, int N);

ModeExponent exponent_pcq(int N, double C, double lam, int w, int r);

// Probability that exactly k of the w crosspoints of a w x r pool receive a
// cell in the same slot.
double pool_simul_arrival_prob(int w, int r, double lam, int k);

// Two-state transition probabilities after k steps, [u][v].
std::array<std::array<double, 2>, 2> transition_power(const OnOffModel& m, std::int64_t k);

double onoff_mean_arrivals(const OnOffModel& m, std::int64_t t);
// Variance of cumulative arrivals over t slots from a stationary start.
double variance_time_onoff(const OnOffModel& m, std::int64_t t);

struct LbDistance {
  double sigma2_lb;    // variance of the arrival difference of two k-distant crosspoints over N*t slots
  double sigma2_orig;  // same without load balancing: 2 * variance_time(N*t)
  double mean_delta;   // stationary mean of one flow's contribution (zero)
  double mean_delta_on;
  double mean_delta_off;
};

LbDistance variance_lb_distance(const OnOffModel& m, int N, int k, std::int64_t t);

}  // namespace cqsim
