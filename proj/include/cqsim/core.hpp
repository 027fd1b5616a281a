#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cqsim {

using Slot = std::int64_t;
using Tag = std::int64_t;

// Raised for invalid parameters and malformed configuration or input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a simulation detects a broken runtime invariant.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ports are 0-based throughout: port k here is port k+1 in the usual
// 1..N switch notation.
struct Cell {
  int input = 0;
  int output = 0;
  std::uint64_t seq = 0;  // per (input, output) flow, starts at 1
  Slot arrival_slot = 0;
  Tag tag = 0;            // OCF timestamp or RR wait-counter
  std::uint32_t deflections = 0;
};

enum class Arch { CQ, CCQ, PCQ, OQ };
enum class Sched { LQF, OCF, RR, GLQF_MWM, FIFO };

std::string_view to_string(Arch a);
std::string_view to_string(Sched s);
Arch parse_arch(std::string_view text);
Sched parse_sched(std::string_view text);

struct SwitchConfig {
  int N = 32;
  int B = 40;
  Arch arch = Arch::CQ;
  Sched sched = Sched::LQF;
  // pooling shape and memory speedups (PCQ)
  int w = 1;
  int r = 1;
  int s_w = 1;
  int s_r = 1;
  // deflection cap (CCQ); negative means the default N-1
  int K = -1;
  bool lb_enabled = true;
  bool dr_enabled = true;
  // wait-counter modulus for CCQ-RR; 0 keeps unbounded counters
  std::int64_t counter_modulus = 0;
  std::uint64_t seed = 1;

  int deflection_cap() const { return K < 0 ? N - 1 : K; }
  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Deterministic random stream keyed by (seed, label). Copyable; each copy
// continues independently from the copied state.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform in (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  // Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  friend bool operator==(const RngStream& a, const RngStream& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

RngStream derive_stream(std::uint64_t seed, std::string_view label);

// Round-robin first stage: input i is wired to intermediate port i+t.
inline int lb_route(int input, Slot slot, int n) {
  return static_cast<int>((input + slot % n) % n);
}

}  // namespace cqsim
