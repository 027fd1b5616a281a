#include "cqsim/core.hpp"

#include <array>

namespace cqsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::array<std::string_view, 4> kArchNames{"CQ", "CCQ", "PCQ", "OQ"};
constexpr std::array<std::string_view, 5> kSchedNames{"LQF", "OCF", "RR", "GLQF_MWM",
                                                      "FIFO"};

}  // namespace

std::string_view to_string(Arch a) { return kArchNames[static_cast<int>(a)]; }
std::string_view to_string(Sched s) { return kSchedNames[static_cast<int>(s)]; }

Arch parse_arch(std::string_view text) {
  for (std::size_t k = 0; k < kArchNames.size(); ++k)
    if (kArchNames[k] == text) return static_cast<Arch>(k);
  throw ConfigError("switch.arch: unknown architecture '" + std::string(text) + "'");
}

Sched parse_sched(std::string_view text) {
  for (std::size_t k = 0; k < kSchedNames.size(); ++k)
    if (kSchedNames[k] == text) return static_cast<Sched>(k);
  throw ConfigError("switch.sched: unknown scheduler '" + std::string(text) + "'");
}

void SwitchConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("switch." + field + ": " + why);
  };
  if (N < 2) fail("N", "must be >= 2");
  if (B < 1) fail("B", "must be >= 1");
  switch (arch) {
    case Arch::CQ:
      if (sched != Sched::LQF) fail("sched", "CQ supports LQF only");
      break;
    case Arch::OQ:
      if (sched != Sched::FIFO) fail("sched", "OQ supports FIFO only");
      break;
    case Arch::CCQ:
      if (sched != Sched::OCF && sched != Sched::RR) fail("sched", "CCQ supports OCF or RR");
      if (K < -1) fail("K", "must be >= 0");
      if (counter_modulus < 0) fail("counter_modulus", "must be >= 0");
      if (counter_modulus > 0 && sched != Sched::RR)
        fail("counter_modulus", "modular counters apply to RR only");
      if (counter_modulus > 0) {
        const std::int64_t k = deflection_cap();
        const std::int64_t span = std::int64_t{N} * B + (k + N - 1) / N;
        if (counter_modulus <= 2 * (span + 1))
          fail("counter_modulus", "must exceed 2*(N*B + ceil(K/N) + 1)");
      }
      break;
    case Arch::PCQ:
      if (sched != Sched::GLQF_MWM) fail("sched", "PCQ supports GLQF_MWM only");
      if (w < 1 || N % w != 0) fail("w", "must divide N");
      if (r < 1 || N % r != 0) fail("r", "must divide N");
      if (s_w < 1 || s_w > w) fail("s_w", "must satisfy 1 <= s_w <= w");
      if (s_r < 1 || s_r > r) fail("s_r", "must satisfy 1 <= s_r <= r");
      break;
  }
}

RngStream::RngStream(std::uint64_t seed, std::string_view label) {
  std::uint64_t x = seed ^ fnv1a(label);
  std::array<std::uint32_t, 8> words{};
  for (std::size_t k = 0; k < words.size(); k += 2) {
    const std::uint64_t v = splitmix64(x);
    words[k] = static_cast<std::uint32_t>(v);
    words[k + 1] = static_cast<std::uint32_t>(v >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

std::uint64_t RngStream::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection keeps the draw exactly uniform.
  std::uint64_t x = engine_();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = engine_();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

RngStream derive_stream(std::uint64_t seed, std::string_view label) {
  return RngStream(seed, label);
}

}  // namespace cqsim
