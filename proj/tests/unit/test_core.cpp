#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cqsim/core.hpp"

using namespace cqsim;

TEST_CASE("derive_stream is deterministic per (seed, label)") {
  auto a = derive_stream(7, "traffic:in3");
  auto b = derive_stream(7, "traffic:in3");
  for (int k = 0; k < 1000; ++k) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct labels give distinct streams") {
  auto a = derive_stream(7, "traffic:in3");
  auto b = derive_stream(7, "traffic:in4");
  int differ = 0;
  for (int k = 0; k < 10000; ++k) differ += a.next_u64() != b.next_u64();
  CHECK(differ > 0);
}

TEST_CASE("fair coin from a tie stream") {
  auto s = derive_stream(7, "tie:out1");
  double sum = 0;
  for (int k = 0; k < 1000000; ++k) sum += static_cast<double>(s.below(2));
  CHECK(sum / 1e6 == doctest::Approx(0.5).epsilon(0.02));
  CHECK(sum / 1e6 >= 0.49);
  CHECK(sum / 1e6 <= 0.51);
}

TEST_CASE("copies continue independently from the same state") {
  auto a = derive_stream(1, "x");
  a.next_u64();
  auto b = a;
  CHECK(a == b);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform ranges") {
  auto s = derive_stream(3, "u");
  for (int k = 0; k < 100000; ++k) {
    const double u = s.uniform();
    const double v = s.uniform_pos();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    CHECK(s.below(7) < 7u);
  }
}

TEST_CASE("lb_route") {
  // 0-based: input 3 of 4 is index 2; intermediate port 1 is index 0.
  CHECK(lb_route(2, 0, 4) == 2);
  CHECK(lb_route(2, 2, 4) == 0);
  for (int i = 0; i < 5; ++i) {
    std::vector<int> seen(5, 0);
    for (Slot t = 11; t < 16; ++t) ++seen[lb_route(i, t, 5)];
    for (int v : seen) CHECK(v == 1);
  }
}

TEST_CASE("SwitchConfig validation names the field") {
  SwitchConfig c;
  c.N = 1;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("switch.N"), ConfigError);
  c = {};
  c.B = 0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("switch.B"), ConfigError);
  c = {};
  c.arch = Arch::PCQ;
  c.sched = Sched::GLQF_MWM;
  c.w = 3;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("switch.w"), ConfigError);
  c.w = 2;
  c.s_w = 3;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("switch.s_w"), ConfigError);
  c.s_w = 2;
  c.s_r = 2;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("switch.s_r"), ConfigError);
  c = {};
  c.arch = Arch::CCQ;
  c.sched = Sched::LQF;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("switch.sched"), ConfigError);
  c.sched = Sched::RR;
  c.N = 4;
  c.B = 2;
  c.counter_modulus = 10;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("switch.counter_modulus"), ConfigError);
  c.counter_modulus = 64;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("names round-trip") {
  for (auto a : {Arch::CQ, Arch::CCQ, Arch::PCQ, Arch::OQ}) CHECK(parse_arch(to_string(a)) == a);
  for (auto s : {Sched::LQF, Sched::OCF, Sched::RR, Sched::GLQF_MWM, Sched::FIFO})
    CHECK(parse_sched(to_string(s)) == s);
  CHECK_THROWS_AS(parse_arch("XQ"), ConfigError);
}
