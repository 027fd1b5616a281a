#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cqsim/curves.hpp"
#include "cqsim/scenario.hpp"

using namespace cqsim;
namespace fs = std::filesystem;

namespace {

KeyValueConfig parse(const std::string& text, fs::path base = {}) {
  std::istringstream in(text);
  return KeyValueConfig::parse(in, base);
}

struct Cmd {
  int code;
  std::string out;
};

Cmd run_cli(const std::string& args) {
  const char* exe = std::getenv("CQSIM_CLI");
  REQUIRE(exe != nullptr);
  const std::string cmd = std::string(exe) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch() {
  auto d = fs::temp_directory_path() / ("cqsim_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("config grammar") {
  auto c = parse("# comment\n\nswitch.N = 8\n  switch.B=4  \nswitch.N = 16\n");
  CHECK(*c.get("switch.N") == "16");
  CHECK(*c.get("switch.B") == "4");
  CHECK_THROWS_AS(parse("switch.N 8\n"), ConfigError);
  CHECK_THROWS_AS(parse("switch.bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse(" = 1\n"), ConfigError);
}

TEST_CASE("scenario_from_config defaults and errors") {
  auto s = scenario_from_config(parse("switch.arch = CCQ\n"));
  CHECK(s.sw.sched == Sched::RR);
  CHECK(s.sw.N == 32);
  s = scenario_from_config(parse("switch.arch = PCQ\nswitch.N = 8\nswitch.w = 2\nswitch.r = 2\n"));
  CHECK(s.sw.sched == Sched::GLQF_MWM);
  CHECK_THROWS_WITH_AS(scenario_from_config(parse("switch.N = x\n")), doctest::Contains("switch.N"), ConfigError);
  CHECK_THROWS_WITH_AS(scenario_from_config(parse("traffic.kind = poisson\n")), doctest::Contains("traffic.kind"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(scenario_from_config(parse("traffic.mu = 1.5\n")), doctest::Contains("traffic.mu"),
                       ConfigError);
  CHECK_THROWS_AS(scenario_from_config(parse("switch.lb = maybe\n")), ConfigError);
}

TEST_CASE("zero load gives zero drops and no departures") {
  auto s = scenario_from_config(parse("switch.N = 4\nswitch.B = 2\ntraffic.mu = 0\nrun.slots = 1000\n"));
  const auto r = run_scenario(s);
  CHECK(r.drop_rate == 0.0);
  CHECK(r.departures == 0);
}

TEST_CASE("identical scenarios give identical rows") {
  auto s = scenario_from_config(
      parse("switch.N = 8\nswitch.B = 4\nswitch.arch = CCQ\nswitch.sched = RR\ntraffic.kind = lrd\n"
            "run.slots = 20000\nrun.seed = 3\n"));
  CHECK(csv_row("x", 3, run_scenario(s)) == csv_row("x", 3, run_scenario(s)));
}

TEST_CASE("sweep rows follow value then seed order") {
  auto c = parse(
      "switch.N = 4\nswitch.B = 4\nrun.slots = 2000\nsweep.axis = traffic.mu\n"
      "sweep.values = 0.5, 0.6, 0.7, 0.8, 0.9, 1.0\nsweep.seeds = 1, 2\nsweep.threads = 3\n");
  const auto rows = run_sweep(sweep_from_config(c));
  REQUIRE(rows.size() == 12);
  CHECK(rows[0].axis_value == "0.5");
  CHECK(rows[1].seed == 2);
  CHECK(rows[11].axis_value == "1.0");
  auto bad = c;
  bad.set("sweep.axis", "sweep.threads");
  CHECK_THROWS_AS(sweep_from_config(bad), ConfigError);
  bad = c;
  bad.set("sweep.values", "0.5, 2.0");
  CHECK_THROWS_AS(sweep_from_config(bad), ConfigError);
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e-5) == "1e-05");
  CHECK(std::stod(format_number(1.0 / 3)) == 1.0 / 3);
  CHECK(csv_header_comment().rfind("#", 0) == 0);
}

TEST_CASE("curves") {
  const auto vt = lines(emit_curves("variance_time", {{"t", "1"}}));
  REQUIRE(vt.size() >= 3);
  CHECK(vt[2].rfind("1,0.024375", 0) == 0);
  const auto cq = lines(emit_curves("cq_lqf_exponent", {{"N", "32"}, {"mu_min", "0.01"}, {"mu_max", "0.99"},
                                                        {"mu_step", "0.01"}}));
  CHECK(cq.size() == 2 + 99);
  CHECK_THROWS_AS(emit_curves("nope", {}), ConfigError);
  CHECK_THROWS_AS(emit_curves("oq_exponent", {{"zzz", "1"}}), ConfigError);
}

TEST_CASE("cli: simulate, sweep, curves, ingest and exit codes") {
  const auto dir = scratch();
  {
    std::ofstream f(dir / "s.cfg");
    f << "switch.N = 4\nswitch.B = 4\nswitch.arch = CCQ\nswitch.sched = RR\nrun.slots = 5000\n";
  }
  auto r = run_cli("simulate " + (dir / "s.cfg").string());
  CHECK(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 3);
  CHECK(ls[1] == csv_columns());

  r = run_cli("simulate " + (dir / "s.cfg").string() + " --set switch.N=0");
  CHECK(r.code == 1);
  r = run_cli("simulate " + (dir / "missing.cfg").string());
  CHECK(r.code == 1);

  {
    std::ofstream f(dir / "w.cfg");
    f << "switch.N = 4\nswitch.B = 2\nrun.slots = 1000\nsweep.axis = switch.B\nsweep.values = 1,2,4\n";
  }
  r = run_cli("sweep " + (dir / "w.cfg").string() + " --threads 2");
  CHECK(r.code == 0);
  CHECK(lines(r.out).size() == 5);

  r = run_cli("curves lb_distance N=32 t=10");
  CHECK(r.code == 0);
  CHECK(lines(r.out).size() == 2 + 31);

  {
    std::ofstream t(dir / "trace.csv");
    t << "time_ns,len_bytes,flow_key\n0,1500,f\n3,64,g\n";
    std::ofstream k(dir / "table.csv");
    k << "flow_key,output_port\nf,1\ng,2\n";
  }
  r = run_cli("ingest " + (dir / "trace.csv").string() + " " + (dir / "table.csv").string() + " --ports 4");
  CHECK(r.code == 0);
  ls = lines(r.out);
  REQUIRE(ls.size() == 2 + 25);
  CHECK(ls.back() == "24,0,2,1");
  fs::remove_all(dir);
}

TEST_CASE("trace scenario through config") {
  const auto dir = scratch();
  {
    std::ofstream t(dir / "in0.csv");
    t << "time_ns,len_bytes,flow_key\n0,640,f\n100,64,g\n";
    std::ofstream k(dir / "table.csv");
    k << "flow_key,output_port\nf,1\ng,0\n";
    std::ofstream c(dir / "t.cfg");
    c << "switch.N = 2\nswitch.B = 4\ntraffic.kind = trace\ntraffic.trace = in0.csv\n"
         "traffic.table = table.csv\nrun.slots = 100\n";
  }
  const auto s = scenario_from_config(KeyValueConfig::load(dir / "t.cfg"));
  const auto r = run_scenario(s);
  CHECK(r.arrivals == 11);
  CHECK(r.drops == 0);
  CHECK(r.departures == 11);
  fs::remove_all(dir);
}
