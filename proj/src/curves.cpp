#include "cqsim/curves.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "cqsim/analytics.hpp"
#include "cqsim/scenario.hpp"

namespace cqsim {

namespace {

class Params {
 public:
  Params(const std::map<std::string, std::string>& p, std::set<std::string> allowed) : p_(p) {
    for (const auto& [k, v] : p_)
      if (!allowed.count(k)) throw ConfigError("curves: unknown parameter '" + k + "'");
  }
  double num(const std::string& k, double def) const {
    auto it = p_.find(k);
    if (it == p_.end()) return def;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(k);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("curves: parameter '" + k + "' is not a number");
    }
  }
  int integer(const std::string& k, int def) const {
    const double v = num(k, def);
    if (v != std::floor(v)) throw ConfigError("curves: parameter '" + k + "' must be an integer");
    return static_cast<int>(v);
  }
  std::vector<std::int64_t> list(const std::string& k, std::vector<std::int64_t> def) const {
    auto it = p_.find(k);
    if (it == p_.end()) return def;
    std::vector<std::int64_t> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stoll(item));
      } catch (const std::exception&) {
        throw ConfigError("curves: bad list entry '" + item + "' in '" + k + "'");
      }
    }
    return out;
  }

 private:
  const std::map<std::string, std::string>& p_;
};

std::vector<double> mu_grid(const Params& p) {
  const double lo = p.num("mu_min", 0.01), hi = p.num("mu_max", 0.99), step = p.num("mu_step", 0.01);
  if (!(step > 0.0) || !(lo > 0.0) || !(hi < 1.0 + 1e-12) || lo > hi) throw ConfigError("curves: bad mu grid");
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) g.push_back(lo + k * step);
  return g;
}

}  // namespace

std::string emit_curves(const std::string& kind, const std::map<std::string, std::string>& params) {
  std::ostringstream out;
  out << "# cqsim curve " << kind << " v1\n";
  const auto f = format_number;
  if (kind == "oq_exponent" || kind == "cq_lqf_exponent" || kind == "pcq_exponent") {
    Params p(params, {"N", "C", "w", "r", "mu_min", "mu_max", "mu_step"});
    const int N = p.integer("N", 32);
    const double C = p.num("C", 1.0);
    const auto grid = mu_grid(p);
    if (kind == "oq_exponent") {
      out << "x,value,gamma_star\n";
      for (double mu : grid) {
        const auto e = exponent_oq(N, C, mu / N);
        out << f(mu) << ',' << f(e.E) << ',' << f(e.gamma_star) << '\n';
      }
    } else if (kind == "cq_lqf_exponent") {
      out << "x,value,n_star,gamma_star,eta_pred\n";
      for (double mu : grid) {
        const auto e = exponent_cq_lqf(N, C, mu / N);
        out << f(mu) << ',' << f(e.E) << ',' << e.mode.n_star << ',' << f(e.mode.gamma_star) << ','
            << f(predicted_critical_utilization(e.mode, N)) << '\n';
      }
    } else {
      const int w = p.integer("w", 1), r = p.integer("r", 1);
      out << "x,value,n_star,r_star,gamma_star\n";
      for (double mu : grid) {
        const auto e = exponent_pcq(N, C, mu / N, w, r);
        out << f(mu) << ',' << f(e.E) << ',' << e.mode.n_star << ',' << e.mode.r_star << ','
            << f(e.mode.gamma_star) << '\n';
      }
    }
    return out.str();
  }
  if (kind == "variance_time") {
    Params p(params, {"p01", "p10", "t"});
    const auto m = OnOffModel::from_rates(p.num("p01", 1.0 / 390.0), p.num("p10", 0.1));
    out << "x,value,mean\n";
    for (auto t : p.list("t", {1, 10, 100, 1000, 10000}))
      out << t << ',' << f(variance_time_onoff(m, t)) << ',' << f(onoff_mean_arrivals(m, t)) << '\n';
    return out.str();
  }
  if (kind == "lb_distance") {
    Params p(params, {"p01", "p10", "N", "t"});
    const auto m = OnOffModel::from_rates(p.num("p01", 1.0 / 390.0), p.num("p10", 0.1));
    const int N = p.integer("N", 32);
    const auto ts = p.list("t", {10});
    if (ts.size() != 1) throw ConfigError("curves: lb_distance takes a single t");
    out << "x,value,sigma2_orig\n";
    for (int k = 1; k < N; ++k) {
      const auto d = variance_lb_distance(m, N, k, ts[0]);
      out << k << ',' << f(d.sigma2_lb) << ',' << f(d.sigma2_orig) << '\n';
    }
    return out.str();
  }
  throw ConfigError("curves: unknown kind '" + kind + "'");
}

}  // namespace cqsim
