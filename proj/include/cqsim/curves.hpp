#pragma once

#include <map>
#include <string>

namespace cqsim {

// Evaluates one analytic curve on a grid and returns CSV text (header
// comment, column line, rows). kind is one of oq_exponent, cq_lqf_exponent,
// pcq_exponent, variance_time, lb_distance. Unknown parameters are rejected.
std::string emit_curves(const std::string& kind, const std::map<std::string, std::string>& params);

}  // namespace cqsim
