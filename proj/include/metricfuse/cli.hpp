#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace metricfuse {

// Subcommands: calibrate | score | evaluate | inspect. args excludes the
// program name. Exit codes: 0 success, 1 data/validation error, 2 numeric
// failure (ill-conditioned surrogate, undefined objective).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace metricfuse
