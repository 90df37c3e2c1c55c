#pragma once

#include <cstdint>

#include "czlab/config.hpp"
#include "czlab/report.hpp"

namespace czlab {

// Runs one configured experiment and collects checks and tables.  Throws
// std::invalid_argument for malformed parameters; numerical failures inside
// an experiment become failed checks, not exceptions.
Report run_experiment(const ExperimentConfig& cfg);

// Cross-module smoke battery; every check is cheap and exact.
Report run_quick_suite(std::uint64_t seed);

// Full battery, one check per numbered criterion.  Each criterion is timed
// and isolated: an exception fails that criterion and the run continues.
Report run_acceptance_suite(std::uint64_t seed);

}  // namespace czlab
