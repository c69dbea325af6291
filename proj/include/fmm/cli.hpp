#pragma once

#include <string>
#include <vector>

#include "fmm/portfolio.hpp"

namespace fmm::cli {

// Exit codes, SAT-solver style.
enum ExitCode {
    kExitSat = 0,
    kExitVerifyFail = 1,
    kExitUsage = 2,
    kExitUnsatExhaustive = 20,
    kExitUnsatRestricted = 21,
    kExitUnknown = 30,
};

// Per-seed table plus "geo mean (min, med, max)" rows for time and branches;
// renders "T.O. (N/A, N/A, N/A)" when no run completed.
std::string render_report(const std::vector<SeedRun>& runs);

int run(int argc, const char* const* argv);

}  // namespace fmm::cli
