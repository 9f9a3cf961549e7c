#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mpclt {

struct CheckLine {
    std::string label;
    double measured;
    double target;
    double tolerance;
    bool pass;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool skipped = false;
    double seconds = 0.0;
    std::vector<CheckLine> checks;
    bool pass() const;
};

struct VerifyReport {
    std::vector<CriterionResult> criteria;
    std::uint64_t seed = 0;
    bool all_pass() const;  // skipped criteria do not count against the run
};

/// Runs the acceptance criteria. level "fast" skips the multi-thousand
/// replicate Monte Carlo criteria (7, 9, 10); "full" runs everything.
VerifyReport run_acceptance(const std::string& level, std::uint64_t seed = 12345);

/// One line per criterion: "[PASS|FAIL|SKIP] <id> <name> ...".
void print_report(const VerifyReport& report, std::ostream& os);

}  // namespace mpclt
