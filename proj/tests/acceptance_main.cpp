// Acceptance suite driver: one line per criterion, nonzero exit on failure.
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include "mpclt/verify.hpp"

int main(int argc, char** argv) {
    std::string level = "full";
    std::uint64_t seed = 12345;
    if (argc > 1) level = argv[1];
    if (argc > 2) seed = std::strtoull(argv[2], nullptr, 10);
    try {
        const mpclt::VerifyReport report = mpclt::run_acceptance(level, seed);
        mpclt::print_report(report, std::cout);
        return report.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance: " << e.what() << "\n";
        return 3;
    }
}
