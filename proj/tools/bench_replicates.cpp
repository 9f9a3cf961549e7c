// Compares the OpenMP replicate fan-out against the serial reference and
// checks that both produce identical summaries.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "mpclt/rmt_sim.hpp"

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
    mpclt::SimConfig cfg;
    cfg.p = 150;
    cfg.n = 300;
    cfg.replicates = argc > 1 ? std::atoi(argv[1]) : 200;
    cfg.seed = 42;
    cfg.functions = {"poly1", "poly2", "log"};

    const auto t0 = Clock::now();
    const mpclt::SimSummary serial = mpclt::run_serial(cfg);
    const double t_serial = seconds_since(t0);

    const auto t1 = Clock::now();
    const mpclt::SimSummary parallel = mpclt::run(cfg);
    const double t_parallel = seconds_since(t1);

    bool identical = serial.replicates_used == parallel.replicates_used;
    for (std::size_t i = 0; i < serial.functions.size() && identical; ++i)
        identical = serial.functions[i].empirical_mean == parallel.functions[i].empirical_mean &&
                    serial.functions[i].empirical_variance ==
                        parallel.functions[i].empirical_variance;

    std::printf("replicates         : %d (p=%d, n=%d)\n", cfg.replicates, cfg.p, cfg.n);
    std::printf("serial reference   : %.3f s\n", t_serial);
    std::printf("openmp fan-out     : %.3f s (%d worker cap)\n", t_parallel,
                mpclt::thread_budget(0));
    std::printf("speedup            : %.2fx\n", t_serial / t_parallel);
    std::printf("summaries identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
