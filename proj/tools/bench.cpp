// Compares the serial reference batch kernel with the OpenMP kernel and
// reports simulation speed relative to real time.
//
//   fluidic_bench [games] [workers]

#include "fluidic/game_def.hpp"
#include "fluidic/harness.hpp"
#include "fluidic/parallel.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

using namespace fluidic;

namespace {

template <typename F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

int main(int argc, char** argv) {
    const int games = argc > 1 ? std::atoi(argv[1]) : 16;
    const int workers = argc > 2 ? std::atoi(argv[2]) : default_workers();
    const auto def = preset("let_it_snow");

    BatchConfig cfg;
    cfg.games_per_level = games;
    cfg.levels = {0.0, 1.0};
    cfg.base_seed = 1;
    cfg.workers = workers;

    BatchMetrics serial, parallel;
    const double t_serial = seconds([&] { serial = batch_serial(def, cfg); });
    const double t_parallel = seconds([&] { parallel = batch(def, cfg); });

    const double simulated = 2.0 * games * def.game_duration;
    std::printf("games            %d x 2 levels, %.0f s simulated\n", games, simulated);
    std::printf("serial           %.3f s  (%.0fx real time)\n", t_serial, simulated / t_serial);
    std::printf("openmp (%2d thr)  %.3f s  (%.0fx real time, speedup %.2f)\n", workers, t_parallel,
                simulated / t_parallel, t_serial / t_parallel);
    std::printf("results match    %s\n", serial == parallel ? "yes" : "NO");
    return serial == parallel ? 0 : 1;
}
