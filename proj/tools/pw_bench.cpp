// Kernel benchmark: serial reference vs OpenMP for the data-parallel cores.
// Usage: pw_bench [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pilotwave/field.hpp"
#include "pilotwave/kernels.hpp"
#include "pilotwave/madelung.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/rng.hpp"
#include "pilotwave/trajectory.hpp"

using namespace pilotwave;
namespace k = pilotwave::kernels;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename Fn>
double time_best(int repeats, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const double t0 = now_s();
        fn();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

void report(const char* name, double serial_s, double omp_s) {
    std::printf("%-28s serial %9.4f s   omp %9.4f s   speedup %5.2fx\n", name,
                serial_s, omp_s, serial_s / omp_s);
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#endif

    CounterRng rng(1234, 0);

    { // batched 1D FFT, 1024 rows of 4096
        const std::size_t rows = 1024, n = 4096;
        std::vector<cplx> data(rows * n);
        for (std::size_t i = 0; i < data.size(); ++i)
            data[i] = cplx(rng.uniform(2 * i) - 0.5, rng.uniform(2 * i + 1) - 0.5);
        auto plan = k::fft_plan(n);
        auto run = [&](k::ExecPolicy p) {
            auto copy = data;
            k::fft_rows(*plan, copy.data(), rows, false, p);
        };
        report("fft batch 1024x4096",
               time_best(repeats, [&] { run(k::ExecPolicy::Serial); }),
               time_best(repeats, [&] { run(k::ExecPolicy::OpenMP); }));
    }

    { // 2D split step on a 1024^2 grid
        const std::size_t n = 1024;
        Grid g = Grid::plane_centered(n, n, 20.0, 20.0);
        PhysicalParams params;
        StepConfig cfg;
        cfg.dt = 1e-3;
        auto pot = Potential::harmonic(1.0, 1.0);
        ComplexField psi = gaussian_packet(g, {0.0, 0.0}, {2.0, 2.0}, {0.0, 0.0}, params);
        auto run = [&](k::ExecPolicy p) {
            SchrodingerPropagator prop(g, params, pot, cfg, p);
            ComplexField f = psi;
            for (int s = 0; s < 4; ++s) prop.step_inplace(f);
        };
        report("split step 2D 1024^2 x4",
               time_best(repeats, [&] { run(k::ExecPolicy::Serial); }),
               time_best(repeats, [&] { run(k::ExecPolicy::OpenMP); }));
    }

    { // pointwise phase on 2^22 amplitudes
        const std::size_t n = std::size_t{1} << 22;
        std::vector<cplx> data(n, cplx(0.6, 0.8));
        std::vector<double> phase(n);
        for (std::size_t i = 0; i < n; ++i) phase[i] = rng.uniform(i) * 6.28;
        auto run = [&](k::ExecPolicy p) {
            auto copy = data;
            k::apply_phase(copy.data(), phase.data(), n, p);
        };
        report("apply_phase 4M",
               time_best(repeats, [&] { run(k::ExecPolicy::Serial); }),
               time_best(repeats, [&] { run(k::ExecPolicy::OpenMP); }));
    }

    { // deterministic reduction on 2^24
        const std::size_t n = std::size_t{1} << 24;
        std::vector<cplx> data(n, cplx(0.3, 0.4));
        report("sum_abs2 16M",
               time_best(repeats, [&] { k::sum_abs2(data.data(), n, k::ExecPolicy::Serial); }),
               time_best(repeats, [&] { k::sum_abs2(data.data(), n, k::ExecPolicy::OpenMP); }));
    }

    { // trajectory ensemble against a free-packet snapshot pair
        Grid g = Grid::line_centered(4096, 16.0);
        PhysicalParams params;
        ComplexField psi0 = gaussian_packet(g, 0.0, 1.0, 0.5, params);
        ComplexField psi1 = psi0;
        free_advance_inplace(psi1, params, 0.1);
        MadelungOptions mo;
        mo.with_qpotential = false;
        MadelungView va = madelung_decompose(psi0, params, mo);
        MadelungView vb = madelung_decompose(psi1, params, mo);
        auto starts = sample_initial_positions(psi0, 200000, rng);
        auto run = [&](k::ExecPolicy p) {
            TrajectoryBatch batch(starts, 0.0);
            batch.advance(va, 0.0, vb, 0.1, 8, p);
        };
        report("trajectories 2e5 x8 rk4",
               time_best(repeats, [&] { run(k::ExecPolicy::Serial); }),
               time_best(repeats, [&] { run(k::ExecPolicy::OpenMP); }));
    }

    return 0;
}
