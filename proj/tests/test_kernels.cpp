#include "doctest.h"

#include <cmath>
#include <vector>

#include "pilotwave/kernels.hpp"
#include "pilotwave/rng.hpp"

using namespace pilotwave;
namespace k = pilotwave::kernels;

namespace {

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
    CounterRng rng(seed, 7);
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = cplx(rng.uniform(2 * i) - 0.5, rng.uniform(2 * i + 1) - 0.5);
    return v;
}

std::vector<cplx> naive_dft(const std::vector<cplx>& in, bool inverse) {
    const std::size_t n = in.size();
    std::vector<cplx> out(n, cplx(0, 0));
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = sign * 2.0 * M_PI * static_cast<double>(i * j) /
                               static_cast<double>(n);
            out[j] += in[i] * cplx(std::cos(ang), std::sin(ang));
        }
    if (inverse)
        for (auto& x : out) x /= static_cast<double>(n);
    return out;
}

} // namespace

TEST_CASE("fft matches the naive dft") {
    for (std::size_t n : {16u, 64u, 256u}) {
        auto sig = random_signal(n, n);
        auto expected = naive_dft(sig, false);
        auto plan = k::fft_plan(n);
        auto got = sig;
        k::fft_inplace(*plan, got.data(), false);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(got[i].real() == doctest::Approx(expected[i].real()).epsilon(1e-10));
            CHECK(got[i].imag() == doctest::Approx(expected[i].imag()).epsilon(1e-10));
        }
    }
}

TEST_CASE("fft roundtrip and Parseval") {
    const std::size_t n = 1024;
    auto sig = random_signal(n, 3);
    auto plan = k::fft_plan(n);

    auto fwd = sig;
    k::fft_inplace(*plan, fwd.data(), false);

    double time_sum = 0.0, freq_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        time_sum += std::norm(sig[i]);
        freq_sum += std::norm(fwd[i]);
    }
    CHECK(freq_sum / static_cast<double>(n) ==
          doctest::Approx(time_sum).epsilon(1e-13));

    k::fft_inplace(*plan, fwd.data(), true);
    double max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_err = std::max(max_err, std::abs(fwd[i] - sig[i]));
    CHECK(max_err < 1e-14);
}

TEST_CASE("fft rejects non power-of-two sizes") {
    CHECK_THROWS_AS(k::fft_plan(48), ValidationError);
    CHECK_THROWS_AS(k::fft_plan(0), ValidationError);
}

TEST_CASE("serial and openmp fft batches agree bitwise") {
    const std::size_t rows = 37, n = 512;
    auto data = random_signal(rows * n, 11);
    auto a = data, b = data;
    auto plan = k::fft_plan(n);
    k::fft_rows(*plan, a.data(), rows, false, k::ExecPolicy::Serial);
    k::fft_rows(*plan, b.data(), rows, false, k::ExecPolicy::OpenMP);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].real() == b[i].real());
        CHECK(a[i].imag() == b[i].imag());
    }
}

TEST_CASE("pointwise kernels agree bitwise across policies") {
    const std::size_t n = 10000;
    auto data = random_signal(n, 21);
    std::vector<double> phase(n);
    CounterRng rng(5, 5);
    for (std::size_t i = 0; i < n; ++i) phase[i] = rng.uniform(i) * 6.28;

    auto a = data, b = data;
    k::apply_phase(a.data(), phase.data(), n, k::ExecPolicy::Serial);
    k::apply_phase(b.data(), phase.data(), n, k::ExecPolicy::OpenMP);
    for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == b[i]);

    // modulus preserved by a pure phase
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(a[i]) == doctest::Approx(std::abs(data[i])).epsilon(1e-14));
}

TEST_CASE("blocked reduction is policy-invariant and accurate") {
    const std::size_t n = 100000;
    auto data = random_signal(n, 31);

    const double s_ser = k::sum_abs2(data.data(), n, k::ExecPolicy::Serial);
    const double s_omp = k::sum_abs2(data.data(), n, k::ExecPolicy::OpenMP);
    CHECK(s_ser == s_omp); // identical block structure -> identical bits

    long double naive = 0.0;
    for (const auto& v : data) naive += std::norm(v);
    CHECK(s_ser == doctest::Approx(static_cast<double>(naive)).epsilon(1e-13));
}

TEST_CASE("transpose") {
    const std::size_t n0 = 48, n1 = 80;
    auto data = random_signal(n0 * n1, 41);
    std::vector<cplx> t(n0 * n1);
    k::transpose(data.data(), t.data(), n0, n1, k::ExecPolicy::OpenMP);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j)
            CHECK(t[j * n0 + i] == data[i * n1 + j]);
}

TEST_CASE("fft_2d separable check") {
    // A rank-1 signal f(i,j) = a(i) b(j) transforms to A(k) B(l).
    const std::size_t n0 = 32, n1 = 64;
    auto a = random_signal(n0, 51);
    auto b = random_signal(n1, 52);
    std::vector<cplx> f(n0 * n1);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) f[i * n1 + j] = a[i] * b[j];

    auto fa = naive_dft(a, false);
    auto fb = naive_dft(b, false);
    k::fft_2d(f.data(), n0, n1, false, k::ExecPolicy::OpenMP);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j)
            CHECK(std::abs(f[i * n1 + j] - fa[i] * fb[j]) < 1e-9);
}

TEST_CASE("counter rng is deterministic and label-forked") {
    CounterRng rng(42, 0);
    CounterRng same(42, 0);
    for (std::uint64_t i = 0; i < 16; ++i) CHECK(rng.bits(i) == same.bits(i));

    auto fa = rng.fork("slits");
    auto fb = rng.fork("trajectories");
    bool any_diff = false;
    for (std::uint64_t i = 0; i < 16; ++i)
        if (fa.bits(i) != fb.bits(i)) any_diff = true;
    CHECK(any_diff);

    // uniformity sanity: mean and variance of 1e5 draws
    double mean = 0.0, var = 0.0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) mean += rng.uniform(i);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = rng.uniform(i) - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.03));
}
