#include "pilotwave/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pilotwave::kernels {

namespace {
std::atomic<ExecPolicy> g_policy{ExecPolicy::OpenMP};
constexpr std::size_t kBlock = 4096; // reduction block size, fixed by contract
} // namespace

ExecPolicy default_policy() { return g_policy.load(); }
void set_default_policy(ExecPolicy p) { g_policy.store(p); }

// ---- FFT ------------------------------------------------------------------

struct FftPlan {
    std::size_t n = 0;
    int log2n = 0;
    std::vector<std::uint32_t> bitrev;
    // Twiddles for stage s (s = 1..log2n): w_j = exp(-i pi j / 2^(s-1)),
    // stored stage after stage (total n-1 entries).
    std::vector<cplx> twiddle;
};

std::shared_ptr<const FftPlan> fft_plan(std::size_t n) {
    static std::mutex mtx;
    static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;

    if (n < 2 || (n & (n - 1)) != 0)
        throw ValidationError("fft size must be a power of two >= 2, got " +
                              std::to_string(n));

    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    auto plan = std::make_shared<FftPlan>();
    plan->n = n;
    while ((std::size_t{1} << plan->log2n) < n) ++plan->log2n;

    plan->bitrev.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t r = 0;
        for (int b = 0; b < plan->log2n; ++b)
            r |= ((i >> b) & 1u) << (plan->log2n - 1 - b);
        plan->bitrev[i] = r;
    }

    plan->twiddle.reserve(n - 1);
    for (std::size_t half = 1; half < n; half *= 2) {
        const double ang = -M_PI / static_cast<double>(half);
        for (std::size_t j = 0; j < half; ++j)
            plan->twiddle.emplace_back(std::cos(ang * static_cast<double>(j)),
                                       std::sin(ang * static_cast<double>(j)));
    }

    cache.emplace(n, plan);
    return plan;
}

void fft_inplace(const FftPlan& plan, cplx* a, bool inverse) {
    const std::size_t n = plan.n;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = plan.bitrev[i];
        if (i < j) std::swap(a[i], a[j]);
    }

    const cplx* w_stage = plan.twiddle.data();
    for (std::size_t half = 1; half < n; half *= 2) {
        for (std::size_t base = 0; base < n; base += 2 * half) {
            for (std::size_t j = 0; j < half; ++j) {
                const cplx w = inverse ? std::conj(w_stage[j]) : w_stage[j];
                cplx& u = a[base + j];
                cplx& v = a[base + j + half];
                const double tr = w.real() * v.real() - w.imag() * v.imag();
                const double ti = w.real() * v.imag() + w.imag() * v.real();
                v = cplx(u.real() - tr, u.imag() - ti);
                u = cplx(u.real() + tr, u.imag() + ti);
            }
        }
        w_stage += half;
    }

    if (inverse) {
        const double s = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) a[i] *= s;
    }
}

void fft_rows(const FftPlan& plan, cplx* data, std::size_t count, bool inverse,
              ExecPolicy policy) {
    const std::size_t n = plan.n;
    if (policy == ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(count); ++r)
            fft_inplace(plan, data + static_cast<std::size_t>(r) * n, inverse);
    } else {
        for (std::size_t r = 0; r < count; ++r)
            fft_inplace(plan, data + r * n, inverse);
    }
}

void transpose(const cplx* src, cplx* dst, std::size_t n0, std::size_t n1,
               ExecPolicy policy) {
    constexpr std::size_t B = 32;
    const std::size_t nb0 = (n0 + B - 1) / B;
    const std::size_t nb1 = (n1 + B - 1) / B;
    const std::size_t nblocks = nb0 * nb1;

    auto do_block = [&](std::size_t blk) {
        const std::size_t bi = (blk / nb1) * B;
        const std::size_t bj = (blk % nb1) * B;
        const std::size_t ei = std::min(bi + B, n0);
        const std::size_t ej = std::min(bj + B, n1);
        for (std::size_t i = bi; i < ei; ++i)
            for (std::size_t j = bj; j < ej; ++j)
                dst[j * n0 + i] = src[i * n1 + j];
    };

    if (policy == ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b)
            do_block(static_cast<std::size_t>(b));
    } else {
        for (std::size_t b = 0; b < nblocks; ++b) do_block(b);
    }
}

void fft_2d(cplx* data, std::size_t n0, std::size_t n1, bool inverse,
            ExecPolicy policy) {
    auto plan1 = fft_plan(n1);
    fft_rows(*plan1, data, n0, inverse, policy);

    std::vector<cplx> tmp(n0 * n1);
    transpose(data, tmp.data(), n0, n1, policy);

    auto plan0 = fft_plan(n0);
    fft_rows(*plan0, tmp.data(), n1, inverse, policy);

    transpose(tmp.data(), data, n1, n0, policy);
}

// ---- pointwise --------------------------------------------------------------

void multiply_inplace(cplx* data, const cplx* factor, std::size_t n,
                      ExecPolicy policy) {
    if (policy == ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            const cplx a = data[i], b = factor[i];
            data[i] = cplx(a.real() * b.real() - a.imag() * b.imag(),
                           a.real() * b.imag() + a.imag() * b.real());
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const cplx a = data[i], b = factor[i];
            data[i] = cplx(a.real() * b.real() - a.imag() * b.imag(),
                           a.real() * b.imag() + a.imag() * b.real());
        }
    }
}

void apply_phase(cplx* data, const double* phase, std::size_t n,
                 ExecPolicy policy) {
    if (policy == ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            const double c = std::cos(phase[i]), s = std::sin(phase[i]);
            const cplx a = data[i];
            data[i] = cplx(a.real() * c - a.imag() * s,
                           a.real() * s + a.imag() * c);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double c = std::cos(phase[i]), s = std::sin(phase[i]);
            const cplx a = data[i];
            data[i] = cplx(a.real() * c - a.imag() * s,
                           a.real() * s + a.imag() * c);
        }
    }
}

void scale_inplace(cplx* data, const double* scale, std::size_t n,
                   ExecPolicy policy) {
    if (policy == ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
            data[i] *= scale[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) data[i] *= scale[i];
    }
}

// ---- reductions --------------------------------------------------------------

namespace {

template <typename BlockFn>
double blocked_sum(std::size_t n, ExecPolicy policy, BlockFn&& block_fn) {
    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nblocks);

    if (policy == ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
            const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
            partial[b] = block_fn(lo, std::min(lo + kBlock, n));
        }
    } else {
        for (std::size_t b = 0; b < nblocks; ++b) {
            const std::size_t lo = b * kBlock;
            partial[b] = block_fn(lo, std::min(lo + kBlock, n));
        }
    }

    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

} // namespace

double sum_abs2(const cplx* data, std::size_t n, ExecPolicy policy) {
    return blocked_sum(n, policy, [data](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            s += data[i].real() * data[i].real() + data[i].imag() * data[i].imag();
        return s;
    });
}

double sum_weighted_abs2(const cplx* data, const double* weight, std::size_t n,
                         ExecPolicy policy) {
    return blocked_sum(n, policy, [data, weight](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            s += weight[i] * (data[i].real() * data[i].real() +
                              data[i].imag() * data[i].imag());
        return s;
    });
}

double sum(const double* data, std::size_t n, ExecPolicy policy) {
    return blocked_sum(n, policy, [data](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += data[i];
        return s;
    });
}

bool all_finite(const cplx* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(data[i].real()) || !std::isfinite(data[i].imag()))
            return false;
    return true;
}

} // namespace pilotwave::kernels
