#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "pilotwave/common.hpp"

namespace pilotwave::kernels {

// Every kernel exists in two variants selected by ExecPolicy. The element
// order of the floating-point work inside one transform/block is identical in
// both, so Serial and OpenMP results are bit-identical; tests rely on that.
enum class ExecPolicy { Serial, OpenMP };

// Process-wide default used by the higher layers.
ExecPolicy default_policy();
void set_default_policy(ExecPolicy p);

// ---- FFT ----------------------------------------------------------------
// Iterative radix-2, power-of-two sizes only. Forward is unnormalized
// (sign -1 in the exponent); inverse applies the 1/n factor.

struct FftPlan;
std::shared_ptr<const FftPlan> fft_plan(std::size_t n);

void fft_inplace(const FftPlan& plan, cplx* data, bool inverse);

// Batch of `count` contiguous rows of length n, laid out back to back.
// Parallelism is over rows; each row is computed by a single thread.
void fft_rows(const FftPlan& plan, cplx* data, std::size_t count, bool inverse,
              ExecPolicy policy);

// 2D transform of a row-major n0 x n1 array: rows, transpose, rows, transpose.
void fft_2d(cplx* data, std::size_t n0, std::size_t n1, bool inverse,
            ExecPolicy policy);

// Blocked out-of-place transpose of a row-major n0 x n1 array into n1 x n0.
void transpose(const cplx* src, cplx* dst, std::size_t n0, std::size_t n1,
               ExecPolicy policy);

// ---- pointwise ----------------------------------------------------------

// data[i] *= factor[i]
void multiply_inplace(cplx* data, const cplx* factor, std::size_t n,
                      ExecPolicy policy);

// data[i] *= exp(i * phase[i])
void apply_phase(cplx* data, const double* phase, std::size_t n,
                 ExecPolicy policy);

// data[i] *= scale[i]  (real amplitude factor, e.g. absorbing mask)
void scale_inplace(cplx* data, const double* scale, std::size_t n,
                   ExecPolicy policy);

// ---- reductions ----------------------------------------------------------
// Fixed 4096-element blocks, block partials combined in index order. The
// result is independent of thread count and bit-identical between policies.

double sum_abs2(const cplx* data, std::size_t n, ExecPolicy policy);
double sum_weighted_abs2(const cplx* data, const double* weight, std::size_t n,
                         ExecPolicy policy);
double sum(const double* data, std::size_t n, ExecPolicy policy);

bool all_finite(const cplx* data, std::size_t n);

} // namespace pilotwave::kernels
