#pragma once
// Data-parallel inner loops used by the simplex maps and the score-matrix
// moment accumulation. Every kernel has a scalar reference implementation
// and (on x86-64) an AVX2 variant selected at runtime; the two are
// equivalence-tested against each other in tests/test_kernels.cpp.
//
// Selection: auto-detected at first use, overridable with the environment
// variable LVMRS_KERNELS=scalar|avx2 or with force().

#include <cstddef>

namespace lvmrs::kernels {

enum class Isa { scalar, avx2 };

// Instruction set currently dispatched to.
Isa active();

// Override dispatch (used by the equivalence tests). Throws std::runtime_error
// if the requested ISA is not available on this CPU/build.
void force(Isa isa);

const char* name(Isa isa);

// y[i] = exp((x[i] - shift) * inv_t); returns sum of y. Arguments that
// underflow produce exactly 0.
double exp_shift_scale(const double* x, std::size_t n, double shift,
                       double inv_t, double* y);

// y[i] = max(x[i] * inv_t - rho, 0)
void scaled_threshold(const double* x, std::size_t n, double inv_t, double rho,
                      double* y);

// x[i] *= s
void scale(double* x, std::size_t n, double s);

double reduce_max(const double* x, std::size_t n);
double reduce_sum(const double* x, std::size_t n);

// Index of the largest element; lowest index wins ties.
std::size_t argmax(const double* x, std::size_t n);

// One Welford step across a row of per-class samples:
//   delta   = x[k] - mean[k]
//   mean[k] += delta * inv_count
//   m2[k]   += delta * (x[k] - mean[k])
// inv_count is 1/count for the row being absorbed.
void welford_row(double* mean, double* m2, const double* x, std::size_t n,
                 double inv_count);

}  // namespace lvmrs::kernels
