#include "lvmrs/kernels.hpp"

#include <algorithm>
#include <cmath>

// Scalar reference kernels. These define the semantics the SIMD variants
// are tested against.

namespace lvmrs::kernels::detail {

double exp_shift_scale_scalar(const double* x, std::size_t n, double shift,
                              double inv_t, double* y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double arg = (x[i] - shift) * inv_t;
    const double v = arg < -708.0 ? 0.0 : std::exp(arg);
    y[i] = v;
    sum += v;
  }
  return sum;
}

void scaled_threshold_scalar(const double* x, std::size_t n, double inv_t,
                             double rho, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = std::max(x[i] * inv_t - rho, 0.0);
  }
}

void scale_scalar(double* x, std::size_t n, double s) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

double reduce_max_scalar(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

double reduce_sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

std::size_t argmax_scalar(const double* x, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] > x[best]) best = i;
  }
  return best;
}

void welford_row_scalar(double* mean, double* m2, const double* x,
                        std::size_t n, double inv_count) {
  for (std::size_t k = 0; k < n; ++k) {
    const double delta = x[k] - mean[k];
    mean[k] += delta * inv_count;
    m2[k] += delta * (x[k] - mean[k]);
  }
}

}  // namespace lvmrs::kernels::detail
