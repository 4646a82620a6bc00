#pragma once
// Standard-normal CDF, quantile, and erf. Pure and thread-safe.

#include <stdexcept>

namespace lvmrs::specfun {

// Raised by gaussian_quantile at p = 0 or p = 1; callers decide how to clamp.
struct InfiniteQuantile : std::domain_error {
  explicit InfiniteQuantile(double p)
      : std::domain_error(p == 0.0 ? "quantile(-inf) at p = 0"
                                   : "quantile(+inf) at p = 1") {}
};

// Phi(z). Throws std::domain_error on non-finite input.
double gaussian_cdf(double z);

// Phi^-1(p) with |Phi(q) - p| <= 1e-12. Rational initial estimate refined by
// Halley steps against gaussian_cdf. Throws InfiniteQuantile at p in {0, 1}
// and std::domain_error outside [0, 1].
double gaussian_quantile(double p);

double erf(double x);

}  // namespace lvmrs::specfun
