#include "lvmrs/lipschitz_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lvmrs/specfun.hpp"

namespace lvmrs::bounds {

namespace {

void check_inputs(const BoundInputs& in) {
  if (!(in.base_lipschitz > 0.0 && in.sigma > 0.0 && in.mass > 0.0))
    throw std::domain_error("bound inputs must be strictly positive");
}

constexpr std::size_t kGridPoints = 1024;
constexpr double kEdge = 1e-12;

}  // namespace

double smoothed_lipschitz_elementwise(const BoundInputs& in) {
  check_inputs(in);
  const double arg =
      in.mass / (2.0 * M_SQRT2 * in.base_lipschitz * in.sigma);
  return in.base_lipschitz * specfun::erf(arg);
}

double smoothed_lipschitz_vector(const BoundInputs& in) {
  check_inputs(in);
  const double arg = in.mass / (2.0 * in.base_lipschitz * in.sigma);
  return in.base_lipschitz * specfun::erf(arg);
}

double min_form_elementwise(const BoundInputs& in) {
  check_inputs(in);
  return std::min(in.mass / std::sqrt(2.0 * M_PI * in.sigma * in.sigma),
                  in.base_lipschitz);
}

double min_form_vector(const BoundInputs& in) {
  check_inputs(in);
  return std::min(in.mass / std::sqrt(M_PI * in.sigma * in.sigma),
                  in.base_lipschitz);
}

double optimal_sigma(double lipschitz, double mass, Case which) {
  if (!(lipschitz > 0.0 && mass > 0.0))
    throw std::domain_error("optimal_sigma: inputs must be positive");
  const double root =
      which == Case::elementwise ? std::sqrt(2.0 * M_PI) : std::sqrt(M_PI);
  return mass / (lipschitz * root);
}

double local_lipschitz_quantile_map(double p, double mass, double sigma,
                                    double eps, double smoothed_lipschitz) {
  if (!(mass > 0.0 && sigma > 0.0))
    throw std::domain_error("local_lipschitz_quantile_map: bad mass/sigma");
  if (!(eps >= 0.0 && smoothed_lipschitz >= 0.0))
    throw std::domain_error(
        "local_lipschitz_quantile_map: eps and smoothed_lipschitz must be "
        ">= 0");
  const double cap = std::min(1.0, mass);
  const double radius = eps * smoothed_lipschitz;
  const double lo = std::max(p - radius, kEdge);
  const double hi = std::min(p + radius, cap - kEdge);
  if (!(lo <= hi))
    throw std::domain_error(
        "local_lipschitz_quantile_map: empty feasible interval");

  double best = -std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / static_cast<double>(kGridPoints - 1);
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    const double q = lo + step * static_cast<double>(i);
    const double qn = specfun::gaussian_quantile(q / mass);
    const double qp = specfun::gaussian_quantile(q);
    best = std::max(best, std::exp(-0.5 * (qn * qn - qp * qp)));
  }
  return mass / sigma * best;
}

}  // namespace lvmrs::bounds
