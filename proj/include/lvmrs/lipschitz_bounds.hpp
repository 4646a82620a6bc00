#pragma once
// Closed-form Lipschitz bounds for Gaussian-smoothed classifiers, the noise
// level that maximizes the gain over the min-form bounds, and the local
// bound on the quantile-mapped class estimate.

namespace lvmrs::bounds {

struct BoundInputs {
  double base_lipschitz = 1.0;  // L of the mapped base classifier
  double sigma = 1.0;           // smoothing noise level
  double mass = 1.0;            // simplex mass r
};

enum class Case { elementwise, vector };

// L * erf(r / (2^{3/2} L sigma))
double smoothed_lipschitz_elementwise(const BoundInputs& in);

// L * erf(r / (2 L sigma))
double smoothed_lipschitz_vector(const BoundInputs& in);

// min(r / sqrt(2 pi sigma^2), L)
double min_form_elementwise(const BoundInputs& in);

// min(r / sqrt(pi sigma^2), L)
double min_form_vector(const BoundInputs& in);

// r / (L sqrt(2 pi)) for the elementwise case, r / (L sqrt(pi)) for the
// vector case; at this sigma the erf bound is erf(sqrt(pi)/2) * L ~ 0.79 L.
double optimal_sigma(double lipschitz, double mass, Case which);

// (r / sigma) * max over p' in [p - eps * smoothed_lipschitz,
// p + eps * smoothed_lipschitz] intersected with (0, min(1, r)) of
//   exp(-1/2 (quantile(p'/r)^2 - quantile(p')^2)),
// maximized over a 1024-point grid including the endpoints. Exactly 1/sigma
// when r = 1. Throws std::domain_error when the feasible interval is empty.
double local_lipschitz_quantile_map(double p, double mass, double sigma,
                                    double eps, double smoothed_lipschitz);

}  // namespace lvmrs::bounds
