#pragma once
// Built-in classifiers with analytically known properties: the saturated
// sign function whose smoothed gradient attains the elementwise bound, a 1-D
// threshold classifier with closed-form smoothed value, and affine
// multiclass models with an exact spectral-norm Lipschitz constant.
// Models are immutable after construction; evaluation is pure.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lvmrs/rng.hpp"

namespace lvmrs::models {

// Score oracle interface consumed by the smoothing engine.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t num_classes() const = 0;
  virtual void scores(std::span<const double> x, std::span<double> out)
      const = 0;
};

// h(x) = 1/2 sign(x_1) min{r, 2 L |x_1|} + r/2, sign(0) = 0. Output in
// [0, r]; L-Lipschitz.
double worst_case_hbar(std::span<const double> x, double lipschitz,
                       double mass);

// Exact smoothed value of the indicator 1{z > 0}: Phi(x / sigma).
double exact_smoothed_threshold(double x, double sigma);

// c = 2, d = 1: scores (1{x > 0}, 1 - 1{x > 0}).
class ThresholdModel final : public ScoreModel {
 public:
  std::size_t input_dim() const override { return 1; }
  std::size_t num_classes() const override { return 2; }
  void scores(std::span<const double> x, std::span<double> out) const override;
};

// c = 2: scores (hbar(x), r - hbar(x)); already on the mass-r simplex.
class WorstCaseModel final : public ScoreModel {
 public:
  WorstCaseModel(std::size_t dim, double lipschitz, double mass);
  std::size_t input_dim() const override { return dim_; }
  std::size_t num_classes() const override { return 2; }
  void scores(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const { return lipschitz_; }
  double mass() const { return mass_; }

 private:
  std::size_t dim_;
  double lipschitz_;
  double mass_;
};

// scores(x) = W x + b with the exact Lipschitz constant (largest singular
// value of W, power iteration to 1e-10 relative) computed at construction.
class LinearModel final : public ScoreModel {
 public:
  // weights is row-major c x d.
  LinearModel(std::size_t classes, std::size_t dim,
              std::vector<double> weights, std::vector<double> bias);

  // Gaussian-entry model drawn from a counter RNG; entries scaled by `scale`.
  static LinearModel random(std::size_t classes, std::size_t dim,
                            std::uint64_t seed, double scale = 1.0);

  std::size_t input_dim() const override { return dim_; }
  std::size_t num_classes() const override { return classes_; }
  void scores(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const { return lipschitz_; }

 private:
  std::size_t classes_;
  std::size_t dim_;
  std::vector<double> weights_;
  std::vector<double> bias_;
  double lipschitz_;
};

// Largest singular value of a row-major rows x cols matrix, power iteration
// on A^T A to 1e-10 relative tolerance.
double spectral_norm(std::span<const double> matrix, std::size_t rows,
                     std::size_t cols);

// Raised when two estimates of the same quantity disagree beyond their
// combined standard errors. The CLI maps this to its own exit code.
struct NumericalConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ScalarFn = std::function<double(std::span<const double>)>;

struct GradientEstimate {
  double stein = 0.0;              // norm of the Stein-identity estimate
  double finite_difference = 0.0;  // norm of the central-difference estimate
  double stein_se = 0.0;
  double finite_difference_se = 0.0;
};

// Estimates the gradient norm of the Gaussian-smoothed fn at x two ways:
// the Stein identity (1/sigma^2) E[delta h(x + delta)] and central finite
// differences of the Monte-Carlo smoothed value with step h_fd, sharing the
// same noise draws. Throws NumericalConsistencyError when the two disagree
// beyond 5 combined standard errors.
GradientEstimate numeric_smoothed_gradient_norm(const ScalarFn& fn,
                                                std::size_t dim,
                                                std::span<const double> x,
                                                double sigma,
                                                std::int64_t n_mc, double h_fd,
                                                const rng::CounterRng& noise);

}  // namespace lvmrs::models
