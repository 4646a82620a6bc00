#include "lvmrs/models.hpp"

#include <algorithm>
#include <cmath>

#include "lvmrs/specfun.hpp"

namespace lvmrs::models {

double worst_case_hbar(std::span<const double> x, double lipschitz,
                       double mass) {
  if (!(lipschitz > 0.0 && mass > 0.0))
    throw std::domain_error("worst_case_hbar: L and r must be positive");
  if (x.empty()) throw std::domain_error("worst_case_hbar: empty input");
  const double x1 = x[0];
  const double sign = x1 > 0.0 ? 1.0 : (x1 < 0.0 ? -1.0 : 0.0);
  return 0.5 * sign * std::min(mass, 2.0 * lipschitz * std::abs(x1)) +
         0.5 * mass;
}

double exact_smoothed_threshold(double x, double sigma) {
  if (!(sigma > 0.0))
    throw std::domain_error("exact_smoothed_threshold: sigma <= 0");
  return specfun::gaussian_cdf(x / sigma);
}

void ThresholdModel::scores(std::span<const double> x,
                            std::span<double> out) const {
  const double ind = x[0] > 0.0 ? 1.0 : 0.0;
  out[0] = ind;
  out[1] = 1.0 - ind;
}

WorstCaseModel::WorstCaseModel(std::size_t dim, double lipschitz, double mass)
    : dim_(dim), lipschitz_(lipschitz), mass_(mass) {
  if (dim == 0) throw std::domain_error("WorstCaseModel: dim must be >= 1");
  if (!(lipschitz > 0.0 && mass > 0.0))
    throw std::domain_error("WorstCaseModel: L and r must be positive");
}

void WorstCaseModel::scores(std::span<const double> x,
                            std::span<double> out) const {
  const double h = worst_case_hbar(x, lipschitz_, mass_);
  out[0] = h;
  out[1] = mass_ - h;
}

double spectral_norm(std::span<const double> matrix, std::size_t rows,
                     std::size_t cols) {
  if (rows == 0 || cols == 0 || matrix.size() != rows * cols)
    throw std::domain_error("spectral_norm: bad dimensions");

  std::vector<double> v(cols), av(rows), atav(cols);
  // Deterministic, non-degenerate start.
  for (std::size_t j = 0; j < cols; ++j)
    v[j] = 1.0 + 0.01 * static_cast<double>(j);
  double vnorm = 0.0;
  for (double s : v) vnorm += s * s;
  vnorm = std::sqrt(vnorm);
  for (double& s : v) s /= vnorm;

  double sigma_prev = 0.0;
  for (int it = 0; it < 100000; ++it) {
    for (std::size_t i = 0; i < rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += matrix[i * cols + j] * v[j];
      av[i] = s;
    }
    double sigma = 0.0;
    for (double s : av) sigma += s * s;
    sigma = std::sqrt(sigma);
    if (sigma == 0.0) return 0.0;
    if (std::abs(sigma - sigma_prev) <= 1e-10 * sigma) return sigma;
    sigma_prev = sigma;
    for (std::size_t j = 0; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < rows; ++i) s += matrix[i * cols + j] * av[i];
      atav[j] = s;
    }
    double norm = 0.0;
    for (double s : atav) norm += s * s;
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < cols; ++j) v[j] = atav[j] / norm;
  }
  return sigma_prev;
}

LinearModel::LinearModel(std::size_t classes, std::size_t dim,
                         std::vector<double> weights,
                         std::vector<double> bias)
    : classes_(classes),
      dim_(dim),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (classes_ < 2) throw std::domain_error("LinearModel: need c >= 2");
  if (weights_.size() != classes_ * dim_ || bias_.size() != classes_)
    throw std::domain_error("LinearModel: shape mismatch");
  lipschitz_ = spectral_norm(weights_, classes_, dim_);
}

LinearModel LinearModel::random(std::size_t classes, std::size_t dim,
                                std::uint64_t seed, double scale) {
  const rng::CounterRng draws(seed, 0, 0x6d6f6465u);  // model-parameter stream
  std::vector<double> w(classes * dim), b(classes);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = scale * draws.normal(i);
  for (std::size_t k = 0; k < classes; ++k)
    b[k] = scale * draws.normal(w.size() + k);
  return LinearModel(classes, dim, std::move(w), std::move(b));
}

void LinearModel::scores(std::span<const double> x,
                         std::span<double> out) const {
  for (std::size_t k = 0; k < classes_; ++k) {
    double s = bias_[k];
    const double* row = weights_.data() + k * dim_;
    for (std::size_t j = 0; j < dim_; ++j) s += row[j] * x[j];
    out[k] = s;
  }
}

GradientEstimate numeric_smoothed_gradient_norm(const ScalarFn& fn,
                                                std::size_t dim,
                                                std::span<const double> x,
                                                double sigma,
                                                std::int64_t n_mc, double h_fd,
                                                const rng::CounterRng& noise) {
  if (!(sigma > 0.0))
    throw std::domain_error("numeric_smoothed_gradient_norm: sigma <= 0");
  if (n_mc < 100000)
    throw std::domain_error(
        "numeric_smoothed_gradient_norm: need n_mc >= 1e5");
  if (!(h_fd > 0.0))
    throw std::domain_error("numeric_smoothed_gradient_norm: h_fd <= 0");
  if (x.size() != dim)
    throw std::domain_error("numeric_smoothed_gradient_norm: dim mismatch");

  const double n = static_cast<double>(n_mc);
  std::vector<double> pt(dim), delta(dim);
  std::vector<double> stein_sum(dim, 0.0), stein_sumsq(dim, 0.0);
  std::vector<double> fd_sum(dim, 0.0), fd_sumsq(dim, 0.0);

  for (std::int64_t i = 0; i < n_mc; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      delta[j] = sigma * noise.normal(static_cast<std::uint64_t>(i) * dim + j);
      pt[j] = x[j] + delta[j];
    }
    const double h = fn(pt);
    for (std::size_t j = 0; j < dim; ++j) {
      const double s = delta[j] * h;
      stein_sum[j] += s;
      stein_sumsq[j] += s * s;
    }
    // Central differences on the same draws.
    for (std::size_t j = 0; j < dim; ++j) {
      const double saved = pt[j];
      pt[j] = saved + h_fd;
      const double hp = fn(pt);
      pt[j] = saved - h_fd;
      const double hm = fn(pt);
      pt[j] = saved;
      const double d = (hp - hm) / (2.0 * h_fd);
      fd_sum[j] += d;
      fd_sumsq[j] += d * d;
    }
  }

  const double inv_s2 = 1.0 / (sigma * sigma);
  double stein_norm2 = 0.0, fd_norm2 = 0.0;
  double stein_var = 0.0, fd_var = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double gs = stein_sum[j] / n * inv_s2;
    const double gf = fd_sum[j] / n;
    stein_norm2 += gs * gs;
    fd_norm2 += gf * gf;
    const double vs =
        (stein_sumsq[j] / n - (stein_sum[j] / n) * (stein_sum[j] / n)) / n;
    const double vf = (fd_sumsq[j] / n - (fd_sum[j] / n) * (fd_sum[j] / n)) / n;
    stein_var += std::max(vs, 0.0) * inv_s2 * inv_s2;
    fd_var += std::max(vf, 0.0);
  }

  GradientEstimate est;
  est.stein = std::sqrt(stein_norm2);
  est.finite_difference = std::sqrt(fd_norm2);
  est.stein_se = std::sqrt(stein_var);
  est.finite_difference_se = std::sqrt(fd_var);

  const double tol =
      5.0 * std::sqrt(est.stein_se * est.stein_se +
                      est.finite_difference_se * est.finite_difference_se);
  if (std::abs(est.stein - est.finite_difference) > tol) {
    throw NumericalConsistencyError(
        "smoothed gradient estimates disagree: stein " +
        std::to_string(est.stein) + " vs finite-difference " +
        std::to_string(est.finite_difference) + " (5-sigma tol " +
        std::to_string(tol) + ")");
  }
  return est;
}

}  // namespace lvmrs::models
