#include "lvmrs/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lvmrs/kernels.hpp"

namespace lvmrs::concentration {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("risk alpha must lie in (0, 1)");
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::bernstein:
      return "bernstein";
    case Method::hoeffding:
      return "hoeffding";
    case Method::clopper_pearson:
      return "clopper-pearson";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "bernstein") return Method::bernstein;
  if (name == "hoeffding") return Method::hoeffding;
  if (name == "clopper-pearson" || name == "clopper_pearson")
    return Method::clopper_pearson;
  throw std::domain_error("unknown concentration method: " + name);
}

SampleStats sample_stats(std::span<const double> samples) {
  const std::int64_t n = static_cast<std::int64_t>(samples.size());
  if (n < 2) throw std::domain_error("sample_stats: need n >= 2");
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t count = 0;
  for (double v : samples) {
    if (!std::isfinite(v))
      throw std::domain_error("sample_stats: non-finite sample");
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  return {mean, m2 / static_cast<double>(n - 1), n};
}

double bernstein_shift(const SampleStats& stats, double alpha, double range) {
  check_alpha(alpha);
  if (stats.count < 2) throw std::domain_error("bernstein_shift: need n >= 2");
  if (!(range > 0.0)) throw std::domain_error("bernstein_shift: range <= 0");
  const double n = static_cast<double>(stats.count);
  const double log_term = std::log(2.0 / alpha);
  const double s01 = stats.sample_variance / (range * range);
  const double shift01 =
      std::sqrt(2.0 * s01 * log_term / n) + 7.0 * log_term / (3.0 * (n - 1.0));
  return range * shift01;
}

double hoeffding_shift(std::int64_t n, double alpha, double range) {
  check_alpha(alpha);
  if (n < 1) throw std::domain_error("hoeffding_shift: need n >= 1");
  if (!(range > 0.0)) throw std::domain_error("hoeffding_shift: range <= 0");
  return range * std::sqrt(std::log(2.0 / alpha) /
                           (2.0 * static_cast<double>(n)));
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0))
    throw std::domain_error("incomplete beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(log_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double beta_quantile(double q, double a, double b) {
  if (!(q >= 0.0 && q <= 1.0))
    throw std::domain_error("beta_quantile: q outside [0, 1]");
  if (q == 0.0) return 0.0;
  if (q == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_incomplete_beta(a, b, mid) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> clopper_pearson_bounds(std::int64_t successes,
                                                 std::int64_t n,
                                                 double alpha) {
  check_alpha(alpha);
  if (n < 1 || successes < 0 || successes > n)
    throw std::domain_error("clopper_pearson_bounds: invalid counts");
  const double k = static_cast<double>(successes);
  const double nn = static_cast<double>(n);
  const double lower =
      successes == 0 ? 0.0 : beta_quantile(alpha / 2.0, k, nn - k + 1.0);
  const double upper =
      successes == n ? 1.0 : beta_quantile(1.0 - alpha / 2.0, k + 1.0, nn - k);
  return {lower, upper};
}

CorrectedProbs correct_probs(std::span<const double> p_hat,
                             std::span<const SampleStats> per_class_stats,
                             double alpha, Method method, double mass,
                             RiskSplit risk_split) {
  check_alpha(alpha);
  if (!(mass > 0.0)) throw std::domain_error("correct_probs: mass <= 0");
  const std::size_t c = p_hat.size();
  if (c < 2) throw std::domain_error("correct_probs: need at least 2 classes");
  if (per_class_stats.size() != c)
    throw std::domain_error("correct_probs: stats/p_hat length mismatch");
  for (double v : p_hat) {
    if (!(v >= -1e-12 && v <= mass * (1.0 + 1e-12)))
      throw std::domain_error("correct_probs: p_hat entry outside [0, mass]");
  }

  const double alpha_eff =
      risk_split == RiskSplit::bonferroni ? alpha / static_cast<double>(c)
                                          : alpha;
  const std::size_t top = kernels::argmax(p_hat.data(), c);

  CorrectedProbs out;
  out.raw.assign(p_hat.begin(), p_hat.end());
  out.corrected.resize(c);
  out.alpha = alpha;
  out.method = method;
  out.risk_split = risk_split;
  out.mass = mass;

  for (std::size_t k = 0; k < c; ++k) {
    double value = 0.0;
    switch (method) {
      case Method::bernstein: {
        const double shift =
            bernstein_shift(per_class_stats[k], alpha_eff, mass);
        value = k == top ? p_hat[k] - shift : p_hat[k] + shift;
        break;
      }
      case Method::hoeffding: {
        const double shift =
            hoeffding_shift(per_class_stats[k].count, alpha_eff, mass);
        value = k == top ? p_hat[k] - shift : p_hat[k] + shift;
        break;
      }
      case Method::clopper_pearson: {
        // Mass-r hardmax samples are Bernoulli scaled by r; recover counts.
        const std::int64_t n = per_class_stats[k].count;
        const std::int64_t successes = std::clamp<std::int64_t>(
            std::llround(p_hat[k] * static_cast<double>(n) / mass), 0, n);
        const auto [lower, upper] =
            clopper_pearson_bounds(successes, n, alpha_eff);
        value = mass * (k == top ? lower : upper);
        break;
      }
    }
    out.corrected[k] = std::clamp(value, 0.0, mass);
  }
  return out;
}

}  // namespace lvmrs::concentration
