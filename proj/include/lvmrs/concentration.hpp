#pragma once
// Sample statistics and risk-correction shifts: empirical Bernstein,
// Hoeffding, and Clopper-Pearson, plus assembly of the risk-corrected
// probability vector (top-class estimate shifted down, every other class
// shifted up, clamped to [0, mass]).

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lvmrs::concentration {

struct SampleStats {
  double mean = 0.0;
  double sample_variance = 0.0;  // unbiased, n - 1 in the denominator
  std::int64_t count = 0;
};

enum class Method { bernstein, hoeffding, clopper_pearson };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

// How the risk budget is spread over the c simultaneous bounds:
// paper_literal applies alpha to each class shift as the formulas are
// printed; bonferroni divides alpha by the number of bounded classes.
enum class RiskSplit { paper_literal, bonferroni };

struct CorrectedProbs {
  std::vector<double> raw;        // p-hat
  std::vector<double> corrected;  // p-bar
  double alpha = 0.0;
  Method method = Method::bernstein;
  RiskSplit risk_split = RiskSplit::paper_literal;
  double mass = 1.0;
};

SampleStats sample_stats(std::span<const double> samples);

// One-direction shift for mean estimates of i.i.d. samples in [0, range]:
//   sqrt(2 S log(2/alpha) / n) + 7 log(2/alpha) / (3 (n - 1))
// evaluated on the [0, 1]-rescaled samples and scaled back by range.
double bernstein_shift(const SampleStats& stats, double alpha, double range);

// range * sqrt(log(2/alpha) / (2 n))
double hoeffding_shift(std::int64_t n, double alpha, double range);

// Exact two-sided binomial interval via beta quantiles:
//   lower = BetaQuantile(alpha/2; k, n-k+1)      (0 when k = 0)
//   upper = BetaQuantile(1-alpha/2; k+1, n-k)    (1 when k = n)
std::pair<double, double> clopper_pearson_bounds(std::int64_t successes,
                                                 std::int64_t n, double alpha);

CorrectedProbs correct_probs(std::span<const double> p_hat,
                             std::span<const SampleStats> per_class_stats,
                             double alpha, Method method, double mass,
                             RiskSplit risk_split = RiskSplit::paper_literal);

// Exposed for the quantile and coverage tests.
double regularized_incomplete_beta(double a, double b, double x);
double beta_quantile(double q, double a, double b);  // bisection to 1e-10

}  // namespace lvmrs::concentration
