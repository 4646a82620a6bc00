#include "lvmrs/radius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "lvmrs/kernels.hpp"
#include "lvmrs/specfun.hpp"

namespace lvmrs::radius {

namespace {

double clamped_quantile(double p) {
  return specfun::gaussian_quantile(
      std::clamp(p, kQuantileClamp, 1.0 - kQuantileClamp));
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("radius: sigma <= 0");
}

// Largest and second-largest entries.
std::pair<double, double> top_two(std::span<const double> v) {
  double first = -std::numeric_limits<double>::infinity();
  double second = first;
  for (double x : v) {
    if (x > first) {
      second = first;
      first = x;
    } else if (x > second) {
      second = x;
    }
  }
  return {first, second};
}

}  // namespace

const char* rule_name(Rule rule) {
  switch (rule) {
    case Rule::r1:
      return "R1";
    case Rule::r2:
      return "R2";
    case Rule::r3:
      return "R3";
  }
  return "?";
}

Rule rule_from_name(const std::string& name) {
  if (name == "R1" || name == "r1") return Rule::r1;
  if (name == "R2" || name == "r2") return Rule::r2;
  if (name == "R3" || name == "r3") return Rule::r3;
  throw std::domain_error("unknown radius rule: " + name);
}

double margin(std::span<const double> scores, std::size_t label) {
  if (scores.size() < 2) throw std::domain_error("margin: need c >= 2");
  if (label >= scores.size()) throw std::domain_error("margin: bad label");
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (k != label) best_other = std::max(best_other, scores[k]);
  }
  return std::max(0.0, scores[label] - best_other);
}

double radius_r1(double margin, double lipschitz) {
  if (!(lipschitz > 0.0)) throw std::domain_error("radius_r1: lipschitz <= 0");
  if (!(margin >= 0.0)) throw std::domain_error("radius_r1: margin < 0");
  return margin / (M_SQRT2 * lipschitz);
}

double radius_r2(const simplex::SimplexVector& p, double sigma) {
  check_sigma(sigma);
  if (p.values.size() < 2) throw std::domain_error("radius_r2: need c >= 2");
  const auto [p1, p2] = top_two(p.values);
  const double q1 = clamped_quantile(p1 / p.mass);
  const double q2 = clamped_quantile(p2 / p.mass);
  return std::max(0.0, 0.5 * sigma * (q1 - q2));
}

double radius_r3(double p1, double sigma) {
  check_sigma(sigma);
  if (!(p1 >= 0.0 && p1 <= 1.0))
    throw std::domain_error("radius_r3: p1 outside [0, 1]");
  return std::max(0.0, sigma * clamped_quantile(p1));
}

Certificate certify(const concentration::CorrectedProbs& corrected,
                    double sigma, Rule rule) {
  check_sigma(sigma);
  if (rule == Rule::r1)
    throw std::domain_error(
        "certify: R1 needs a margin and a Lipschitz constant; use radius_r1");
  const auto& p = corrected.corrected;
  if (p.size() < 2) throw std::domain_error("certify: need c >= 2");

  Certificate cert;
  cert.rule = rule;
  cert.sigma = sigma;
  cert.alpha = corrected.alpha;

  const std::size_t top = kernels::argmax(p.data(), p.size());
  double runner = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k != top) runner = std::max(runner, p[k]);
  }
  if (!(p[top] > runner)) {
    cert.prediction = kAbstain;
    cert.radius = 0.0;
    return cert;
  }
  cert.prediction = static_cast<int>(top);
  cert.radius = rule == Rule::r2
                    ? radius_r2({p, corrected.mass}, sigma)
                    : radius_r3(p[top] / corrected.mass, sigma);
  return cert;
}

}  // namespace lvmrs::radius
