#pragma once
// Margin and certified-radius rules, prediction/abstention, and certificate
// assembly. Quantile arguments are normalized by the simplex mass and
// clamped to [1e-12, 1 - 1e-12] before the normal quantile is applied, so
// radii stay finite.

#include <cstdint>
#include <span>
#include <string>

#include "lvmrs/concentration.hpp"
#include "lvmrs/simplex_maps.hpp"

namespace lvmrs::radius {

enum class Rule { r1, r2, r3 };

const char* rule_name(Rule rule);
Rule rule_from_name(const std::string& name);

inline constexpr int kAbstain = -1;
inline constexpr double kQuantileClamp = 1e-12;

struct Certificate {
  int prediction = kAbstain;  // class index, or kAbstain
  double radius = 0.0;
  Rule rule = Rule::r2;
  double sigma = 0.0;
  double alpha = 0.0;
  std::int64_t n0 = 0;
  std::int64_t n = 0;
  simplex::MapSpec map;
};

// max(0, scores[label] - max over the other coordinates)
double margin(std::span<const double> scores, std::size_t label);

// margin / (sqrt(2) * lipschitz)
double radius_r1(double margin, double lipschitz);

// max(0, sigma/2 * (quantile(p1) - quantile(p2))) on the two largest
// entries of p normalized by its mass.
double radius_r2(const simplex::SimplexVector& p, double sigma);

// max(0, sigma * quantile(p1)) for an already-normalized top probability.
double radius_r3(double p1, double sigma);

// Prediction is the argmax of the corrected vector (lowest index on ties);
// abstains with radius 0 when the corrected top does not strictly dominate
// the runner-up. rule must be r2 or r3; r1 needs a margin and a Lipschitz
// constant and is assembled via radius_r1 instead.
Certificate certify(const concentration::CorrectedProbs& corrected,
                    double sigma, Rule rule);

}  // namespace lvmrs::radius
