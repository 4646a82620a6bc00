#pragma once
// Monte-Carlo estimation of smoothed classifiers and the grid-search
// certification procedure: sample a validation and a certification batch
// from independent counter-RNG streams, pick the (map, temperature) pair
// whose risk-corrected radius on the validation batch is largest, then
// certify on the untouched certification batch.
//
// Certification of distinct inputs is embarrassingly parallel; all sampling
// is a pure function of (seed, input id, stream, index), and row reductions
// run in fixed index order, so results do not depend on scheduling.

#include <cstdint>
#include <span>
#include <vector>

#include "lvmrs/concentration.hpp"
#include "lvmrs/models.hpp"
#include "lvmrs/radius.hpp"
#include "lvmrs/simplex_maps.hpp"

namespace lvmrs::engine {

struct ScoreMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
};

// Validates shape and finiteness (rows >= 2, cols >= 2, all entries finite).
ScoreMatrix make_score_matrix(std::size_t rows, std::size_t cols,
                              std::vector<double> data);

inline constexpr std::uint32_t kValidationStream = 0;
inline constexpr std::uint32_t kCertificationStream = 1;

// Row i holds model scores at x + delta_i, delta_i ~ N(0, sigma^2 I) drawn
// deterministically from (seed, input_id, stream, i).
ScoreMatrix sample_scores(const models::ScoreModel& model,
                          std::span<const double> x, std::size_t n,
                          double sigma, std::uint64_t seed,
                          std::uint32_t input_id, std::uint32_t stream);

struct PerClassEstimate {
  std::vector<double> p_hat;
  std::vector<concentration::SampleStats> stats;
};

// Row-mean and per-class sample variance of the mapped score rows.
PerClassEstimate estimate_phat(const ScoreMatrix& scores,
                               const simplex::MapSpec& spec);

struct GridConfig {
  std::vector<simplex::MapKind> map_kinds = {simplex::MapKind::sparsemax,
                                             simplex::MapKind::softmax,
                                             simplex::MapKind::hardmax};
  std::vector<double> temperatures = {1.0};
  double mass = 1.0;
  std::size_t n0 = 1000;
  std::size_t n = 10000;
  double alpha = 1e-3;
  double sigma = 0.25;
  std::uint64_t seed = 0;
  concentration::Method method = concentration::Method::bernstein;
  concentration::RiskSplit risk_split =
      concentration::RiskSplit::paper_literal;
};

std::vector<double> temperature_grid(double lo, double hi, std::size_t count,
                                     bool log_scale);

// One candidate per temperature for softmax and sparsemax; hardmax is
// temperature-free and contributes a single candidate.
std::vector<simplex::MapSpec> grid_candidates(const GridConfig& config);

struct CandidateReport {
  simplex::MapSpec spec;
  double validation_radius = 0.0;  // risk-corrected R2 on the validation batch
};

struct GridReport {
  std::vector<CandidateReport> candidates;
  std::size_t selected = 0;
};

// Full procedure against a score oracle: two independent sampling streams,
// grid selection on the validation batch, certificate from the
// certification batch under the selected map.
radius::Certificate lvm_rs_certify(const models::ScoreModel& model,
                                   std::span<const double> x,
                                   std::uint32_t input_id,
                                   const GridConfig& config,
                                   GridReport* report = nullptr);

// Same procedure on pre-sampled scores (sampling happened upstream; sigma in
// the config is metadata for the radius).
radius::Certificate lvm_rs_certify_from_scores(const ScoreMatrix& validation,
                                               const ScoreMatrix& certification,
                                               const GridConfig& config,
                                               GridReport* report = nullptr);

struct CurvePoint {
  double eps = 0.0;
  double certified_accuracy = 0.0;
};

// Fraction of inputs with correct prediction and radius >= eps, per eps.
std::vector<CurvePoint> certified_accuracy_curve(
    std::span<const radius::Certificate> certificates,
    std::span<const int> labels, std::span<const double> eps_grid);

}  // namespace lvmrs::engine
