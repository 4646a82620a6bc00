#include "lvmrs/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lvmrs/kernels.hpp"
#include "lvmrs/rng.hpp"

namespace lvmrs::engine {

namespace {

void check_config(const GridConfig& config) {
  if (config.map_kinds.empty())
    throw std::invalid_argument("grid config: no simplex maps");
  if (!(config.mass > 0.0))
    throw std::invalid_argument("grid config: mass <= 0");
  if (config.n0 < 2 || config.n < 2)
    throw std::invalid_argument("grid config: n0 and n must be >= 2");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw std::invalid_argument("grid config: alpha outside (0, 1)");
  if (!(config.sigma > 0.0))
    throw std::invalid_argument("grid config: sigma <= 0");
  const bool needs_temps =
      std::any_of(config.map_kinds.begin(), config.map_kinds.end(),
                  [](simplex::MapKind k) {
                    return k != simplex::MapKind::hardmax;
                  });
  if (needs_temps) {
    if (config.temperatures.empty())
      throw std::invalid_argument("grid config: empty temperature list");
    for (double t : config.temperatures) {
      if (!(t > 0.0))
        throw std::invalid_argument("grid config: temperature <= 0");
    }
    if (config.method == concentration::Method::clopper_pearson)
      throw std::invalid_argument(
          "grid config: clopper-pearson applies to hardmax-only grids "
          "(Bernoulli samples)");
  }
}

}  // namespace

ScoreMatrix make_score_matrix(std::size_t rows, std::size_t cols,
                              std::vector<double> data) {
  if (rows < 2) throw std::domain_error("score matrix: need n >= 2 rows");
  if (cols < 2) throw std::domain_error("score matrix: need c >= 2 classes");
  if (data.size() != rows * cols)
    throw std::domain_error("score matrix: size mismatch");
  for (double v : data) {
    if (!std::isfinite(v))
      throw std::domain_error("score matrix: non-finite entry");
  }
  return {rows, cols, std::move(data)};
}

ScoreMatrix sample_scores(const models::ScoreModel& model,
                          std::span<const double> x, std::size_t n,
                          double sigma, std::uint64_t seed,
                          std::uint32_t input_id, std::uint32_t stream) {
  if (!(sigma > 0.0)) throw std::domain_error("sample_scores: sigma <= 0");
  if (n < 2) throw std::domain_error("sample_scores: need n >= 2");
  const std::size_t d = model.input_dim();
  const std::size_t c = model.num_classes();
  if (x.size() != d)
    throw std::domain_error("sample_scores: input dimension mismatch");

  const rng::CounterRng noise(seed, input_id, stream);
  ScoreMatrix scores{n, c, std::vector<double>(n * c)};
  std::vector<double> pt(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      pt[j] = x[j] + sigma * noise.normal(static_cast<std::uint64_t>(i) * d + j);
    }
    try {
      model.scores(pt, {scores.data.data() + i * c, c});
    } catch (const std::exception& e) {
      throw std::runtime_error("sample_scores: classifier failed at row " +
                               std::to_string(i) + ": " + e.what());
    }
  }
  return scores;
}

PerClassEstimate estimate_phat(const ScoreMatrix& scores,
                               const simplex::MapSpec& spec) {
  const std::size_t n = scores.rows;
  const std::size_t c = scores.cols;
  std::vector<double> mean(c, 0.0), m2(c, 0.0), mapped(c);
  simplex::MapWorkspace ws;
  for (std::size_t i = 0; i < n; ++i) {
    simplex::apply_map_into(spec, scores.row(i), mapped, ws);
    kernels::welford_row(mean.data(), m2.data(), mapped.data(), c,
                         1.0 / static_cast<double>(i + 1));
  }
  PerClassEstimate est;
  est.p_hat = mean;
  est.stats.resize(c);
  for (std::size_t k = 0; k < c; ++k) {
    est.stats[k] = {mean[k], m2[k] / static_cast<double>(n - 1),
                    static_cast<std::int64_t>(n)};
  }
  return est;
}

std::vector<double> temperature_grid(double lo, double hi, std::size_t count,
                                     bool log_scale) {
  if (!(lo > 0.0) || !(hi >= lo))
    throw std::invalid_argument("temperature grid: need 0 < lo <= hi");
  if (count == 0) throw std::invalid_argument("temperature grid: count == 0");
  std::vector<double> temps(count);
  if (count == 1) {
    temps[0] = lo;
    return temps;
  }
  if (log_scale) {
    const double step = (std::log(hi) - std::log(lo)) /
                        static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
      temps[i] = std::exp(std::log(lo) + step * static_cast<double>(i));
  } else {
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
      temps[i] = lo + step * static_cast<double>(i);
  }
  return temps;
}

std::vector<simplex::MapSpec> grid_candidates(const GridConfig& config) {
  check_config(config);
  std::vector<simplex::MapSpec> candidates;
  for (simplex::MapKind kind : config.map_kinds) {
    if (kind == simplex::MapKind::hardmax) {
      candidates.push_back({kind, 1.0, config.mass});
    } else {
      for (double t : config.temperatures)
        candidates.push_back({kind, t, config.mass});
    }
  }
  return candidates;
}

radius::Certificate lvm_rs_certify_from_scores(const ScoreMatrix& validation,
                                               const ScoreMatrix& certification,
                                               const GridConfig& config,
                                               GridReport* report) {
  const auto candidates = grid_candidates(config);
  if (validation.cols != certification.cols)
    throw std::domain_error("certify: class-count mismatch between batches");

  std::size_t best = 0;
  double best_radius = -std::numeric_limits<double>::infinity();
  GridReport local;
  local.candidates.reserve(candidates.size());
  for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
    const auto& spec = candidates[idx];
    const PerClassEstimate est = estimate_phat(validation, spec);
    const auto corrected =
        concentration::correct_probs(est.p_hat, est.stats, config.alpha,
                                     config.method, config.mass,
                                     config.risk_split);
    const double r2 =
        radius::radius_r2({corrected.corrected, config.mass}, config.sigma);
    local.candidates.push_back({spec, r2});
    if (r2 > best_radius) {  // strict: first candidate wins ties
      best_radius = r2;
      best = idx;
    }
  }
  local.selected = best;

  const auto& selected = candidates[best];
  const PerClassEstimate est = estimate_phat(certification, selected);
  const auto corrected =
      concentration::correct_probs(est.p_hat, est.stats, config.alpha,
                                   config.method, config.mass,
                                   config.risk_split);
  radius::Certificate cert =
      radius::certify(corrected, config.sigma, radius::Rule::r2);
  cert.n0 = static_cast<std::int64_t>(validation.rows);
  cert.n = static_cast<std::int64_t>(certification.rows);
  cert.map = selected;
  if (report != nullptr) *report = std::move(local);
  return cert;
}

radius::Certificate lvm_rs_certify(const models::ScoreModel& model,
                                   std::span<const double> x,
                                   std::uint32_t input_id,
                                   const GridConfig& config,
                                   GridReport* report) {
  check_config(config);
  const ScoreMatrix validation = sample_scores(
      model, x, config.n0, config.sigma, config.seed, input_id,
      kValidationStream);
  const ScoreMatrix certification = sample_scores(
      model, x, config.n, config.sigma, config.seed, input_id,
      kCertificationStream);
  return lvm_rs_certify_from_scores(validation, certification, config, report);
}

std::vector<CurvePoint> certified_accuracy_curve(
    std::span<const radius::Certificate> certificates,
    std::span<const int> labels, std::span<const double> eps_grid) {
  if (certificates.size() != labels.size())
    throw std::domain_error(
        "certified_accuracy_curve: certificates/labels length mismatch");
  if (certificates.empty())
    throw std::domain_error("certified_accuracy_curve: no certificates");
  std::vector<CurvePoint> curve;
  curve.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < certificates.size(); ++i) {
      const auto& cert = certificates[i];
      if (cert.prediction != radius::kAbstain && cert.prediction == labels[i] &&
          cert.radius >= eps) {
        ++hits;
      }
    }
    curve.push_back({eps, static_cast<double>(hits) /
                              static_cast<double>(certificates.size())});
  }
  return curve;
}

}  // namespace lvmrs::engine
