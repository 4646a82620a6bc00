#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lvmrs/engine.hpp"
#include "lvmrs/kernels.hpp"
#include "lvmrs/models.hpp"
#include "lvmrs/rng.hpp"

using namespace lvmrs;
namespace conc = lvmrs::concentration;

namespace {

// Echoes the input coordinate as a 2-class logit pair.
class EchoModel final : public models::ScoreModel {
 public:
  std::size_t input_dim() const override { return 1; }
  std::size_t num_classes() const override { return 2; }
  void scores(std::span<const double> x, std::span<double> out) const override {
    out[0] = x[0];
    out[1] = -x[0];
  }
};

}  // namespace

TEST_CASE("sample_scores collapses to the clean score as sigma -> 0") {
  models::ThresholdModel model;
  const double x[1] = {0.4};
  const auto scores = engine::sample_scores(model, {x, 1}, 16, 1e-12, 9, 0,
                                            engine::kValidationStream);
  for (std::size_t i = 0; i < scores.rows; ++i) {
    CHECK(std::abs(scores.row(i)[0] - 1.0) <= 1e-6);
    CHECK(std::abs(scores.row(i)[1] - 0.0) <= 1e-6);
  }
}

TEST_CASE("sample_scores is deterministic in the seed") {
  EchoModel model;
  const double x[1] = {0.1};
  const auto a = engine::sample_scores(model, {x, 1}, 64, 0.8, 42, 3, 1);
  const auto b = engine::sample_scores(model, {x, 1}, 64, 0.8, 42, 3, 1);
  CHECK(a.data == b.data);
  const auto c = engine::sample_scores(model, {x, 1}, 64, 0.8, 43, 3, 1);
  CHECK(a.data != c.data);
}

TEST_CASE("sample_scores noise has the requested moments") {
  EchoModel model;
  const double x[1] = {0.7};
  const std::size_t n = 100000;
  const auto scores = engine::sample_scores(model, {x, 1}, n, 1.0, 5, 0, 1);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += scores.row(i)[0];
    sumsq += scores.row(i)[0] * scores.row(i)[0];
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - 0.7) <= 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) <= 0.05);
}

TEST_CASE("estimate_phat on identical rows") {
  std::vector<double> data;
  for (int i = 0; i < 8; ++i) {
    data.insert(data.end(), {2.0, 1.0, 0.0});
  }
  const auto scores = engine::make_score_matrix(8, 3, data);
  const auto est = engine::estimate_phat(
      scores, {simplex::MapKind::softmax, 1.0, 1.0});
  const auto mapped = simplex::softmax(std::vector<double>{2.0, 1.0, 0.0}, 1.0,
                                       1.0);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(est.p_hat[k] == doctest::Approx(mapped.values[k]).epsilon(1e-14));
    CHECK(est.stats[k].sample_variance == 0.0);
    CHECK(est.stats[k].count == 8);
  }
}

TEST_CASE("estimate_phat hardmax on alternating rows") {
  std::vector<double> data;
  const std::size_t n = 100;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 2 == 0) {
      data.insert(data.end(), {1.0, 0.0, -1.0});
    } else {
      data.insert(data.end(), {0.0, 1.0, -1.0});
    }
  }
  const auto scores = engine::make_score_matrix(n, 3, data);
  const auto est = engine::estimate_phat(
      scores, {simplex::MapKind::hardmax, 1.0, 1.0});
  CHECK(est.p_hat[0] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(est.p_hat[1] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(est.p_hat[2] == 0.0);
  const double bernoulli = 0.25 * n / (n - 1.0);
  CHECK(est.stats[0].sample_variance ==
        doctest::Approx(bernoulli).epsilon(1e-12));
  CHECK(est.stats[1].sample_variance ==
        doctest::Approx(bernoulli).epsilon(1e-12));
}

TEST_CASE("estimate_phat matches sample_stats per column") {
  EchoModel model;
  const double x[1] = {0.05};
  const auto scores = engine::sample_scores(model, {x, 1}, 512, 0.7, 3, 0, 0);
  const simplex::MapSpec spec{simplex::MapKind::softmax, 0.8, 1.0};
  const auto est = engine::estimate_phat(scores, spec);
  std::vector<double> column(scores.rows);
  simplex::MapWorkspace ws;
  std::vector<double> mapped(2);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t i = 0; i < scores.rows; ++i) {
      simplex::apply_map_into(spec, scores.row(i), mapped, ws);
      column[i] = mapped[k];
    }
    const auto stats = conc::sample_stats(column);
    CHECK(est.p_hat[k] == doctest::Approx(stats.mean).epsilon(1e-13));
    CHECK(est.stats[k].sample_variance ==
          doctest::Approx(stats.sample_variance).epsilon(1e-12));
  }
}

TEST_CASE("soft maps damp the hardmax variance on near-tied logits") {
  // Rows straddle a tie; the indicator flips while the softmax moves little.
  EchoModel model;
  const double x[1] = {0.01};
  const auto scores = engine::sample_scores(model, {x, 1}, 4000, 0.05, 8, 0, 1);
  const auto hard = engine::estimate_phat(
      scores, {simplex::MapKind::hardmax, 1.0, 1.0});
  const auto soft = engine::estimate_phat(
      scores, {simplex::MapKind::softmax, 1.0, 1.0});
  CHECK(soft.stats[0].sample_variance < hard.stats[0].sample_variance);
  CHECK(soft.stats[1].sample_variance < hard.stats[1].sample_variance);
}

TEST_CASE("temperature grids") {
  const auto log_grid = engine::temperature_grid(0.01, 50.0, 50, true);
  CHECK(log_grid.size() == 50);
  CHECK(log_grid.front() == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(log_grid.back() == doctest::Approx(50.0).epsilon(1e-12));
  // log spacing: constant ratio
  const double ratio = log_grid[1] / log_grid[0];
  CHECK(log_grid[20] / log_grid[19] == doctest::Approx(ratio).epsilon(1e-9));

  const auto lin_grid = engine::temperature_grid(1.0, 2.0, 5, false);
  CHECK(lin_grid == std::vector<double>{1.0, 1.25, 1.5, 1.75, 2.0});
  CHECK_THROWS_AS(engine::temperature_grid(0.0, 1.0, 5, true),
                  std::invalid_argument);
}

TEST_CASE("grid candidates and config validation") {
  engine::GridConfig config;
  config.temperatures = {0.5, 1.0};
  const auto candidates = engine::grid_candidates(config);
  // sparsemax x2, softmax x2, hardmax x1
  CHECK(candidates.size() == 5);
  CHECK(candidates[4].kind == simplex::MapKind::hardmax);

  engine::GridConfig bad = config;
  bad.map_kinds = {};
  CHECK_THROWS_AS(engine::grid_candidates(bad), std::invalid_argument);

  bad = config;
  bad.method = conc::Method::clopper_pearson;
  CHECK_THROWS_AS(engine::grid_candidates(bad), std::invalid_argument);

  bad = config;
  bad.map_kinds = {simplex::MapKind::hardmax};
  bad.method = conc::Method::clopper_pearson;
  CHECK_NOTHROW(engine::grid_candidates(bad));

  bad = config;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(engine::grid_candidates(bad), std::invalid_argument);
}

TEST_CASE("lvm-rs is deterministic") {
  models::LinearModel model = models::LinearModel::random(3, 4, 99, 0.8);
  engine::GridConfig config;
  config.temperatures = engine::temperature_grid(0.05, 10.0, 8, true);
  config.n0 = 200;
  config.n = 400;
  config.sigma = 0.5;
  config.seed = 7;
  const std::vector<double> x{0.3, -0.1, 0.2, 0.05};
  engine::GridReport ra, rb;
  const auto a = engine::lvm_rs_certify(model, x, 0, config, &ra);
  const auto b = engine::lvm_rs_certify(model, x, 0, config, &rb);
  CHECK(a.prediction == b.prediction);
  CHECK(a.radius == b.radius);
  CHECK(a.map.kind == b.map.kind);
  CHECK(a.map.temperature == b.map.temperature);
  CHECK(ra.selected == rb.selected);
  REQUIRE(ra.candidates.size() == rb.candidates.size());
  for (std::size_t i = 0; i < ra.candidates.size(); ++i) {
    CHECK(ra.candidates[i].validation_radius ==
          rb.candidates[i].validation_radius);
  }
  CHECK(a.n0 == 200);
  CHECK(a.n == 400);
}

TEST_CASE("selection never touches the certification stream") {
  models::LinearModel model = models::LinearModel::random(3, 4, 5, 1.0);
  engine::GridConfig config;
  config.temperatures = {0.3, 1.0, 3.0};
  config.n0 = 300;
  config.n = 500;
  config.sigma = 0.4;
  const std::vector<double> x{0.1, 0.4, -0.2, 0.0};
  const auto validation = engine::sample_scores(model, x, config.n0,
                                                config.sigma, 0, 0,
                                                engine::kValidationStream);
  const auto cert_a = engine::sample_scores(model, x, config.n, config.sigma,
                                            0, 0, engine::kCertificationStream);
  const auto cert_b = engine::sample_scores(model, x, config.n, config.sigma,
                                            123, 0,
                                            engine::kCertificationStream);
  engine::GridReport report_a, report_b;
  engine::lvm_rs_certify_from_scores(validation, cert_a, config, &report_a);
  engine::lvm_rs_certify_from_scores(validation, cert_b, config, &report_b);
  CHECK(report_a.selected == report_b.selected);
  for (std::size_t i = 0; i < report_a.candidates.size(); ++i) {
    CHECK(report_a.candidates[i].validation_radius ==
          report_b.candidates[i].validation_radius);
  }
}

TEST_CASE("hardmax-only grid reduces to the classic baseline") {
  models::ThresholdModel model;
  engine::GridConfig config;
  config.map_kinds = {simplex::MapKind::hardmax};
  config.method = conc::Method::clopper_pearson;
  config.n0 = 50;
  config.n = 2000;
  config.sigma = 1.0;
  config.alpha = 0.01;
  const std::vector<double> x{0.9};
  engine::GridReport report;
  const auto cert = engine::lvm_rs_certify(model, x, 0, config, &report);
  CHECK(report.candidates.size() == 1);
  CHECK(cert.map.kind == simplex::MapKind::hardmax);

  // Reproduce by hand from the certification stream.
  const auto scores = engine::sample_scores(model, x, config.n, config.sigma,
                                            0, 0, engine::kCertificationStream);
  const auto est = engine::estimate_phat(
      scores, {simplex::MapKind::hardmax, 1.0, 1.0});
  const auto corrected = conc::correct_probs(est.p_hat, est.stats, config.alpha,
                                             conc::Method::clopper_pearson,
                                             1.0);
  const auto manual = radius::certify(corrected, config.sigma,
                                      radius::Rule::r2);
  CHECK(cert.prediction == manual.prediction);
  CHECK(cert.radius == manual.radius);
}

TEST_CASE("selection dominates the hardmax grid member on validation") {
  models::LinearModel model = models::LinearModel::random(4, 3, 31, 1.2);
  engine::GridConfig config;
  config.temperatures = engine::temperature_grid(0.1, 5.0, 6, true);
  config.n0 = 400;
  config.n = 400;
  config.sigma = 0.6;
  for (std::uint32_t input = 0; input < 10; ++input) {
    const std::vector<double> x{0.2 * input, -0.1, 0.3};
    engine::GridReport report;
    engine::lvm_rs_certify(model, x, input, config, &report);
    double hardmax_radius = -1.0;
    for (const auto& cand : report.candidates) {
      if (cand.spec.kind == simplex::MapKind::hardmax)
        hardmax_radius = cand.validation_radius;
    }
    REQUIRE(hardmax_radius >= 0.0);
    CHECK(report.candidates[report.selected].validation_radius >=
          hardmax_radius);
  }
}

TEST_CASE("mapped variance respects the smoothed-variance bound") {
  // Variance of a 1-Lipschitz map of an L-Lipschitz model under sigma-noise
  // is at most sigma^2 L^2 (plus sampling error).
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    models::LinearModel model = models::LinearModel::random(3, 3, seed, 0.7);
    const double sigma = 0.3 + 0.2 * static_cast<double>(seed);
    const std::vector<double> x{0.1, -0.4, 0.25};
    const auto scores = engine::sample_scores(model, x, 4000, sigma, seed, 0,
                                              engine::kValidationStream);
    const auto est = engine::estimate_phat(
        scores, {simplex::MapKind::sparsemax, 1.0, 1.0});
    const double cap = sigma * sigma * model.lipschitz() * model.lipschitz();
    for (const auto& stats : est.stats) {
      const double se = stats.sample_variance *
                        std::sqrt(2.0 / static_cast<double>(stats.count - 1));
      CHECK(stats.sample_variance <= cap + 3.0 * se + 1e-12);
    }
  }
}

TEST_CASE("certified accuracy curve") {
  std::vector<radius::Certificate> certs(4);
  certs[0].prediction = 0;
  certs[0].radius = 0.3;
  certs[1].prediction = 1;
  certs[1].radius = 0.7;
  certs[2].prediction = radius::kAbstain;
  certs[2].radius = 0.0;
  certs[3].prediction = 0;
  certs[3].radius = 0.5;  // wrong label below
  const std::vector<int> labels{0, 1, 0, 1};
  const std::vector<double> eps{0.0, 0.5, 0.65, 2.0};
  const auto curve = engine::certified_accuracy_curve(certs, labels, eps);
  CHECK(curve[0].certified_accuracy == doctest::Approx(0.5));   // clean
  CHECK(curve[1].certified_accuracy == doctest::Approx(0.25));  // radius 0.7
  CHECK(curve[2].certified_accuracy == doctest::Approx(0.25));
  CHECK(curve[3].certified_accuracy == 0.0);  // beyond the largest radius
  // monotone nonincreasing
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].certified_accuracy <= curve[i - 1].certified_accuracy);
  }
  const std::vector<int> short_labels{0, 1};
  CHECK_THROWS_AS(engine::certified_accuracy_curve(certs, short_labels, eps),
                  std::domain_error);
}

TEST_CASE("certification agrees across kernel instruction sets") {
  bool has_avx2 = true;
  try {
    kernels::force(kernels::Isa::avx2);
  } catch (...) {
    has_avx2 = false;
  }
  if (!has_avx2) {
    kernels::force(kernels::Isa::scalar);
    MESSAGE("avx2 unavailable; pipeline equivalence skipped");
    return;
  }
  models::LinearModel model = models::LinearModel::random(4, 3, 77, 1.0);
  engine::GridConfig config;
  config.temperatures = engine::temperature_grid(0.1, 5.0, 6, true);
  config.n0 = 300;
  config.n = 600;
  config.sigma = 0.5;
  const std::vector<double> x{0.2, -0.4, 0.1};

  kernels::force(kernels::Isa::scalar);
  engine::GridReport report_s;
  const auto cert_s = engine::lvm_rs_certify(model, x, 0, config, &report_s);
  kernels::force(kernels::Isa::avx2);
  engine::GridReport report_v;
  const auto cert_v = engine::lvm_rs_certify(model, x, 0, config, &report_v);
  kernels::force(kernels::Isa::scalar);

  CHECK(cert_s.prediction == cert_v.prediction);
  CHECK(cert_s.map.kind == cert_v.map.kind);
  CHECK(cert_s.radius == doctest::Approx(cert_v.radius).epsilon(1e-10));
  REQUIRE(report_s.candidates.size() == report_v.candidates.size());
  for (std::size_t i = 0; i < report_s.candidates.size(); ++i) {
    CHECK(report_s.candidates[i].validation_radius ==
          doctest::Approx(report_v.candidates[i].validation_radius)
              .epsilon(1e-10));
  }
}

TEST_CASE("classifier failures carry the row index") {
  class FailingModel final : public models::ScoreModel {
   public:
    std::size_t input_dim() const override { return 1; }
    std::size_t num_classes() const override { return 2; }
    void scores(std::span<const double>, std::span<double>) const override {
      throw std::runtime_error("backend unavailable");
    }
  };
  FailingModel model;
  const double x[1] = {0.0};
  try {
    engine::sample_scores(model, {x, 1}, 4, 1.0, 0, 0, 0);
    FAIL("expected a propagated classifier failure");
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK(what.find("row 0") != std::string::npos);
    CHECK(what.find("backend unavailable") != std::string::npos);
  }
}

TEST_CASE("score matrix validation") {
  CHECK_THROWS_AS(engine::make_score_matrix(1, 2, {1.0, 2.0}),
                  std::domain_error);
  CHECK_THROWS_AS(engine::make_score_matrix(2, 2, {1.0, 2.0, 3.0}),
                  std::domain_error);
  CHECK_THROWS_AS(
      engine::make_score_matrix(2, 2, {1.0, 2.0, std::nan(""), 4.0}),
      std::domain_error);
}
