#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lvmrs/models.hpp"
#include "lvmrs/rng.hpp"

using namespace lvmrs;

TEST_CASE("worst-case function worked examples") {
  const double x0[2] = {0.0, 4.0};
  CHECK(models::worst_case_hbar({x0, 2}, 1.0, 1.0) == 0.5);  // sign(0) = 0

  const double xsat[1] = {0.5};  // r / (2L) with L = 1, r = 1
  CHECK(models::worst_case_hbar({xsat, 1}, 1.0, 1.0) == 1.0);

  const double xneg[1] = {-0.125};  // -r/(4L) with L = 2, r = 1
  CHECK(models::worst_case_hbar({xneg, 1}, 2.0, 1.0) ==
        doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("worst-case function is L-Lipschitz and bounded") {
  const rng::CounterRng draws(11, 0, 0);
  std::uint64_t idx = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double lipschitz = 0.5 + 4.0 * draws.uniform(idx++);
    const double mass = 0.5 + 2.0 * draws.uniform(idx++);
    double x[2], y[2];
    for (int j = 0; j < 2; ++j) {
      x[j] = -3.0 + 6.0 * draws.uniform(idx++);
      y[j] = -3.0 + 6.0 * draws.uniform(idx++);
    }
    const double hx = models::worst_case_hbar({x, 2}, lipschitz, mass);
    const double hy = models::worst_case_hbar({y, 2}, lipschitz, mass);
    CHECK(hx >= 0.0);
    CHECK(hx <= mass);
    const double dist = std::hypot(x[0] - y[0], x[1] - y[1]);
    CHECK(std::abs(hx - hy) <= lipschitz * dist + 1e-12);
  }
}

TEST_CASE("exact smoothed threshold") {
  CHECK(models::exact_smoothed_threshold(0.0, 1.0) == 0.5);
  CHECK(models::exact_smoothed_threshold(0.7, 0.7) ==
        doctest::Approx(0.8413447460685429).epsilon(1e-9));
  CHECK(models::exact_smoothed_threshold(-2.0, 1.0) ==
        doctest::Approx(0.022750131948179207).epsilon(1e-9));
  CHECK_THROWS_AS(models::exact_smoothed_threshold(0.0, 0.0),
                  std::domain_error);
}

TEST_CASE("threshold model scores") {
  models::ThresholdModel model;
  double out[2];
  const double pos[1] = {0.3};
  model.scores({pos, 1}, {out, 2});
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.0);
  const double zero[1] = {0.0};
  model.scores({zero, 1}, {out, 2});
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 1.0);
}

TEST_CASE("worst-case model scores live on the mass-r simplex") {
  models::WorstCaseModel model(3, 2.0, 1.5);
  double out[2];
  const double x[3] = {0.2, -1.0, 4.0};
  model.scores({x, 3}, {out, 2});
  CHECK(out[0] + out[1] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(out[0] >= 0.0);
  CHECK(out[1] >= 0.0);
}

TEST_CASE("spectral norm on known matrices") {
  // column vector (3, 4): norm 5
  const std::vector<double> tall{3.0, 4.0};
  CHECK(models::spectral_norm(tall, 2, 1) == doctest::Approx(5.0).epsilon(1e-10));

  const std::vector<double> diag{3.0, 0.0, 0.0, -7.0};
  CHECK(models::spectral_norm(diag, 2, 2) == doctest::Approx(7.0).epsilon(1e-10));

  const std::vector<double> eye{1.0, 0.0, 0.0, 1.0};
  CHECK(models::spectral_norm(eye, 2, 2) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectral norm matches the closed form for random 2x2") {
  const rng::CounterRng draws(21, 0, 0);
  std::uint64_t idx = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> m(4);
    for (auto& v : m) v = -2.0 + 4.0 * draws.uniform(idx++);
    // eigenvalues of A^T A via trace/determinant
    const double a = m[0] * m[0] + m[2] * m[2];
    const double b = m[0] * m[1] + m[2] * m[3];
    const double d = m[1] * m[1] + m[3] * m[3];
    const double mean = 0.5 * (a + d);
    const double disc = std::sqrt(std::max(mean * mean - (a * d - b * b), 0.0));
    const double expected = std::sqrt(mean + disc);
    CHECK(models::spectral_norm(m, 2, 2) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("linear model evaluates W x + b and stores its constant") {
  const std::vector<double> w{1.0, 0.0, 0.0, 2.0, 1.0, 1.0};
  const std::vector<double> b{0.1, -0.2, 0.0};
  models::LinearModel model(3, 2, w, b);
  CHECK(model.lipschitz() == doctest::Approx(
      models::spectral_norm(w, 3, 2)).epsilon(1e-12));
  double out[3];
  const double x[2] = {2.0, -1.0};
  model.scores({x, 2}, {out, 3});
  CHECK(out[0] == doctest::Approx(2.1).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(-2.2).epsilon(1e-15));
  CHECK(out[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("stein gradient estimate: smoothed threshold at the origin") {
  const rng::CounterRng noise(1234, 0, 9);
  models::ThresholdModel model;
  const double x[1] = {0.0};
  const auto est = models::numeric_smoothed_gradient_norm(
      [&](std::span<const double> p) {
        double out[2];
        model.scores(p, {out, 2});
        return out[0];
      },
      1, {x, 1}, 1.0, 200000, 0.02, noise);
  // d/dx Phi(x / sigma) at 0 is phi(0) = 0.39894
  CHECK(std::abs(est.stein - 0.3989422804014327) < 0.01);
  CHECK(std::abs(est.finite_difference - 0.3989422804014327) < 0.02);
}

TEST_CASE("stein gradient estimate: constant classifier") {
  const rng::CounterRng noise(77, 0, 9);
  const double x[1] = {0.4};
  const auto est = models::numeric_smoothed_gradient_norm(
      [](std::span<const double>) { return 0.8; }, 1, {x, 1}, 0.5, 100000,
      0.01, noise);
  CHECK(std::abs(est.stein) < 0.02);
  CHECK(est.finite_difference == 0.0);
}

TEST_CASE("stein gradient estimate: saturated sign attains the erf value") {
  const rng::CounterRng noise(4242, 0, 9);
  const double x[1] = {0.0};
  const auto est = models::numeric_smoothed_gradient_norm(
      [](std::span<const double> p) {
        return models::worst_case_hbar(p, 1.0, 1.0);
      },
      1, {x, 1}, 0.5, 1000000, 0.01, noise);
  // erf(1 / (2^{3/2} * 0.5)) = erf(1/sqrt(2))
  CHECK(std::abs(est.stein - 0.6826894921370859) / 0.6826894921370859 <= 0.02);
}

TEST_CASE("gradient estimator rejects bad arguments") {
  const rng::CounterRng noise(1, 0, 9);
  const double x[1] = {0.0};
  const auto fn = [](std::span<const double>) { return 0.0; };
  CHECK_THROWS_AS(models::numeric_smoothed_gradient_norm(fn, 1, {x, 1}, 0.0,
                                                         100000, 0.01, noise),
                  std::domain_error);
  CHECK_THROWS_AS(models::numeric_smoothed_gradient_norm(fn, 1, {x, 1}, 1.0,
                                                         1000, 0.01, noise),
                  std::domain_error);
}
