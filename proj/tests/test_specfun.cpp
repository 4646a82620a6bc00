#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lvmrs/specfun.hpp"
#include "oracle_helpers.hpp"

using namespace lvmrs;

TEST_CASE("cdf at the median and against the series oracle") {
  CHECK(specfun::gaussian_cdf(0.0) == 0.5);
  // Frozen from the series/continued-fraction oracle.
  CHECK(std::abs(specfun::gaussian_cdf(1.2815515655) - 0.9) <= 1e-9);
  CHECK(std::abs(specfun::gaussian_cdf(-1.6448536270) - 0.05) <= 1e-9);
  for (double z : {-3.0, -1.7, -0.4, 0.0, 0.3, 1.1, 2.6}) {
    CHECK(specfun::gaussian_cdf(z) ==
          doctest::Approx(oracle::gaussian_cdf(z)).epsilon(1e-13));
  }
}

TEST_CASE("cdf symmetry and monotonicity") {
  double prev = -1.0;
  for (double z = -6.0; z <= 6.0; z += 0.25) {
    const double p = specfun::gaussian_cdf(z);
    CHECK(p >= prev);
    prev = p;
    CHECK(specfun::gaussian_cdf(-z) == doctest::Approx(1.0 - p).epsilon(1e-12));
  }
}

TEST_CASE("quantile hits the reference points") {
  CHECK(specfun::gaussian_quantile(0.5) == 0.0);
  CHECK(specfun::gaussian_quantile(0.9) ==
        doctest::Approx(1.2815515655446004).epsilon(1e-9));
  CHECK(specfun::gaussian_quantile(0.05) ==
        doctest::Approx(-1.6448536269514727).epsilon(1e-9));
  CHECK(specfun::gaussian_quantile(0.99) ==
        doctest::Approx(2.3263478740408411).epsilon(1e-10));
}

TEST_CASE("quantile round trip within 1e-12") {
  std::vector<double> grid;
  for (double p = 1e-9; p < 1.0; p *= 3.7) grid.push_back(p);
  for (double p = 0.02; p < 0.99; p += 0.008) grid.push_back(p);
  for (double p : grid) {
    const double z = specfun::gaussian_quantile(p);
    CHECK(std::abs(specfun::gaussian_cdf(z) - p) <= 1e-12);
    const double hi = specfun::gaussian_quantile(1.0 - p);
    CHECK(std::abs(specfun::gaussian_cdf(hi) - (1.0 - p)) <= 1e-12);
  }
}

TEST_CASE("quantile symmetry within 1e-10") {
  // Restricted to |z| <= ~4.8: past that, the double 1 - p carries less
  // information about the tail mass than the 1e-10 budget requires.
  std::vector<double> grid;
  for (double p = 1e-6; p < 0.5; p *= 2.9) grid.push_back(p);
  for (double p = 0.03; p < 0.5; p += 0.01) grid.push_back(p);
  for (double p : grid) {
    CHECK(std::abs(specfun::gaussian_quantile(p) +
                   specfun::gaussian_quantile(1.0 - p)) <= 1e-10);
  }
}

TEST_CASE("quantile is strictly increasing") {
  double prev = -std::numeric_limits<double>::infinity();
  for (double p = 1e-6; p < 1.0; p += 0.01) {
    const double z = specfun::gaussian_quantile(p);
    CHECK(z > prev);
    prev = z;
  }
}

TEST_CASE("quantile error handling") {
  CHECK_THROWS_AS(specfun::gaussian_quantile(0.0), specfun::InfiniteQuantile);
  CHECK_THROWS_AS(specfun::gaussian_quantile(1.0), specfun::InfiniteQuantile);
  CHECK_THROWS_AS(specfun::gaussian_quantile(-0.1), std::domain_error);
  CHECK_THROWS_AS(specfun::gaussian_quantile(1.1), std::domain_error);
  CHECK_THROWS_AS(specfun::gaussian_cdf(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(
      specfun::gaussian_cdf(std::numeric_limits<double>::infinity()),
      std::domain_error);
  CHECK_THROWS_AS(specfun::erf(std::nan("")), std::domain_error);
}

TEST_CASE("erf basics and oracle points") {
  CHECK(specfun::erf(0.0) == 0.0);
  // erf(sqrt(pi)/2) rounds to 0.790 at three significant figures.
  const double at_sqrt_pi_half = specfun::erf(std::sqrt(M_PI) / 2.0);
  CHECK(std::abs(at_sqrt_pi_half - 0.79) <= 5e-4);
  CHECK(at_sqrt_pi_half ==
        doctest::Approx(0.78990859455606272).epsilon(1e-12));
  CHECK(std::abs(specfun::erf(0.5303) - 0.5466) <= 5e-4);
  CHECK(specfun::erf(0.5303) ==
        doctest::Approx(0.5467196693226327).epsilon(1e-12));
  for (double x : {-2.5, -1.0, -0.3, 0.2, 0.9, 1.8, 3.1}) {
    CHECK(specfun::erf(x) ==
          doctest::Approx(static_cast<double>(oracle::erf_series(x)))
              .epsilon(1e-13));
  }
}

TEST_CASE("erf is odd, bounded, monotone") {
  double prev = -1.0;
  for (double x = -5.0; x <= 5.0; x += 0.2) {
    const double v = specfun::erf(x);
    CHECK(std::abs(v) < 1.0);
    CHECK(v >= prev);
    prev = v;
    CHECK(specfun::erf(-x) == doctest::Approx(-v).epsilon(1e-14));
  }
}
