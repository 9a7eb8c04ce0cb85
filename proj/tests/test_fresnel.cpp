#include <doctest.h>

#include <random>

#include "sparseimg/bounds.hpp"
#include "sparseimg/fresnel.hpp"
#include "support/oracles.hpp"

using namespace sparseimg;

TEST_CASE("U(0,0) is 1 and U at a sinc zero vanishes") {
  CHECK(fresnel_u(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fresnel_u(2.0 * M_PI, 0.0) < 1e-12);
}

TEST_CASE("U(beta,0) equals |sinc(beta/2)|") {
  // |sinc(2)| frozen from sin(2)/2
  CHECK(fresnel_u(4.0, 0.0) == doctest::Approx(0.45464871341284085).epsilon(1e-12));
  for (double beta : {0.3, 1.0, 7.7, 25.0, 99.0})
    CHECK(fresnel_u(beta, 0.0) ==
          doctest::Approx(std::abs(sinc(beta / 2.0))).epsilon(1e-12));
}

TEST_CASE("quadrature matches the independent Simpson oracle") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> uni(-120.0, 120.0);
  for (int t = 0; t < 60; ++t) {
    const double beta = uni(rng), eta = uni(rng);
    const double ref = testsupport::fresnel_u_simpson(beta, eta);
    CHECK(fresnel_u(beta, eta) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("modulus symmetries and range") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uni(-80.0, 80.0);
  for (int t = 0; t < 40; ++t) {
    const double beta = uni(rng), eta = uni(rng);
    const double u = fresnel_u(beta, eta);
    CHECK(u >= 0.0);
    CHECK(u <= 1.0);
    CHECK(fresnel_u(-beta, eta) == doctest::Approx(u).epsilon(1e-12));
    CHECK(fresnel_u(beta, -eta) == doctest::Approx(u).epsilon(1e-12));
  }
}

TEST_CASE("complex integral symmetries") {
  const cdouble f = fresnel_integral(3.7, 11.2);
  CHECK(std::abs(fresnel_integral(-3.7, 11.2) - f) < 1e-13);
  CHECK(std::abs(fresnel_integral(3.7, -11.2) - std::conj(f)) < 1e-13);
}

TEST_CASE("U(5,40) respects the 2 sqrt(2)/sqrt(eta) bound") {
  const double u = fresnel_u(5.0, 40.0);
  CHECK(u <= 2.0 * std::sqrt(2.0) / std::sqrt(40.0));
  CHECK(u == doctest::Approx(testsupport::fresnel_u_simpson(5.0, 40.0)).epsilon(1e-10));
}

TEST_CASE("all three analytic bounds hold on a dense sweep") {
  // Acceptance runs the full 1e4-point suite; this is the fast version.
  for (int bi = 0; bi <= 40; ++bi)
    for (int ei = 0; ei <= 40; ++ei) {
      const double beta = 2.5 * bi, eta = 2.5 * ei;
      const double u = fresnel_u(beta, eta);
      if (eta == 0.0) {
        CHECK(u <= std::min(1.0, 2.0 / std::max(beta, 1e-300)) + 1e-9);
      } else {
        CHECK(u <= 2.0 * std::sqrt(2.0) / std::sqrt(eta) + 1e-9);
        if (beta > eta + 0.5) {
          const double alpha = 0.5 * (beta - eta);
          CHECK(u <= (M_PI + 1.0) / alpha + 1e-9);
        }
      }
    }
}

TEST_CASE("fresnel_eval reports panels and value") {
  const FresnelEval e = fresnel_eval(50.0, 50.0);
  CHECK(e.quadrature_panels >= 31);
  CHECK(e.value == doctest::Approx(fresnel_u(50.0, 50.0)));
}

TEST_CASE("fresnel_bounds applicability") {
  const FresnelBoundSet at_eta0 = fresnel_bounds(10.0, 0.0);
  REQUIRE(at_eta0.sinc_bound.has_value());
  CHECK(*at_eta0.sinc_bound == doctest::Approx(0.2));
  CHECK_FALSE(at_eta0.eta_bound.has_value());

  const FresnelBoundSet at_eta16 = fresnel_bounds(3.0, 16.0);
  REQUIRE(at_eta16.eta_bound.has_value());
  CHECK(*at_eta16.eta_bound == doctest::Approx(2.0 * std::sqrt(2.0) / 4.0));

  const FresnelBoundSet cone = fresnel_bounds(10.0, 2.0, 4.0);
  REQUIRE(cone.cone_bound.has_value());
  CHECK(*cone.cone_bound == doctest::Approx((M_PI + 1.0) / 4.0));

  CHECK_THROWS_AS(fresnel_bounds(5.0, 2.0, 4.0), ConfigError);  // 5 < 4 + 2
}
