#include <doctest.h>

#include <cmath>
#include <random>

#include "npw/refractivity.hpp"
#include "test_oracles.hpp"

using namespace npw;
using npw::testing::rel_err;

TEST_CASE("refractivity_to_index") {
  SUBCASE("vacuum identity") {
    auto v = refractivity_to_index({0.0, 0.0});
    CHECK(v.n == 1.0);
    CHECK(v.kappa == 0.0);
  }
  SUBCASE("heavy-rain upper end: 0.224 N-units of loss") {
    auto v = refractivity_to_index({320.0, 0.224});
    CHECK(v.n == doctest::Approx(1.000320).epsilon(1e-12));
    CHECK(v.kappa == doctest::Approx(2.24e-7).epsilon(1e-12));
  }
  SUBCASE("linear scaling by 1e-6") {
    auto v = refractivity_to_index({100.0, 0.01});
    CHECK(v.n == doctest::Approx(1.0001).epsilon(1e-12));
    CHECK(v.kappa == doctest::Approx(1e-8).epsilon(1e-12));
  }
  SUBCASE("negative loss part rejected") {
    CHECK_THROWS_AS(refractivity_to_index({100.0, -0.01}), std::invalid_argument);
  }
}

TEST_CASE("index_to_refractivity and round trip") {
  auto r = index_to_refractivity(ComplexRefractivity(1.0, 0.0));
  CHECK(r.N_re == 0.0);
  CHECK(r.N_im == 0.0);

  auto r2 = index_to_refractivity(ComplexRefractivity(1.0002, 1e-7));
  CHECK(r2.N_re == doctest::Approx(200.0).epsilon(1e-12));
  CHECK(r2.N_im == doctest::Approx(0.1).epsilon(1e-12));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> un(1.0, 1.001);
  std::uniform_real_distribution<double> uk(0.0, 1e-5);
  for (int i = 0; i < 1000; ++i) {
    ComplexRefractivity v(un(rng), uk(rng));
    ComplexRefractivity back = refractivity_to_index(index_to_refractivity(v));
    CHECK(rel_err(back.n, v.n) < 1e-12);
    if (v.kappa > 0.0) CHECK(rel_err(back.kappa, v.kappa) < 1e-12);
  }
}

TEST_CASE("attenuation_to_kappa") {
  SUBCASE("zero attenuation") { CHECK(attenuation_to_kappa(0.0, 18e9) == 0.0); }

  SUBCASE("inverse formula at the heavy-rain extinction scale") {
    // Independent evaluation of gamma = 8.686 * k0 * kappa * 1000 for
    // kappa = 2.24e-7 at 18 GHz; the result sits at heavy-rain magnitude
    // (fraction of a dB per km).
    double k0 = 2.0 * 3.141592653589793238 * 18e9 / 299792458.0;
    double gamma = 8.685889638065035 * k0 * 2.24e-7 * 1000.0;
    CHECK(gamma > 0.1);
    CHECK(gamma < 10.0);
    CHECK(rel_err(kappa_to_attenuation(2.24e-7, 18e9), gamma) < 1e-12);
    CHECK(rel_err(attenuation_to_kappa(gamma, 18e9), 2.24e-7) < 1e-12);
  }

  SUBCASE("kappa is inversely proportional to frequency") {
    double k1 = attenuation_to_kappa(1.0, 18e9);
    double k2 = attenuation_to_kappa(1.0, 36e9);
    CHECK(rel_err(k1, 2.0 * k2) < 1e-12);
  }

  SUBCASE("round trip") {
    for (double gamma : {1e-3, 0.1, 1.0, 25.0}) {
      double k = attenuation_to_kappa(gamma, 18e9);
      CHECK(rel_err(kappa_to_attenuation(k, 18e9), gamma) < 1e-12);
    }
  }

  SUBCASE("non-finite and domain errors") {
    CHECK_THROWS_AS(attenuation_to_kappa(std::nan(""), 18e9), std::invalid_argument);
    CHECK_THROWS_AS(attenuation_to_kappa(-1.0, 18e9), std::invalid_argument);
    CHECK_THROWS_AS(attenuation_to_kappa(1.0, 0.0), std::invalid_argument);
  }
}

TEST_CASE("atmospheric index validation") {
  CHECK_THROWS_AS(make_atmospheric_index(0.9999, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_atmospheric_index(1.002, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_atmospheric_index(1.0001, -1e-9), std::invalid_argument);
  CHECK_THROWS_AS(make_atmospheric_index(1.0001, 2e-5), std::invalid_argument);
  CHECK_NOTHROW(make_atmospheric_index(1.0005, 1e-7));
}
