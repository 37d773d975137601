#include "mil/init_stats.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace mil;

TEST_SUITE("init_stats") {
  TEST_CASE("largest coordinate threshold and frequency") {
    const FrequencyReport k1 = mc_max_coordinate(256, 1.0, 10000, 1);
    CHECK(k1.threshold == doctest::Approx(0.8326).epsilon(1e-4));
    CHECK(k1.threshold == doctest::Approx(4.0 * std::sqrt(2.0 * std::log(256.0)) / 16.0));
    CHECK(k1.bound == doctest::Approx(4.0 / 256.0));
    CHECK(k1.frequency <= k1.bound + 2.0 * k1.se);
    CHECK(k1.pass);
    CHECK(k1.events == 0);

    const FrequencyReport k2 = mc_max_coordinate(256, 2.0, 10000, 2);
    CHECK(k2.bound == doctest::Approx(4.0 / (256.0 * 256.0)));
    CHECK(k2.pass);
    CHECK_THROWS_AS(mc_max_coordinate(4, 1.0, 10, 1), std::invalid_argument);
  }

  TEST_CASE("a single direction always has a gap") {
    const FrequencyReport r = mc_gap_existence(50, 1, 1, 500, 3);
    CHECK(r.frequency == 1.0);
    CHECK(r.events == 500);
  }

  TEST_CASE("gap frequency grows with width on nested neuron sets") {
    const std::vector<int> widths = {4, 8, 16, 32, 64, 128};
    const std::vector<double> f = mc_gap_ladder(4, widths, 2000, 4);
    REQUIRE(f.size() == widths.size());
    for (std::size_t k = 1; k < f.size(); ++k) CHECK(f[k] >= f[k - 1]);
    CHECK(f.back() > 0.99);
    // The ladder entry at width m is the plain estimate for the first m neurons.
    CHECK(mc_gap_existence(100, 4, 16, 2000, 4).frequency == f[2]);
  }

  TEST_CASE("calibrated width meets the gap probability") {
    const int P = 3;
    const double delta = 0.2;
    // The literal width is far beyond desk scale.
    const double literal = gap_width_formula(P, 1.0, delta);
    CHECK(literal == doctest::Approx(400.0 * std::pow(3.0, 8.0) * std::sqrt(std::log(3.0)) * std::log(5.0)));
    CHECK(literal > 1e6);

    const std::vector<int> ladder = {3, 4, 6, 8, 12, 16, 24, 32};
    const int m = calibrated_gap_width(P, delta, ladder, 2000, 5);
    REQUIRE(m > 0);
    const FrequencyReport r = mc_gap_existence(64, P, m, 4000, 6, delta);
    CHECK(r.bound == doctest::Approx(0.8));
    CHECK(r.frequency >= 0.8 - 2.0 * r.se);
    CHECK(r.pass);
    CHECK(calibrated_gap_width(P, 1e-9, {3, 4}, 200, 5) == -1);
  }

  TEST_CASE("norm ratio interval") {
    const NormRatioReport r = mc_norm_ratio(1024, 64, 10000, 7);
    CHECK(r.inside.frequency >= 0.99);
    CHECK(std::abs(r.mean_sq - 64.0 / 1024.0) <= 3.0 * r.mean_sq_se);

    const NormRatioReport full = mc_norm_ratio(16, 16, 200, 8);
    CHECK(full.inside.frequency == 1.0);
    CHECK(full.mean_sq == doctest::Approx(1.0));
    CHECK_THROWS_AS(mc_norm_ratio(16, 4, 10, 1), std::invalid_argument);
  }

  TEST_CASE("sphere coordinates have the right low moments") {
    for (int d : {3, 20, 200}) {
      const SphereMoments s = sphere_moments(d, 20000, 9);
      CHECK(s.m2_exact == doctest::Approx(1.0 / d));
      CHECK(s.m4_exact == doctest::Approx(3.0 / (d * (d + 2.0))));
      CHECK(std::abs(s.m2 - s.m2_exact) <= 3.0 * s.m2_se);
      CHECK(std::abs(s.m4 - s.m4_exact) <= 3.0 * s.m4_se);
    }
  }

  TEST_CASE("same seed, same report") {
    const FrequencyReport a = mc_gap_existence(40, 5, 20, 300, 10);
    const FrequencyReport b = mc_gap_existence(40, 5, 20, 300, 10);
    CHECK(a.events == b.events);
    CHECK(mc_gap_existence(40, 5, 20, 300, 11).events != a.events);
  }
}
