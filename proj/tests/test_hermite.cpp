#include "mil/hermite.hpp"
#include "mil/quadrature.hpp"
#include "mil/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace mil;

TEST_SUITE("hermite") {
  TEST_CASE("recurrence agrees with the explicit sum") {
    for (int l = 0; l <= 12; ++l)
      for (double z : {-3.1, -1.0, -0.2, 0.0, 0.7, 2.5})
        CHECK(hermite_eval(l, z) == doctest::Approx(oracle::hermite_explicit(l, z)).epsilon(1e-12));
  }

  TEST_CASE("frozen hermite values") {
    CHECK(hermite_eval(0, 3.7) == 1.0);
    CHECK(std::abs(hermite_eval(2, 1.0)) < 1e-15);
    // explicit sum: He_4(0) = 3
    CHECK(oracle::hermite_explicit(4, 0.0) == doctest::Approx(0.6123724356957945).epsilon(1e-14));
    CHECK(hermite_eval(4, 0.0) == doctest::Approx(0.6123724356957945).epsilon(1e-14));
  }

  TEST_CASE("hermite_all fills every degree") {
    std::vector<double> out(9);
    hermite_all(8, 1.3, out);
    for (int l = 0; l <= 8; ++l) CHECK(out[static_cast<std::size_t>(l)] == doctest::Approx(hermite_eval(l, 1.3)));
  }

  TEST_CASE("parity") {
    for (int l = 0; l <= 15; ++l)
      for (double z : {0.3, 1.7, 4.2}) {
        const double sign = (l % 2 == 0) ? 1.0 : -1.0;
        CHECK(hermite_eval(l, -z) == doctest::Approx(sign * hermite_eval(l, z)).epsilon(1e-13));
      }
  }

  TEST_CASE("orthonormality under the Gaussian") {
    const QuadratureRule q = gauss_hermite_normal(20);
    for (int k = 0; k <= 8; ++k)
      for (int j = 0; j <= 8; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.nodes.size(); ++i)
          s += q.weights[i] * hermite_eval(k, q.nodes[i]) * hermite_eval(j, q.nodes[i]);
        CHECK(std::abs(s - (k == j ? 1.0 : 0.0)) < 1e-10);
      }
  }

  TEST_CASE("correlated orthogonality by 2-D quadrature") {
    const QuadratureRule q = gauss_hermite_normal(30);
    for (double rho : {-0.9, -0.3, 0.0, 0.4, 1.0})
      for (int k = 0; k <= 6; ++k)
        for (int j = 0; j <= 6; ++j) {
          double s = 0.0;
          for (std::size_t a = 0; a < q.nodes.size(); ++a)
            for (std::size_t b = 0; b < q.nodes.size(); ++b) {
              const double z = q.nodes[a];
              const double zp = rho * z + std::sqrt(1.0 - rho * rho) * q.nodes[b];
              s += q.weights[a] * q.weights[b] * hermite_eval(k, z) * hermite_eval(j, zp);
            }
          const double expected = (k == j) ? std::pow(rho, k) : 0.0;
          CHECK(std::abs(s - expected) < 1e-8);
        }
  }

  TEST_CASE("correlated orthogonality by Monte Carlo") {
    for (double rho : {-0.9, 0.4}) {
      StreamRng rng(11, StreamTag::monte_carlo, static_cast<std::uint64_t>(rho < 0 ? 1 : 2));
      for (auto [k, j] : {std::pair{1, 1}, std::pair{2, 2}, std::pair{2, 4}, std::pair{3, 1}}) {
        const auto r = oracle::monte_carlo(200000, [&] {
          const double z = rng.normal();
          const double zp = rho * z + std::sqrt(1.0 - rho * rho) * rng.normal();
          return hermite_eval(k, z) * hermite_eval(j, zp);
        });
        const double expected = (k == j) ? std::pow(rho, k) : 0.0;
        CHECK(std::abs(r.mean - expected) <= 3.0 * r.se);
      }
    }
  }

  TEST_CASE("quadrature rules integrate their exactness range") {
    for (int n : {5, 22, 60}) {
      const QuadratureRule q = gauss_hermite_normal(n);
      double w = 0.0;
      for (double x : q.weights) w += x;
      CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
      // E z^{2k} = (2k-1)!!
      for (int k = 1; 2 * k <= std::min(2 * n - 1, 16); ++k) {
        double s = 0.0, dfact = 1.0;
        for (int j = 1; j < 2 * k; j += 2) dfact *= j;
        for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], 2 * k);
        CHECK(s == doctest::Approx(dfact).epsilon(1e-12));
      }
    }
    const QuadratureRule lag = gauss_laguerre(20);
    for (int k = 0; k <= 10; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < lag.nodes.size(); ++i) s += lag.weights[i] * std::pow(lag.nodes[i], k);
      CHECK(s == doctest::Approx(oracle::factorial(k)).epsilon(1e-12));
    }
  }

  TEST_CASE("high-order pairs keep exact coefficients") {
    for (int L = 2; L <= 16; ++L) {
      const LinkSpec link = LinkSpec::hermite_pair(L);
      for (int l = 0; l <= 32; ++l) {
        const double expected = (l == 2 || l == 2 * L) ? 1.0 : 0.0;
        CHECK(std::abs(link.coeff(l) - expected) < 1e-12);
      }
    }
  }

  TEST_CASE("link values") {
    const LinkSpec pair2 = LinkSpec::hermite_pair(2);
    CHECK(pair2.eval(1.0) == doctest::Approx(-2.0 / std::sqrt(24.0)).epsilon(1e-14));
    CHECK(link_eval(pair2, 1.0) == doctest::Approx(-0.408248290463863).epsilon(1e-12));
    const LinkSpec ab = LinkSpec::abs_value();
    CHECK(ab.eval(-2.0) == 2.0);
    CHECK(ab.deriv(-2.0) == -1.0);
    CHECK(ab.deriv(0.0) == 0.0);
    CHECK(LinkSpec::h2_only().eval(0.0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
  }

  TEST_CASE("derivative matches central differences") {
    for (const LinkSpec& link : {LinkSpec::hermite_pair(2), LinkSpec::hermite_pair(3), LinkSpec::h2_only()})
      for (double z : {-1.7, -0.4, 0.9, 2.2}) {
        const double h = 1e-5;
        const double fd = (link.eval(z + h) - link.eval(z - h)) / (2 * h);
        CHECK(link.deriv(z) == doctest::Approx(fd).epsilon(1e-7));
        double v = 0.0, s = 0.0;
        link.eval_with_deriv(z, v, s);
        CHECK(v == doctest::Approx(link.eval(z)).epsilon(1e-14));
        CHECK(s == doctest::Approx(link.deriv(z)).epsilon(1e-14));
      }
  }

  TEST_CASE("coefficients of the hermite pair") {
    const auto c = hermite_coeffs(LinkSpec::hermite_pair(3), 12);
    for (int l = 0; l <= 12; ++l) {
      const double expected = (l == 2 || l == 6) ? 1.0 : 0.0;
      CHECK(std::abs(c[static_cast<std::size_t>(l)] - expected) < 1e-12);
    }
  }

  TEST_CASE("abs coefficients against a Simpson oracle") {
    const auto c = hermite_coeffs(LinkSpec::abs_value(), 8);
    const double h2 = oracle::gaussian_simpson([](double z) { return std::abs(z) * (z * z - 1.0) / std::sqrt(2.0); });
    CHECK(std::abs(h2 - 1.0 / std::sqrt(M_PI)) < 1e-9);
    CHECK(std::abs(c[2] - h2) < 1e-6);
    CHECK(std::abs(c[2] - 0.5641895835477563) < 1e-12);
    CHECK(std::abs(c[0] - std::sqrt(2.0 / M_PI)) < 1e-12);
    for (int l = 1; l <= 7; l += 2) CHECK(c[static_cast<std::size_t>(l)] == 0.0);
    for (int l = 4; l <= 8; l += 2) {
      const double o = oracle::gaussian_simpson([l](double z) { return std::abs(z) * oracle::hermite_explicit(l, z); });
      CHECK(std::abs(c[static_cast<std::size_t>(l)] - o) < 1e-8);
    }
  }

  TEST_CASE("abs coefficients decay") {
    const auto& c = LinkSpec::abs_value().coeffs();
    for (int l = 4; l <= 32; l += 2) CHECK(std::abs(c[static_cast<std::size_t>(l)]) < std::abs(c[static_cast<std::size_t>(l - 2)]));
  }

  TEST_CASE("coefficient cap is enforced") {
    CHECK_THROWS_AS(hermite_coeffs(LinkSpec::abs_value(), 33), std::invalid_argument);
    CHECK_NOTHROW(hermite_coeffs(LinkSpec::abs_value(), 32));
  }

  TEST_CASE("correlated moment values") {
    const LinkSpec pair2 = LinkSpec::hermite_pair(2);
    CHECK(correlated_moment(pair2, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(correlated_moment(LinkSpec::hermite_pair(4), 0.0)) < 1e-14);
    CHECK(correlated_moment(pair2, 0.5) == doctest::Approx(0.3125).epsilon(1e-12));
    CHECK(correlated_moment(LinkSpec::abs_value(), 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(correlated_moment(pair2, 1.0001), std::invalid_argument);
    CHECK_THROWS_AS(correlated_moment(pair2, -1.5), std::invalid_argument);
  }

  TEST_CASE("correlated moment derivative") {
    for (const LinkSpec& link : {LinkSpec::hermite_pair(2), LinkSpec::abs_value()})
      for (double rho : {-0.6, 0.1, 0.8}) {
        const double h = 1e-6;
        const double fd = (correlated_moment(link, rho + h) - correlated_moment(link, rho - h)) / (2 * h);
        CHECK(correlated_moment_deriv(link, rho) == doctest::Approx(fd).epsilon(1e-7));
      }
  }

  TEST_CASE("correlated moment matches Monte Carlo for every link kind") {
    std::uint64_t stream = 0;
    for (const LinkSpec& link : {LinkSpec::hermite_pair(2), LinkSpec::h2_only(), LinkSpec::abs_value()})
      for (double rho : {-0.5, 0.7}) {
        StreamRng rng(5, StreamTag::monte_carlo, stream++);
        const auto r = oracle::monte_carlo(1000000, [&] {
          const double z = rng.normal();
          const double zp = rho * z + std::sqrt(1.0 - rho * rho) * rng.normal();
          return link.eval(z) * link.eval(zp);
        });
        CHECK(std::abs(r.mean - correlated_moment(link, rho)) <= 3.0 * r.se);
      }
  }

  TEST_CASE("config names") {
    CHECK(LinkSpec::from_name("h2_h2L", 3) == LinkSpec::hermite_pair(3));
    CHECK(LinkSpec::from_name("h2_only").kind() == LinkKind::h2_only);
    CHECK(LinkSpec::from_name("abs").kind() == LinkKind::abs_value);
    CHECK(LinkSpec::hermite_pair(3).name() == "h2_h2L");
    CHECK_THROWS_AS(LinkSpec::from_name("relu"), std::invalid_argument);
    CHECK_THROWS_AS(LinkSpec::hermite_pair(1), std::invalid_argument);
  }
}
