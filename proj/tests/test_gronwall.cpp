#include "mil/gronwall.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace mil;

namespace {

GronwallSpec linear_at_boundary() {
  GronwallSpec s;
  s.kind = GronwallKind::linear;
  s.alpha = 0.02;
  s.x0 = 1.0;
  s.T = 100;
  s.delta = 0.1;
  s.xi_model = XiModel::uniform;
  s.Xi = s.x0 / (4.0 * s.T);
  s.z_model = ZModel::gaussian;
  s.sigma_z = std::sqrt(s.delta * s.alpha * s.x0 * s.x0 / 16.0);
  return s;
}

GronwallSpec poly_at_boundary() {
  GronwallSpec s;
  s.kind = GronwallKind::polynomial;
  s.alpha = 0.05;
  s.p = 2.0;
  s.x0 = 0.1;
  s.T = 200;
  s.delta = 0.1;
  s.xi_model = XiModel::adversarial;
  s.Xi = s.x0 / (4.0 * s.T);
  s.z_model = ZModel::gaussian;
  s.sigma_z = std::sqrt(s.x0 * s.x0 * s.delta / (16.0 * s.T));
  return s;
}

}  // namespace

TEST_SUITE("gronwall") {
  TEST_CASE("condition examples") {
    GronwallSpec s = linear_at_boundary();
    s.Xi = s.x0 / (8.0 * s.T);
    s.sigma_z = std::sqrt(s.delta * s.alpha * s.x0 * s.x0 / 32.0);
    ConditionReport c = check_conditions(s);
    CHECK(c.satisfied);
    CHECK(c.xi_slack == doctest::Approx(s.x0 / (8.0 * s.T)));
    CHECK(c.sigma2_slack == doctest::Approx(s.delta * s.alpha / 32.0));

    s.Xi = s.x0 / s.T;
    CHECK(!check_conditions(s).satisfied);
    CHECK(check_conditions(s).xi_slack < 0.0);

    GronwallSpec q = poly_at_boundary();
    q.sigma_z = std::sqrt(q.x0 * q.x0 * q.delta / (32.0 * q.T));
    CHECK(check_conditions(q).satisfied);

    GronwallSpec z;
    z.kind = GronwallKind::zero_drift;
    z.T = 16;
    z.Xi = 0.01;
    z.sigma_z = 0.1;
    z.delta = 0.25;
    const ConditionReport zr = check_conditions(z);
    CHECK(zr.satisfied);
    CHECK(zr.radius == doctest::Approx(16 * 0.01 + std::sqrt(16 * 0.01 / 0.25)));
  }

  TEST_CASE("recurrence validation and names") {
    GronwallSpec s;
    s.x0 = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = GronwallSpec{};
    s.alpha = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.kind = GronwallKind::zero_drift;
    CHECK_NOTHROW(s.validate());
    s.kind = GronwallKind::polynomial;
    s.alpha = 0.1;
    s.p = 1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    for (GronwallKind k : {GronwallKind::linear, GronwallKind::zero_drift, GronwallKind::polynomial})
      CHECK(gronwall_kind_from_name(gronwall_kind_name(k)) == k);
    for (XiModel k : {XiModel::none, XiModel::uniform, XiModel::adversarial})
      CHECK(xi_model_from_name(xi_model_name(k)) == k);
    for (ZModel k : {ZModel::none, ZModel::gaussian, ZModel::rademacher, ZModel::weibull})
      CHECK(z_model_from_name(z_model_name(k)) == k);
    CHECK_THROWS_AS(z_model_from_name("cauchy"), std::invalid_argument);
  }

  TEST_CASE("noiseless linear recurrence is the geometric sequence") {
    GronwallSpec s = linear_at_boundary();
    s.xi_model = XiModel::none;
    s.z_model = ZModel::none;
    s.x0 = 0.3;
    const GronwallPath path = simulate(s, 1);
    REQUIRE(path.x.size() == 101);
    for (std::size_t t = 0; t < path.x.size(); ++t) {
      const double exact = std::pow(1.0 + s.alpha, static_cast<double>(t)) * s.x0;
      CHECK(std::abs(path.x[t] - exact) <= 1e-12 * exact);
    }
    CHECK(path.exit_step == -1);
  }

  TEST_CASE("noiseless polynomial recurrence stays above the lower envelope") {
    GronwallSpec s = poly_at_boundary();
    s.xi_model = XiModel::none;
    s.z_model = ZModel::none;
    s.T = 60;
    const GronwallPath path = simulate(s, 1);
    double x = s.x0;
    for (std::size_t t = 0; t < path.x.size(); ++t) {
      CHECK(std::abs(path.x[t] - x) <= 1e-12 * x);
      CHECK(path.x[t] >= path.lower[t]);
      x += s.alpha * x * x;
    }
    CHECK(path.exit_step == -1);
  }

  TEST_CASE("polynomial blow-up is flagged") {
    GronwallSpec s = poly_at_boundary();
    s.xi_model = XiModel::none;
    s.z_model = ZModel::none;
    s.alpha = 1.0;
    s.x0 = 2.0;
    s.T = 30;
    const GronwallPath path = simulate(s, 1);
    CHECK(path.blew_up);
    CHECK(std::isinf(path.x.back()));
  }

  TEST_CASE("envelopes hold at the condition boundary") {
    const long trials = 2000;
    GronwallSpec lin = linear_at_boundary();
    const EnvelopeReport a = verify_envelope(lin, trials, 11);
    CHECK(a.condition_satisfied);
    CHECK(a.theoretical_floor == doctest::Approx(0.9));
    CHECK(a.pass);

    lin.state_coupled = true;
    lin.Xi *= std::pow(1.0 + lin.alpha, -static_cast<double>(lin.T));
    lin.sigma_z *= std::pow(1.0 + lin.alpha, -0.5 * static_cast<double>(lin.T));
    CHECK(verify_envelope(lin, trials, 12).pass);

    lin = linear_at_boundary();
    lin.delta_xi = 2e-4;
    const EnvelopeReport failing_xi = verify_envelope(lin, trials, 13);
    CHECK(failing_xi.theoretical_floor == doctest::Approx(0.88));
    CHECK(failing_xi.pass);

    GronwallSpec zero;
    zero.kind = GronwallKind::zero_drift;
    zero.T = 200;
    zero.x0 = 1.0;
    zero.xi_model = XiModel::uniform;
    zero.Xi = 1e-3;
    zero.z_model = ZModel::rademacher;
    zero.sigma_z = 0.01;
    zero.delta = 0.1;
    CHECK(verify_envelope(zero, trials, 14).pass);

    const EnvelopeReport poly = verify_envelope(poly_at_boundary(), trials, 15);
    CHECK(poly.condition_satisfied);
    CHECK(poly.pass);
  }

  TEST_CASE("a lower-envelope exit is never partially credited") {
    GronwallSpec s = poly_at_boundary();
    s.sigma_z *= 30.0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
      const GronwallPath path = simulate(s, 21, trial);
      long first = -1;
      for (std::size_t t = 0; t < path.x.size(); ++t) {
        if (!(path.x[t] >= path.lower[t])) {
          first = static_cast<long>(t);
          break;
        }
      }
      CHECK(path.exit_step == first);
    }
  }

  TEST_CASE("amplified noise breaks the envelope") {
    GronwallSpec s = linear_at_boundary();
    s.sigma_z *= 100.0;
    const EnvelopeReport r = verify_envelope(s, 2000, 16);
    CHECK(!r.condition_satisfied);
    CHECK(r.stay_fraction < r.theoretical_floor);
    CHECK(!r.pass);
  }

  TEST_CASE("stay fraction does not increase along a noise ladder") {
    const GronwallSpec base = linear_at_boundary();
    double prev = 1.0, prev_se = 0.0;
    for (double scale : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      GronwallSpec s = base;
      s.sigma_z *= scale;
      const EnvelopeReport r = verify_envelope(s, 2000, 17);
      CHECK(r.stay_fraction <= prev + 2.0 * std::hypot(r.stay_se, prev_se));
      prev = r.stay_fraction;
      prev_se = r.stay_se;
    }
    CHECK(prev < 0.5);
  }

  TEST_CASE("polynomial hitting time") {
    CHECK(poly_hitting_time(0.9, 1e-3, 2.0) == 0);
    CHECK(poly_hitting_time(0.95, 1e-3, 3.0) == 0);
    for (double x0 : {0.05, 0.02, 0.01}) {
      for (double alpha : {1e-3, 1e-4}) {
        const double ratio = static_cast<double>(poly_hitting_time(x0 / 2, alpha, 2.0)) /
                             static_cast<double>(poly_hitting_time(x0, alpha, 2.0));
        CHECK(ratio >= 1.7);
        CHECK(ratio <= 2.3);
      }
    }
    for (int p : {2, 3}) {
      for (double x0 : {0.01, 0.02, 0.05, 0.2, 0.5}) {
        for (double alpha : {1e-2, 1e-3, 1e-4}) {
          const double budget = poly_hitting_constant(p) / (std::pow(x0, p - 1) * alpha);
          CHECK(static_cast<double>(poly_hitting_time(x0, alpha, p)) <= budget);
        }
      }
    }
    CHECK_THROWS_AS(poly_hitting_constant(4), std::invalid_argument);
    CHECK_THROWS_AS(poly_hitting_time(0.1, 0.0, 2.0), std::invalid_argument);
  }

  TEST_CASE("Freedman bound for bounded noise has a wide margin") {
    const TailParams tail{1.0, 1.0, 1.0};
    for (long T : {1L, 100L, 1000L}) {
      const FreedmanReport r = freedman_sum_check(tail, ZModel::rademacher, 1.0, 0.5, T, 0.05, 4000, 1);
      CHECK(r.pass);
      CHECK(r.quantile <= 0.5 * r.bound);
    }
  }

  TEST_CASE("Freedman bound for Weibull tails at the frozen constant") {
    // |Z| ~ Weibull(1/2) with unit scale has E Z^2 = Gamma(5) = 24 and P(|Z| >= s) = exp(-sqrt(s)).
    const TailParams tail{1.0, 1.0, 0.5};
    const double sigma = std::sqrt(24.0);
    for (long T : {1L, 3L, 10L, 100L}) {
      const FreedmanReport r = freedman_sum_check(tail, ZModel::weibull, sigma, 0.5, T, 0.05, 4000, 2);
      CHECK(r.pass);
    }
    // A single draw: the 95% quantile of |Z| is log(20)^2.
    const FreedmanReport one = freedman_sum_check(tail, ZModel::weibull, sigma, 0.5, 1, 0.05, 20000, 3);
    CHECK(one.quantile == doctest::Approx(std::pow(std::log(20.0), 2)).epsilon(0.05));
    CHECK(one.bound == doctest::Approx(kFreedmanConstant * freedman_bound(tail, sigma, 1, 0.05, 1.0)));
  }
}
