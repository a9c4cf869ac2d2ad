#include <doctest.h>

#include <cmath>

#include "ratesvol/diagnose.hpp"
#include "ratesvol/error.hpp"
#include "ratesvol/rng.hpp"
#include "ratesvol/special.hpp"
#include "support.hpp"

using namespace ratesvol;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Deterministic AR(1) driven by a quasi-periodic forcing; the frozen reference values
// below were computed from the same recursion with statsmodels 0.14.
VectorXd forced_ar(int T, double phi) {
  VectorXd y(T);
  y(0) = 1.0;
  for (int t = 1; t < T; ++t) {
    const double e = std::sin(1.3 * t) + 0.5 * std::cos(std::fmod(0.7 * t * t, 6.283185307179586));
    y(t) = phi * y(t - 1) + e;
  }
  return y;
}

VectorXd alternating(int T) {
  VectorXd x(T);
  for (int t = 0; t < T; ++t) x(t) = t % 2 ? 1.0 : -1.0;
  return x;
}

}  // namespace

TEST_SUITE("diagnose") {
  TEST_CASE("two-point symmetric series") {
    const MomentSummary m = skew_kurt(alternating(100));
    CHECK(std::abs(m.skewness) < 1e-14);
    CHECK(m.kurtosis == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.std == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("gaussian moments") {
    testsupport::Gauss g(123);
    const MomentSummary m = skew_kurt(g.vec(1000000));
    CHECK(std::abs(m.skewness) < 0.01);
    CHECK(std::abs(m.kurtosis - 3.0) < 0.03);
  }

  TEST_CASE("moments are affine invariant") {
    testsupport::Gauss g(5);
    VectorXd x = g.vec(500);
    x = x.array().exp();
    const MomentSummary a = skew_kurt(x);
    const MomentSummary b = skew_kurt((3.7 * x.array() - 12.0).matrix());
    CHECK(std::abs(a.skewness - b.skewness) < 1e-10);
    CHECK(std::abs(a.kurtosis - b.kurtosis) < 1e-10);
    CHECK(a.kurtosis >= 1.0);
  }

  TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(skew_kurt(VectorXd::Constant(10, 2.0)), Error);
    CHECK_THROWS_AS(acf(VectorXd::Constant(50, 1.0), 5), Error);
    CHECK_THROWS_AS(ljung_box(VectorXd::Constant(50, 1.0), 10), Error);
    CHECK_THROWS_AS(qq_data(VectorXd::Constant(20, 1.0)), Error);
    CHECK_THROWS_AS(acf(VectorXd::LinSpaced(5, 0, 1), 5), Error);
    CHECK_THROWS_AS(adf_test(VectorXd::LinSpaced(20, 0, 1)), Error);
  }

  TEST_CASE("acf of alternating series") {
    const AcfResult r = acf(alternating(200), 3);
    CHECK(r.rho(0) == doctest::Approx(-199.0 / 200.0).epsilon(1e-12));
    CHECK(r.rho(1) == doctest::Approx(198.0 / 200.0).epsilon(1e-12));
    CHECK(r.band == doctest::Approx(1.96 / std::sqrt(200.0)));
  }

  TEST_CASE("acf of white noise stays inside the band") {
    testsupport::Gauss g(77);
    const AcfResult r = acf(g.vec(10000), 20);
    int inside = 0;
    for (int k = 0; k < 20; ++k) inside += std::abs(r.rho(k)) < 3.0 / 100.0;
    CHECK(inside >= 19);
  }

  TEST_CASE("ljung-box matches reference values") {
    const TestResult r = ljung_box(forced_ar(300, 0.3), 10);
    CHECK(r.statistic == doctest::Approx(887.4515358685151).epsilon(1e-10));
    CHECK(r.p_value < 1e-100);
    CHECK(r.lags_or_dof == 10);
    CHECK(r.reject_at_5pct);
  }

  TEST_CASE("ljung-box p-value decreases in Q") {
    double prev = special::chi_square_sf(0.0, 10);
    CHECK(prev == 1.0);
    for (double q = 0.5; q < 60; q += 0.5) {
      const double p = special::chi_square_sf(q, 10);
      CHECK(p < prev);
      prev = p;
    }
  }

  TEST_CASE("ljung-box detects strong autocorrelation") {
    Xoshiro256 rng(9);
    NormalSampler n;
    VectorXd x(500);
    double s = 0.0;
    for (int t = 0; t < 500; ++t) x(t) = s = 0.9 * s + n(rng);
    CHECK(ljung_box(x, 10).p_value < 1e-6);
  }

  TEST_CASE("adf matches reference values") {
    const AdfResult a = adf_test(forced_ar(200, 0.95));
    CHECK(a.used_lag == 14);
    CHECK(a.nobs == 185);
    CHECK(a.statistic == doctest::Approx(-2.231614529299586).epsilon(1e-8));
    CHECK(a.p_value == doctest::Approx(0.19497190150316646).epsilon(1e-8));

    const AdfResult b = adf_test(forced_ar(200, 1.0));
    CHECK(b.used_lag == 14);
    CHECK(b.statistic == doctest::Approx(-0.7085434154026397).epsilon(1e-8));
    CHECK(b.p_value == doctest::Approx(0.8445241723205441).epsilon(1e-8));

    AdfOptions fixed;
    fixed.max_lag = 4;
    fixed.autolag = false;
    const AdfResult c = adf_test(forced_ar(200, 0.95), fixed);
    CHECK(c.used_lag == 4);
    CHECK(c.nobs == 195);
    CHECK(c.statistic == doctest::Approx(-1.8303311097601431).epsilon(1e-8));
    CHECK(c.p_value == doctest::Approx(0.36551047384495805).epsilon(1e-8));
  }

  TEST_CASE("mackinnon p-values match reference values") {
    const double tau[] = {-4.0, -3.0, -2.5, -1.61, -1.0, 0.0, 1.5};
    const double ref[] = {0.0014105112530392603, 0.034894400275345266, 0.11547432475870761, 0.4779756525941893,
                          0.7532643012005655,    0.958532086060056,    0.99752427540539};
    for (int k = 0; k < 7; ++k) CHECK(mackinnon_p_value(tau[k]) == doctest::Approx(ref[k]).epsilon(1e-10));
  }

  TEST_CASE("adf rejects a geometric decay") {
    VectorXd y(200);
    y(0) = 100.0;
    for (int t = 1; t < 200; ++t) y(t) = 0.5 * y(t - 1);
    CHECK(adf_test(y).p_value < 0.01);
  }

  TEST_CASE("adf rarely rejects a random walk") {
    int kept = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      testsupport::Gauss g(1000 + seed);
      VectorXd y(400);
      double s = 0.0;
      for (int t = 0; t < 400; ++t) y(t) = s += g();
      kept += adf_test(y).p_value > 0.10;
    }
    CHECK(kept >= 85);
  }

  TEST_CASE("adf statistic is scale invariant") {
    const VectorXd y = forced_ar(150, 0.9);
    const AdfResult a = adf_test(y);
    const AdfResult b = adf_test((250.0 * y).eval());
    CHECK(a.used_lag == b.used_lag);
    CHECK(std::abs(a.statistic - b.statistic) < 1e-8);
  }

  TEST_CASE("test decisions follow the p-value") {
    for (double phi : {0.3, 0.9, 1.0}) {
      const AdfResult a = adf_test(forced_ar(120, phi));
      CHECK(a.reject_at_5pct == (a.p_value < 0.05));
      CHECK((a.p_value >= 0.0 && a.p_value <= 1.0));
    }
  }

  TEST_CASE("qq self-consistency") {
    const int n = 50;
    VectorXd q(n);
    for (int i = 0; i < n; ++i) q(i) = special::normal_quantile((i + 0.5) / n);
    const auto pts = qq_data(q, false);
    REQUIRE(pts.size() == 50);
    for (const auto& [x, y] : pts) CHECK(std::abs(x - y) < 1e-6);
  }

  TEST_CASE("qq of sorted integers") {
    const auto pts = qq_data(VectorXd::LinSpaced(10, 1, 10));
    REQUIRE(pts.size() == 10);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      CHECK(pts[i].first > pts[i - 1].first);
      CHECK(pts[i].second > pts[i - 1].second);
    }
  }

  TEST_CASE("qq of a heavy-tailed sample bends above the line") {
    InnovationSampler t3(InnovationLaw::student_t(3.0), 31);
    VectorXd x(5000);
    for (int i = 0; i < 5000; ++i) x(i) = t3();
    const auto pts = qq_data(x);
    int above = 0;
    for (std::size_t i = pts.size() - 10; i < pts.size(); ++i) above += pts[i].second > pts[i].first;
    CHECK(above >= 8);
  }

  TEST_CASE("table with unit volatility has identical rows") {
    const ArSvModel m = testsupport::reference_trivariate();
    testsupport::Gauss g(4);
    const MatrixXd z = g.mat(300, 3);
    const DiagnosticsTable t = diagnostics_table(m, z, VectorXd::Ones(300));
    for (int i = 0; i < 3; ++i) {
      CHECK(t.raw[static_cast<std::size_t>(i)].skewness == t.scaled[static_cast<std::size_t>(i)].skewness);
      CHECK(t.raw[static_cast<std::size_t>(i)].kurtosis == t.scaled[static_cast<std::size_t>(i)].kurtosis);
    }
    const std::string text = t.to_text({"Z1", "Z2", "Z3"});
    CHECK(text.find("Kurtosis of Z/V") != std::string::npos);
    CHECK_THROWS_AS(diagnostics_table(m, z, VectorXd::Ones(299)), Error);
  }

  TEST_CASE("volatility-scaled noise normalises after division") {
    const ArSvModel m = testsupport::scalar_model(0.0, 0.5, 1.0);
    testsupport::Gauss g(12);
    const int n = 100000;
    VectorXd v(n);
    MatrixXd z(n, 1);
    double lv = 0.34 / 0.12;
    for (int t = 0; t < n; ++t) {
      lv = 0.34 + 0.88 * lv + 0.3 * g();
      v(t) = std::exp(lv);
      z(t, 0) = v(t) * g();
    }
    const DiagnosticsTable t = diagnostics_table(m, z, v);
    CHECK(std::abs(t.scaled[0].kurtosis - 3.0) < 0.1);
    CHECK(t.raw[0].kurtosis > 3.5);
  }
}
