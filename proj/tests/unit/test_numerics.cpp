#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

#include "ratesvol/error.hpp"
#include "ratesvol/format.hpp"
#include "ratesvol/linalg.hpp"
#include "ratesvol/rng.hpp"
#include "ratesvol/special.hpp"
#include "support.hpp"

using namespace ratesvol;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Empirical CDF of `draw` on a grid, n samples.
template <class Draw>
std::vector<double> mc_cdf(Draw draw, const std::vector<double>& grid, long n) {
  std::vector<long> below(grid.size(), 0);
  for (long s = 0; s < n; ++s) {
    const double x = draw();
    for (std::size_t k = 0; k < grid.size(); ++k) below[k] += x <= grid[k];
  }
  std::vector<double> out;
  for (long b : below) out.push_back(static_cast<double>(b) / static_cast<double>(n));
  return out;
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("special functions match reference values") {
    CHECK(special::chi_square_cdf(3.2, 10) == doctest::Approx(0.02368227804931168).epsilon(1e-12));
    CHECK(special::chi_square_sf(3.2, 10) == doctest::Approx(0.9763177219506883).epsilon(1e-12));
    CHECK(special::chi_square_cdf(15.0, 10) == doctest::Approx(0.8679381437122794).epsilon(1e-12));
    CHECK(special::chi_square_sf(15.0, 10) == doctest::Approx(0.1320618562877206).epsilon(1e-12));
    CHECK(special::chi_square_cdf(0.5, 1) == doctest::Approx(0.5204998778130466).epsilon(1e-12));
    CHECK(special::chi_square_sf(25.0, 20) == doctest::Approx(0.2014311049455359).epsilon(1e-12));

    CHECK(special::student_t_cdf(1.3, 5) == doctest::Approx(0.8748496829146615).epsilon(1e-12));
    CHECK(special::student_t_two_sided_p(1.3, 5) == doctest::Approx(0.25030063417067716).epsilon(1e-12));
    CHECK(special::student_t_cdf(-2.1, 12) == doctest::Approx(0.02877246936747559).epsilon(1e-12));
    CHECK(special::student_t_two_sided_p(-2.1, 12) == doctest::Approx(0.05754493873495118).epsilon(1e-12));
    CHECK(special::student_t_cdf(0.2, 3) == doctest::Approx(0.5728648353768605).epsilon(1e-12));
    CHECK(special::student_t_two_sided_p(4.0, 30) == doctest::Approx(0.0003818456360837564).epsilon(1e-11));

    CHECK(special::gamma_p(0.5, 0.3) == doctest::Approx(0.5614219739190003).epsilon(1e-12));
    CHECK(special::gamma_p(3, 2.5) == doctest::Approx(0.45618688411667035).epsilon(1e-12));
    CHECK(special::gamma_p(10, 12) == doctest::Approx(0.7576078383294875).epsilon(1e-12));
    CHECK(special::beta_inc(2, 3, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
    CHECK(special::beta_inc(0.5, 0.5, 0.2) == doctest::Approx(0.2951672353008665).epsilon(1e-12));
    CHECK(special::beta_inc(10, 4, 0.9) == doctest::Approx(0.9658392790770001).epsilon(1e-12));
  }

  TEST_CASE("normal quantile accuracy") {
    const double p[] = {1e-10, 0.001, 0.025, 0.3, 0.5, 0.9, 0.999};
    const double q[] = {-6.361340902404056, -3.090232306167813, -1.9599639845400545, -0.5244005127080409,
                        0.0, 1.2815515655446004, 3.090232306167813};
    for (int k = 0; k < 7; ++k) CHECK(std::abs(special::normal_quantile(p[k]) - q[k]) < 1.5e-9);
    for (double x = -6.0; x <= 6.0; x += 0.25) {
      const double u = special::normal_cdf(x);
      CHECK(std::abs(special::normal_quantile(u) - x) < 1e-8);
    }
  }

  TEST_CASE("complementary pairs sum to one") {
    for (double a : {0.3, 1.0, 4.5, 20.0})
      for (double x : {0.01, 0.7, 3.0, 19.0, 40.0})
        CHECK(special::gamma_p(a, x) + special::gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-14));
    for (double x : {0.1, 0.5, 0.9})
      CHECK(special::beta_inc(2.5, 1.5, x) + special::beta_inc(1.5, 2.5, 1 - x) == doctest::Approx(1.0).epsilon(1e-12));
    for (double t : {-3.0, -0.4, 0.0, 2.2}) CHECK(special::student_t_cdf(t, 7) + special::student_t_cdf(-t, 7) == doctest::Approx(1.0));
  }

  TEST_CASE("chi-square and Student t CDFs agree with Monte Carlo") {
    constexpr long n = 10000000;
    Xoshiro256 rng(20240601);
    NormalSampler z;
    std::vector<double> gx, gt;
    for (int k = 0; k < 20; ++k) {
      gx.push_back(0.25 + 0.5 * k);        // chi-square(3) grid over [0.25, 9.75]
      gt.push_back(-3.8 + 0.4 * k);        // t(5) grid over [-3.8, 3.8]
    }
    const auto ex = mc_cdf([&] { double s = 0; for (int i = 0; i < 3; ++i) { const double u = z(rng); s += u * u; } return s; }, gx, n);
    for (std::size_t k = 0; k < gx.size(); ++k) CHECK(std::abs(ex[k] - special::chi_square_cdf(gx[k], 3)) < 2e-3);
    const auto et = mc_cdf(
        [&] {
          double s = 0;
          for (int i = 0; i < 5; ++i) { const double u = z(rng); s += u * u; }
          return z(rng) / std::sqrt(s / 5.0);
        },
        gt, n);
    for (std::size_t k = 0; k < gt.size(); ++k) CHECK(std::abs(et[k] - special::student_t_cdf(gt[k], 5)) < 2e-3);
  }

  TEST_CASE("jacobi eigensolver") {
    testsupport::Gauss g(3);
    for (int trial = 0; trial < 10; ++trial) {
      const MatrixXd R = g.mat(6, 6);
      const MatrixXd S = R * R.transpose();
      const auto e = linalg::jacobi_eigen(S);
      CHECK((e.vectors.transpose() * e.vectors - MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - S).cwiseAbs().maxCoeff() < 1e-10 * S.norm());
      for (int i = 1; i < 6; ++i) CHECK(e.values(i) <= e.values(i - 1));
      const Eigen::SelfAdjointEigenSolver<MatrixXd> ref(S);
      CHECK((e.values.reverse() - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10 * S.norm());
    }
  }

  TEST_CASE("hessenberg reduction preserves the spectrum") {
    testsupport::Gauss g(8);
    const MatrixXd A = g.mat(5, 5);
    const MatrixXd H = linalg::hessenberg(A);
    for (int i = 2; i < 5; ++i)
      for (int j = 0; j < i - 1; ++j) CHECK(std::abs(H(i, j)) < 1e-14);
    CHECK(H.norm() == doctest::Approx(A.norm()).epsilon(1e-12));
    CHECK(H.trace() == doctest::Approx(A.trace()).epsilon(1e-12));
    CHECK(H.determinant() == doctest::Approx(A.determinant()).epsilon(1e-10));
  }

  TEST_CASE("eigenvalues of a general matrix") {
    testsupport::Gauss g(21);
    const MatrixXd A = g.mat(7, 7);
    auto ours = linalg::eigenvalues(A);
    const Eigen::EigenSolver<MatrixXd> ref(A);
    auto theirs = std::vector<std::complex<double>>(ref.eigenvalues().data(), ref.eigenvalues().data() + 7);
    auto key = [](const std::complex<double>& a, const std::complex<double>& b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(ours.begin(), ours.end(), key);
    std::sort(theirs.begin(), theirs.end(), key);
    for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(ours[i] - theirs[i]) < 1e-9);
    CHECK(linalg::eigenvalues(MatrixXd::Zero(3, 3)).size() == 3);
  }

  TEST_CASE("positive semidefinite Cholesky") {
    testsupport::Gauss g(5);
    const MatrixXd R = g.mat(4, 4);
    const MatrixXd S = R * R.transpose();
    const MatrixXd L = linalg::psd_cholesky(S);
    CHECK((L * L.transpose() - S).cwiseAbs().maxCoeff() < 1e-12 * S.norm());
    CHECK(L.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff() == 0.0);

    const VectorXd u = g.vec(4);
    const MatrixXd rank1 = u * u.transpose();
    const MatrixXd L1 = linalg::psd_cholesky(rank1);
    CHECK((L1 * L1.transpose() - rank1).cwiseAbs().maxCoeff() < 1e-12 * rank1.norm());
    CHECK(L1.col(3).norm() == 0.0);
    CHECK(linalg::psd_cholesky(MatrixXd::Zero(3, 3)).norm() == 0.0);
  }

  TEST_CASE("matrix norms") {
    testsupport::Gauss g(6);
    const MatrixXd A = g.mat(4, 3);
    const Eigen::JacobiSVD<MatrixXd> svd(A);
    CHECK(linalg::spectral_norm(A) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-10));
    CHECK(linalg::frobenius_norm(A) == doctest::Approx(A.norm()).epsilon(1e-14));
  }

  TEST_CASE("continuous Lyapunov solve") {
    CHECK(linalg::solve_lyapunov(MatrixXd::Constant(1, 1, 2.0), MatrixXd::Constant(1, 1, 0.5))(0, 0) ==
          doctest::Approx(0.125));
    MatrixXd B(3, 3);
    B << 0.5, 0.1, 0.0, -0.2, 0.8, 0.3, 0.05, 0.0, 0.3;
    testsupport::Gauss g(2);
    const MatrixXd R = g.mat(3, 3);
    const MatrixXd D = R * R.transpose();
    const MatrixXd S = linalg::solve_lyapunov(B, D);
    CHECK((B * S + S * B.transpose() - D).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((S - S.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("rng determinism and stream separation") {
    Xoshiro256 a(42), b(42), c(43);
    bool all_equal = true, any_equal = false;
    for (int i = 0; i < 1000; ++i) {
      const auto x = a(), y = b(), z = c();
      all_equal = all_equal && x == y;
      any_equal = any_equal || x == z;
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal);

    std::set<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 20; ++s)
      for (std::uint64_t r = 0; r < 50; ++r) seeds.insert(derive_stream_seed(s, r));
    CHECK(seeds.size() == 1000);
    CHECK(derive_stream_seed(7, 3) == derive_stream_seed(7, 3));

    Xoshiro256 u(1);
    double lo = 1, hi = 0;
    for (int i = 0; i < 100000; ++i) {
      const double x = u.uniform();
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
  }

  TEST_CASE("innovation laws have unit variance") {
    for (const auto& law : {InnovationLaw::gaussian(), InnovationLaw::laplace(), InnovationLaw::student_t(6.0)}) {
      InnovationSampler s(law, 99);
      const int n = 400000;
      double m1 = 0, m2 = 0;
      for (int i = 0; i < n; ++i) {
        const double x = s();
        m1 += x;
        m2 += x * x;
      }
      m1 /= n;
      m2 /= n;
      CHECK(std::abs(m1) < 0.01);
      CHECK(std::abs(m2 - 1.0) < 0.03);
    }
    CHECK_THROWS_AS(InnovationSampler(InnovationLaw::student_t(2.0), 1), Error);
  }

  TEST_CASE("decimal formatting round-trips") {
    testsupport::Gauss g(11);
    for (int i = 0; i < 2000; ++i) {
      const double x = g() * std::pow(10.0, static_cast<int>(g() * 8));
      const auto back = parse_double(format_shortest(x));
      REQUIRE(back);
      CHECK(*back == x);
      const auto back17 = parse_double(format_17(x));
      CHECK(*back17 == x);
    }
    CHECK(format_shortest(0.1) == "0.1");
    CHECK(format_shortest(4.0) == "4");
    CHECK_FALSE(parse_double("abc"));
    CHECK_FALSE(parse_double("1.5x"));
    CHECK(trim("  a b \t") == "a b");
    const auto f = split_csv_line("\"2020-01-01\",1.5,,x");
    REQUIRE(f.size() == 4);
    CHECK(f[0] == "2020-01-01");
    CHECK(f[2].empty());
  }

  TEST_CASE("error codes map to kinds") {
    CHECK(kind_of(ErrorCode::FileNotFound) == ErrorKind::Input);
    CHECK(kind_of(ErrorCode::MaturityOutOfRange) == ErrorKind::Input);
    CHECK(kind_of(ErrorCode::RankDeficientDesign) == ErrorKind::Estimation);
    CHECK(kind_of(ErrorCode::Unstable) == ErrorKind::Stability);
    CHECK(kind_of(ErrorCode::NonFiniteState) == ErrorKind::Stability);
    const Error e(ErrorCode::SparseMonth, "2001-03");
    CHECK(std::string(e.what()).find("SparseMonth") == 0);
  }
}
