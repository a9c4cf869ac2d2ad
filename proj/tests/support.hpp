#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "ratesvol/estimate.hpp"
#include "ratesvol/ingest.hpp"
#include "ratesvol/rng.hpp"

namespace testsupport {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline ratesvol::ArSvModel reference_trivariate() {
  MatrixXd B(3, 3);
  B << 1 - 0.0140, 0.0310, -0.3881,
       0.0005, 1 - 0.0109, -0.2174,
       0.001, 0.0061, 1 - 0.0986;
  VectorXd a(3), c(3), s(3);
  a << 0.2844, 0.0667, -0.0054;
  c << -0.0164, -0.0033, 0.0003;
  // assumed innovation scales of the right order for monthly scores
  s << 0.6, 0.0075, 0.05;
  return ratesvol::make_model(0.34, 0.88, 0.2, a, B, c, {false, true, false}, s);
}

inline ratesvol::ArSvModel scalar_model(double a, double b, double sigma, double c = 0.0, double alpha = 0.5,
                                        double beta = 0.8, double sigma0 = 0.3) {
  return ratesvol::make_model(alpha, beta, sigma0, VectorXd::Constant(1, a), MatrixXd::Constant(1, 1, b),
                              VectorXd::Constant(1, c), {false}, VectorXd::Constant(1, sigma));
}

/// Deterministic standard-normal stream for fixtures.
class Gauss {
 public:
  explicit Gauss(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return normal_(rng_); }
  VectorXd vec(Eigen::Index n) {
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = (*this)();
    return v;
  }
  MatrixXd mat(Eigen::Index r, Eigen::Index c) {
    MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = (*this)();
    return m;
  }

 private:
  ratesvol::Xoshiro256 rng_;
  ratesvol::NormalSampler normal_;
};

inline std::vector<ratesvol::YearMonth> months(ratesvol::YearMonth start, std::size_t n) {
  std::vector<ratesvol::YearMonth> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(start);
    start = start.next();
  }
  return out;
}

/// Rate panel over 1..10 years whose moves are level, slope and curvature shaped
/// around a 4% curve, driven by three AR(1) factors plus a little idiosyncratic noise.
inline ratesvol::RatePanel synthetic_panel(std::size_t T, std::uint64_t seed, ratesvol::YearMonth start = {1990, 1}) {
  Gauss g(seed);
  ratesvol::RatePanel p;
  p.dates = months(start, T);
  for (int k = 1; k <= 10; ++k) p.maturities.push_back(k);
  p.values.resize(static_cast<Eigen::Index>(T), 10);
  double level = 0.0, slope = 0.0, curv = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    level = 0.99 * level + 0.25 * g();
    slope = 0.95 * slope + 0.08 * g();
    curv = 0.85 * curv + 0.03 * g();
    for (int k = 0; k < 10; ++k) {
      const double u = k / 9.0;
      p.values(static_cast<Eigen::Index>(t), k) =
          4.0 + 0.1 * k + level + slope * (1.0 - 2.0 * u) + curv * (1.0 - 8.0 * (u - 0.5) * (u - 0.5)) + 0.002 * g();
    }
  }
  return p;
}

inline ratesvol::VolSeries synthetic_vol(std::size_t T, std::uint64_t seed, ratesvol::YearMonth start = {1990, 1}) {
  Gauss g(seed);
  ratesvol::VolSeries v;
  v.dates = months(start, T);
  v.values.resize(static_cast<Eigen::Index>(T));
  double lv = 0.34 / 0.12;
  for (std::size_t t = 0; t < T; ++t) {
    lv = 0.34 + 0.88 * lv + 0.2 * g();
    v.values(static_cast<Eigen::Index>(t)) = std::exp(lv);
  }
  return v;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ratesvol_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline double mean(const VectorXd& x) { return x.mean(); }

inline double corr(const VectorXd& x, const VectorXd& y) {
  const VectorXd a = x.array() - x.mean();
  const VectorXd b = y.array() - y.mean();
  return a.dot(b) / std::sqrt(a.squaredNorm() * b.squaredNorm());
}

}  // namespace testsupport
