#include "ratesvol/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ratesvol/error.hpp"
#include "ratesvol/linalg.hpp"
#include "ratesvol/special.hpp"

namespace ratesvol {
namespace {

constexpr Eigen::Index kMinSeriesLength = 24;
constexpr double kRankThreshold = 1e-10;

Eigen::MatrixXd correlation_scaled_cov(const Eigen::MatrixXd& innovations, const Eigen::VectorXd& scales,
                                       bool diagonal) {
  const Eigen::Index k = innovations.cols();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) cov(i, i) = scales(i) * scales(i);
  if (diagonal || innovations.rows() < 2) return cov;
  const Eigen::MatrixXd centered = innovations.rowwise() - innovations.colwise().mean();
  const Eigen::MatrixXd sample = centered.transpose() * centered / static_cast<double>(innovations.rows() - 1);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i == j) continue;
      const double denom = std::sqrt(sample(i, i) * sample(j, j));
      const double rho = denom > 0.0 ? sample(i, j) / denom : 0.0;
      cov(i, j) = rho * scales(i) * scales(j);
    }
  return cov;
}

}  // namespace

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  if (y.size() != n) throw Error(ErrorCode::MisalignedSeries, "design and response lengths differ");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "design matrix has no columns");
  if (n <= k)
    throw Error(ErrorCode::TooFewObservations,
                std::to_string(n) + " observations for " + std::to_string(k) + " coefficients");
  if (!X.allFinite() || !y.allFinite()) throw Error(ErrorCode::NonFiniteValue, "non-finite regression input");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < k)
    throw Error(ErrorCode::RankDeficientDesign,
                "design has numerical rank " + std::to_string(qr.rank()) + " < " + std::to_string(k));

  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - X * fit.coefficients;
  fit.dof = static_cast<int>(n - k);
  const double ssr = fit.residuals.squaredNorm();
  const double s2 = ssr / fit.dof;
  fit.residual_std = std::sqrt(s2);

  // (X^T X)^{-1} = P R^{-1} R^{-T} P^T
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const Eigen::MatrixXd xtx_inv = perm * inner * perm.transpose();

  fit.standard_errors = (s2 * xtx_inv.diagonal()).cwiseMax(0.0).cwiseSqrt();
  fit.t_stats.resize(k);
  fit.p_values.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double b = fit.coefficients(j);
    const double se = fit.standard_errors(j);
    double t = 0.0;
    if (se > 0.0) {
      t = b / se;
    } else if (b != 0.0) {
      t = std::copysign(std::numeric_limits<double>::infinity(), b);
    }
    fit.t_stats(j) = t;
    fit.p_values(j) = special::student_t_two_sided_p(t, fit.dof);
  }

  const double tss = (y.array() - y.mean()).square().sum();
  if (tss > 0.0) {
    fit.r_squared = 1.0 - ssr / tss;
  } else {
    fit.r_squared = ssr == 0.0 ? 1.0 : 0.0;
  }
  return fit;
}

LogArFit fit_log_ar(const Eigen::VectorXd& vol_values) {
  const Eigen::Index T = vol_values.size();
  if (T < kMinSeriesLength)
    throw Error(ErrorCode::TooFewObservations, "volatility series has " + std::to_string(T) + " < 24 points");
  if ((vol_values.array() <= 0.0).any()) throw Error(ErrorCode::NonPositiveVol, "volatility must be positive");
  const Eigen::VectorXd logv = vol_values.array().log().matrix();
  Eigen::MatrixXd X(T - 1, 2);
  X.col(0).setOnes();
  X.col(1) = logv.head(T - 1);
  LogArFit out;
  out.fit = ols(X, logv.tail(T - 1));
  out.alpha = out.fit.coefficients(0);
  out.beta = out.fit.coefficients(1);
  out.sigma0 = out.fit.residual_std;
  return out;
}

LogArFit fit_log_ar(const VolSeries& vol) { return fit_log_ar(vol.values); }

ScalarArFit fit_scalar_ar(const Eigen::VectorXd& series) {
  const Eigen::Index T = series.size();
  if (T < kMinSeriesLength)
    throw Error(ErrorCode::TooFewObservations, "series has " + std::to_string(T) + " < 24 points");
  Eigen::MatrixXd X(T - 1, 2);
  X.col(0).setOnes();
  X.col(1) = series.head(T - 1);
  ScalarArFit out;
  out.fit = ols(X, series.tail(T - 1));
  out.a = out.fit.coefficients(0);
  out.b = out.fit.coefficients(1);
  return out;
}

void ArSvModel::validate() const {
  const Eigen::Index d = a.size();
  if (d < 1) throw Error(ErrorCode::InvalidModel, "model dimension must be at least 1");
  if (B.rows() != d || B.cols() != d || c.size() != d || noise_scales.size() != d ||
      vix_scaled.size() != static_cast<std::size_t>(d))
    throw Error(ErrorCode::InvalidModel, "model parameter shapes disagree with dimension " + std::to_string(d));
  if (innovation_cov.rows() != d + 1 || innovation_cov.cols() != d + 1)
    throw Error(ErrorCode::InvalidModel, "innovation covariance must be (d+1)x(d+1)");
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !a.allFinite() || !B.allFinite() || !c.allFinite() ||
      !innovation_cov.allFinite() || !noise_scales.allFinite() || !std::isfinite(sigma0))
    throw Error(ErrorCode::InvalidModel, "model has non-finite parameters");
  if (sigma0 < 0.0 || (noise_scales.array() < 0.0).any())
    throw Error(ErrorCode::InvalidModel, "innovation scales must be nonnegative");
  if ((innovation_cov - innovation_cov.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, innovation_cov.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::InvalidModel, "innovation covariance is not symmetric");
}

ArSvModel make_model(double alpha, double beta, double sigma0, Eigen::VectorXd a, Eigen::MatrixXd B,
                     Eigen::VectorXd c, std::vector<bool> vix_scaled, Eigen::VectorXd noise_scales) {
  ArSvModel m;
  m.alpha = alpha;
  m.beta = beta;
  m.sigma0 = sigma0;
  m.a = std::move(a);
  m.B = std::move(B);
  m.c = std::move(c);
  if (vix_scaled.empty()) vix_scaled.assign(static_cast<std::size_t>(m.a.size()), false);
  m.vix_scaled = std::move(vix_scaled);
  m.noise_scales = std::move(noise_scales);
  const Eigen::Index d = m.a.size();
  m.innovation_cov = Eigen::MatrixXd::Zero(d + 1, d + 1);
  m.innovation_cov(0, 0) = sigma0 * sigma0;
  for (Eigen::Index i = 0; i < d && i < m.noise_scales.size(); ++i)
    m.innovation_cov(i + 1, i + 1) = m.noise_scales(i) * m.noise_scales(i);
  m.validate();
  return m;
}

ArSvFit fit_arsv(const Eigen::MatrixXd& scores, const Eigen::VectorXd& v, const ArSvOptions& options) {
  const Eigen::Index T = scores.rows();
  const Eigen::Index d = scores.cols();
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "need at least one component");
  if (v.size() != T)
    throw Error(ErrorCode::MisalignedSeries, "scores have " + std::to_string(T) + " rows but volatility has " +
                                                 std::to_string(v.size()));
  std::vector<bool> scaled = options.vix_scaled;
  if (scaled.empty()) scaled.assign(static_cast<std::size_t>(d), false);
  if (scaled.size() != static_cast<std::size_t>(d))
    throw Error(ErrorCode::InvalidArgument, "vix_scaled mask must have one entry per component");

  ArSvFit out;
  out.vol_fit = fit_log_ar(v);
  const Eigen::Index n = T - 1;
  const Eigen::VectorXd v_now = v.tail(n);
  const Eigen::MatrixXd lagged = scores.topRows(n);

  ArSvModel& m = out.model;
  m.alpha = out.vol_fit.alpha;
  m.beta = out.vol_fit.beta;
  m.sigma0 = out.vol_fit.sigma0;
  m.a = Eigen::VectorXd::Zero(d);
  m.B = Eigen::MatrixXd::Zero(d, d);
  m.c = Eigen::VectorXd::Zero(d);
  m.vix_scaled = scaled;
  m.noise_scales = Eigen::VectorXd::Zero(d);
  out.innovations.resize(n, d + 1);
  out.innovations.col(0) = out.vol_fit.fit.residuals;

  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Index lag_cols = options.diagonal_b ? 1 : d;
    Eigen::MatrixXd X(n, lag_cols + 2);
    X.col(0).setOnes();
    if (options.diagonal_b) {
      X.col(1) = lagged.col(i);
    } else {
      X.middleCols(1, d) = lagged;
    }
    X.col(lag_cols + 1) = v_now;
    Eigen::VectorXd y = scores.col(i).tail(n);
    if (scaled[static_cast<std::size_t>(i)]) {
      // dividing through by V(t): [1, P(t-1), V(t)] / V(t) = [1/V, P(t-1)/V, 1]
      for (Eigen::Index r = 0; r < n; ++r) X.row(r) /= v_now(r);
      y = y.cwiseQuotient(v_now);
    }
    OlsFit fit = ols(X, y);
    m.a(i) = fit.coefficients(0);
    if (options.diagonal_b) {
      m.B(i, i) = fit.coefficients(1);
    } else {
      m.B.row(i) = fit.coefficients.segment(1, d).transpose();
    }
    m.c(i) = fit.coefficients(lag_cols + 1);
    m.noise_scales(i) = fit.residual_std;
    out.innovations.col(i + 1) = fit.residuals;
    out.row_fits.push_back(std::move(fit));
  }

  Eigen::VectorXd scales(d + 1);
  scales(0) = m.sigma0;
  scales.tail(d) = m.noise_scales;
  m.innovation_cov = correlation_scaled_cov(out.innovations, scales, options.diagonal_cov);
  return out;
}

ArSvFit fit_arsv(const Eigen::MatrixXd& scores, const VolSeries& vol, const ArSvOptions& options) {
  return fit_arsv(scores, vol.values, options);
}

double spectral_radius(const Eigen::MatrixXd& B) {
  double radius = 0.0;
  for (const auto& lambda : linalg::eigenvalues(B)) radius = std::max(radius, std::abs(lambda));
  return radius;
}

StabilityReport check_stability(const ArSvModel& model) {
  StabilityReport report;
  report.eigenvalues_B = linalg::eigenvalues(model.B);
  for (const auto& lambda : report.eigenvalues_B)
    report.spectral_radius_B = std::max(report.spectral_radius_B, std::abs(lambda));
  report.beta_in_unit = model.beta > 0.0 && model.beta < 1.0;
  report.stationary_ok = report.beta_in_unit && report.spectral_radius_B < 1.0;
  return report;
}

}  // namespace ratesvol
