#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ratesvol/ingest.hpp"

namespace ratesvol {

struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  Eigen::VectorXd t_stats;
  Eigen::VectorXd p_values;  // two-sided, Student t with dof degrees of freedom
  Eigen::VectorXd residuals;
  double r_squared = 0.0;
  double residual_std = 0.0;  // sqrt(SSR / dof)
  int dof = 0;
};

/// Least squares through QR with column pivoting. Throws TooFewObservations when n <= k
/// and RankDeficientDesign when the design has lower numerical rank than its column count.
OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response);

struct LogArFit {
  double alpha = 0.0;
  double beta = 0.0;
  double sigma0 = 0.0;
  OlsFit fit;  // regression of ln V(t) on [1, ln V(t-1)]
};

struct ScalarArFit {
  double a = 0.0;
  double b = 0.0;
  OlsFit fit;  // regression of P(t) on [1, P(t-1)]
};

LogArFit fit_log_ar(const VolSeries& vol);
LogArFit fit_log_ar(const Eigen::VectorXd& vol_values);
ScalarArFit fit_scalar_ar(const Eigen::VectorXd& series);

/// Autoregression of the principal components with observed volatility:
///
///   X(t)    = a + B X(t-1) + c V(t) + xi(t) Z(t)
///   ln V(t) = alpha + beta ln V(t-1) + Z0(t)
///
/// where xi(t) is diagonal with V(t) on the volatility-scaled components and 1 elsewhere.
/// `innovation_cov` is the (d+1)x(d+1) covariance of (Z0, Z1..Zd); its diagonal equals
/// (sigma0^2, noise_scales^2).
struct ArSvModel {
  double alpha = 0.0;
  double beta = 0.0;
  double sigma0 = 0.0;
  Eigen::VectorXd a;
  Eigen::MatrixXd B;
  Eigen::VectorXd c;
  std::vector<bool> vix_scaled;  // length d
  Eigen::VectorXd noise_scales;
  Eigen::MatrixXd innovation_cov;

  int dimension() const noexcept { return static_cast<int>(a.size()); }
  /// Throws InvalidModel if shapes disagree or scales are not positive and finite.
  void validate() const;
};

/// Builds a model whose innovation covariance is diagonal with the given scales.
ArSvModel make_model(double alpha, double beta, double sigma0, Eigen::VectorXd a, Eigen::MatrixXd B,
                     Eigen::VectorXd c, std::vector<bool> vix_scaled, Eigen::VectorXd noise_scales);

struct ArSvFit {
  ArSvModel model;
  LogArFit vol_fit;
  std::vector<OlsFit> row_fits;  // one per component, coefficients in [a_i, B_i., c_i] order
  Eigen::MatrixXd innovations;   // (T-1) x (d+1): Z0 then Z_i (divided by V for scaled rows)
};

struct ArSvOptions {
  std::vector<bool> vix_scaled;  // length d; empty means none
  bool diagonal_b = false;
  bool diagonal_cov = false;  // zero the off-diagonal innovation covariance
};

/// Row-by-row least squares. Volatility-scaled rows are divided through by V(t) and fitted
/// on [1/V(t), P(t-1)/V(t), 1], which recovers (a_i, B_i., c_i) directly.
ArSvFit fit_arsv(const Eigen::MatrixXd& scores, const VolSeries& vol, const ArSvOptions& options);
ArSvFit fit_arsv(const Eigen::MatrixXd& scores, const Eigen::VectorXd& vol_values, const ArSvOptions& options);

/// Largest eigenvalue modulus.
double spectral_radius(const Eigen::MatrixXd& B);

struct StabilityReport {
  double spectral_radius_B = 0.0;
  std::vector<std::complex<double>> eigenvalues_B;
  bool beta_in_unit = false;
  bool stationary_ok = false;
};

StabilityReport check_stability(const ArSvModel& model);

}  // namespace ratesvol
