#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ratesvol/estimate.hpp"

namespace ratesvol {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int lags_or_dof = 0;
  bool reject_at_5pct = false;
};

/// Central moments with 1/N normalisation; kurtosis is raw (3 for a Gaussian).
struct MomentSummary {
  double mean = 0.0;
  double std = 0.0;  // sqrt of the 1/N second central moment
  double skewness = 0.0;
  double kurtosis = 0.0;
};

MomentSummary skew_kurt(const Eigen::VectorXd& series);

struct AcfResult {
  Eigen::VectorXd rho;  // rho(k-1) is the lag-k autocorrelation, k = 1..max_lag
  double band = 0.0;    // 1.96 / sqrt(T)
};

AcfResult acf(const Eigen::VectorXd& series, int max_lag);

/// Q = T(T+2) sum_k rho_k^2 / (T-k), chi-square with `lags` degrees of freedom.
TestResult ljung_box(const Eigen::VectorXd& series, int lags = 10);

struct AdfOptions {
  int max_lag = -1;    // < 0: floor(12 (T/100)^{1/4})
  bool autolag = true;  // choose the lag by AIC; otherwise use max_lag
};

struct AdfResult : TestResult {
  int used_lag = 0;
  int nobs = 0;
};

/// Augmented Dickey-Fuller test with a constant and no trend. The p-value uses the
/// MacKinnon (1994) response surface for one integrated variable.
AdfResult adf_test(const Eigen::VectorXd& series, const AdfOptions& options = {});

/// MacKinnon approximate p-value for the constant-only ADF t statistic.
double mackinnon_p_value(double tau);

/// (theoretical normal quantile, sorted value) pairs with plotting positions (i-0.5)/N.
/// Values are standardised by the sample mean and (N-1) standard deviation unless
/// `standardize` is false.
std::vector<std::pair<double, double>> qq_data(const Eigen::VectorXd& series, bool standardize = true);

/// Skewness and kurtosis of innovations Z_i and of Z_i / V.
struct DiagnosticsTable {
  std::vector<MomentSummary> raw;
  std::vector<MomentSummary> scaled;

  /// Four-row text rendering: skewness of Z, of Z/V, kurtosis of Z, of Z/V.
  std::string to_text(const std::vector<std::string>& labels = {}) const;
};

/// `innovations` is n x d (one column per component), `vol` the n matching values of V(t).
DiagnosticsTable diagnostics_table(const ArSvModel& model, const Eigen::MatrixXd& innovations,
                                   const Eigen::VectorXd& vol);

/// Residuals of the per-component AR(1) fits, one column per component, rows t = 1..T-1.
Eigen::MatrixXd scalar_ar_innovations(const Eigen::MatrixXd& scores);

}  // namespace ratesvol
