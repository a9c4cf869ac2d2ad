#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ratesvol/ingest.hpp"
#include "ratesvol/simulate.hpp"
#include "ratesvol/yieldpca.hpp"

namespace ratesvol {

/// Price of a zero-coupon bond paying 1 after tau years at an annual decimal rate.
double price_zero(double rate, double tau);

/// Gamma_{il} = (l/12) gamma_{il} on monthly maturities l = 0..max_month, with the
/// one-month differences and the analytic derivative in l used by continuous time.
/// The mean-rate term of the PCA centring is carried the same way.
struct GammaMatrix {
  Eigen::MatrixXd gamma;  // d x (L+1)
  Eigen::MatrixXd diff;   // Gamma_{il} - Gamma_{i,l-1}; column 0 is zero
  Eigen::MatrixXd slope;  // d Gamma_{il} / dl per month
  Eigen::VectorXd carry;        // (l/12) m_l - ((l-1)/12) m_{l-1}; entry 0 is zero
  Eigen::VectorXd carry_slope;  // d((l/12) m_l) / dl per month
  int max_month = 0;

  Eigen::Index components() const noexcept { return gamma.rows(); }
};

GammaMatrix gamma_matrix(const LoadingCurve& curve);

/// Q_l(t) = -(tau - 1/12) ln(1 + rho_{l-1}(t)) + tau ln(1 + rho_l(t-1)), tau = l/12,
/// rates rebuilt from the curve and converted from percent. Entry t-1 holds month t.
Eigen::VectorXd exact_returns(const LoadingCurve& curve, const Eigen::MatrixXd& scores, int l);

/// Q*_l(t) = sum_i [Gamma_{il} P_i(t-1) - Gamma_{i,l-1} P_i(t)] / 100 plus the mean-rate carry.
Eigen::VectorXd approx_returns(const Eigen::MatrixXd& scores, const GammaMatrix& gamma, int l);

/// Per-step log wealth increments of a bond rolled at constant maturity l (months, l >= 0)
/// along a continuous path sampled every h months:
///   dlnW = [sum_i Gamma'_{il} P_i dt - sum_i Gamma_{il} dP_i + carry' dt] / 100.
Eigen::VectorXd continuous_returns(const Eigen::MatrixXd& path_x, double h, const GammaMatrix& gamma, int l);

struct ReturnSeries {
  int maturity = 0;
  std::vector<YearMonth> dates;
  Eigen::VectorXd exact;
  Eigen::VectorXd approx;

  /// "date,exact,approx".
  std::string to_csv() const;
};

/// Exact and approximate series for the panel's dates (first date dropped).
ReturnSeries return_series(const std::vector<YearMonth>& dates, const LoadingCurve& curve,
                           const GammaMatrix& gamma, const Eigen::MatrixXd& scores, int l);

/// Elementwise spread returns_l - returns_short.
Eigen::VectorXd term_premium(const Eigen::VectorXd& returns_l, const Eigen::VectorXd& returns_short);

struct CapmResult {
  double slope = 0.0;
  double stderr_slope = 0.0;
  int l = 0;
  int l0 = 0;
  double theoretical = 0.0;  // l / l0
  long n = 0;
};

/// No-intercept least squares of tp_l on tp_benchmark.
CapmResult capm_slope(const Eigen::VectorXd& tp_l, const Eigen::VectorXd& tp_benchmark, int l, int l0);

/// Simulated time average of the score part of the maturity-l return against
/// sum_i (Gamma_{il} - Gamma_{i,l-1}) E[P_i] / 100 (discrete), or sum_i Gamma'_{il} E[P_i] / 100
/// per month (continuous).
LlnReport returns_lln(const ArSvModel& model, const GammaMatrix& gamma, int l, const LlnOptions& options);

}  // namespace ratesvol
