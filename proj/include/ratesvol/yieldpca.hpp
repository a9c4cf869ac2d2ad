#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ratesvol/ingest.hpp"

namespace ratesvol {

/// Covariance PCA of a rate panel.
///
/// Loadings are rows (component x maturity) and are orthonormal. Each row is signed so
/// that its mean is nonnegative, which makes the first component a "level" factor with
/// positive weights and keeps repeated fits bit-identical.
struct PcModel {
  std::vector<double> maturities;  // years, one per loading column
  Eigen::VectorXd mean_rates;      // M, percent
  Eigen::MatrixXd loadings;        // d x M
  Eigen::VectorXd eigenvalues;     // d, sample covariance eigenvalues (1/(T-1) normalisation)
  Eigen::VectorXd variance_ratio;  // d, eigenvalue / trace
  double total_variance = 0.0;     // trace of the sample covariance
  Eigen::MatrixXd scores;          // T x d

  Eigen::Index components() const noexcept { return loadings.rows(); }
};

/// Loadings sampled monthly on maturities 0..max_month. Knots sit at 12*maturity months
/// and are reproduced exactly; in between the curve is linear, and below the first knot
/// the first segment is extended down to month 0.
struct LoadingCurve {
  Eigen::MatrixXd gamma;  // d x (max_month + 1)
  Eigen::VectorXd mean;   // max_month + 1; the PCA centring term on the same grid
  int max_month = 0;
};

PcModel fit_pca(const RatePanel& panel, int components);

LoadingCurve interpolate_loadings(const PcModel& model);

/// Scores of a panel under an existing PCA: (rates - mean_rates) * loadings^T.
/// The panel must carry the same maturities.
Eigen::MatrixXd project_scores(const PcModel& model, const RatePanel& panel);

/// mean_rates + loadings^T * scores(t).
Eigen::VectorXd reconstruct_rates(const PcModel& model, Eigen::Index t);

/// Rate at a monthly maturity (percent) reconstructed from a score vector.
double curve_rate(const LoadingCurve& curve, const Eigen::Ref<const Eigen::VectorXd>& scores, int month);

}  // namespace ratesvol
