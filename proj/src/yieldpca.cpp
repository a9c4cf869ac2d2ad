#include "ratesvol/yieldpca.hpp"

#include <cmath>
#include <string>

#include "ratesvol/error.hpp"
#include "ratesvol/linalg.hpp"

namespace ratesvol {
namespace {

// Relative eigenvalue floor below which a requested component carries no variance.
constexpr double kRankTolerance = 1e-12;

int knot_month(double years) {
  const double m = years * 12.0;
  const double r = std::round(m);
  if (std::abs(m - r) > 1e-9 || r < 1.0)
    throw Error(ErrorCode::InvalidArgument, "maturity " + std::to_string(years) + " is not a whole number of months");
  return static_cast<int>(r);
}

Eigen::VectorXd interpolate_row(const std::vector<int>& knots, const Eigen::VectorXd& values, int max_month) {
  Eigen::VectorXd out(max_month + 1);
  std::size_t seg = 0;
  for (int l = 0; l <= max_month; ++l) {
    while (seg + 2 < knots.size() && l > knots[seg + 1]) ++seg;
    const auto k0 = static_cast<Eigen::Index>(seg);
    if (l == knots[seg]) {
      out(l) = values(k0);
    } else if (l == knots[seg + 1]) {
      out(l) = values(k0 + 1);
    } else {
      const double w = static_cast<double>(l - knots[seg]) / static_cast<double>(knots[seg + 1] - knots[seg]);
      out(l) = values(k0) + w * (values(k0 + 1) - values(k0));
    }
  }
  return out;
}

}  // namespace

PcModel fit_pca(const RatePanel& panel, int components) {
  const Eigen::Index T = panel.rows();
  const Eigen::Index M = panel.cols();
  if (components < 1 || components > M)
    throw Error(ErrorCode::InvalidArgument, "component count must lie in [1, " + std::to_string(M) + "]");
  if (T <= M) throw Error(ErrorCode::TooFewObservations, "PCA needs more dates than maturities");

  PcModel model;
  model.maturities = panel.maturities;
  model.mean_rates = panel.values.colwise().mean().transpose();
  const Eigen::MatrixXd centered = panel.values.rowwise() - model.mean_rates.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(T - 1);

  const auto eig = linalg::jacobi_eigen(cov, 1e-12);
  model.total_variance = cov.trace();
  if (!(model.total_variance > 0.0)) throw Error(ErrorCode::RankDeficient, "rate panel has zero variance");
  for (int i = 0; i < components; ++i)
    if (eig.values(i) <= kRankTolerance * model.total_variance)
      throw Error(ErrorCode::RankDeficient, "covariance has rank " + std::to_string(i) + " < requested " +
                                                std::to_string(components) + " components");

  model.loadings.resize(components, M);
  model.eigenvalues = eig.values.head(components);
  for (int i = 0; i < components; ++i) {
    Eigen::VectorXd v = eig.vectors.col(i);
    if (v.mean() < 0.0) v = -v;
    model.loadings.row(i) = v.transpose();
  }
  model.variance_ratio = model.eigenvalues / model.total_variance;
  model.scores = centered * model.loadings.transpose();
  return model;
}

LoadingCurve interpolate_loadings(const PcModel& model) {
  std::vector<int> knots;
  for (double m : model.maturities) knots.push_back(knot_month(m));
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (knots[i] <= knots[i - 1]) throw Error(ErrorCode::InvalidArgument, "maturities must be increasing");
  if (knots.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two maturities to interpolate");

  LoadingCurve curve;
  curve.max_month = knots.back();
  const Eigen::Index d = model.components();
  curve.gamma.resize(d, curve.max_month + 1);
  for (Eigen::Index i = 0; i < d; ++i)
    curve.gamma.row(i) = interpolate_row(knots, model.loadings.row(i).transpose(), curve.max_month).transpose();
  curve.mean = interpolate_row(knots, model.mean_rates, curve.max_month);
  return curve;
}

Eigen::MatrixXd project_scores(const PcModel& model, const RatePanel& panel) {
  bool same = panel.maturities.size() == model.maturities.size();
  for (std::size_t k = 0; same && k < panel.maturities.size(); ++k)
    same = std::abs(panel.maturities[k] - model.maturities[k]) < 1e-9;
  if (!same) throw Error(ErrorCode::MisalignedSeries, "panel maturities differ from the fitted PCA");
  return (panel.values.rowwise() - model.mean_rates.transpose()) * model.loadings.transpose();
}

Eigen::VectorXd reconstruct_rates(const PcModel& model, Eigen::Index t) {
  if (t < 0 || t >= model.scores.rows())
    throw Error(ErrorCode::IndexOutOfRange, "date index " + std::to_string(t) + " outside [0, " +
                                                std::to_string(model.scores.rows()) + ")");
  return model.mean_rates + model.loadings.transpose() * model.scores.row(t).transpose();
}

double curve_rate(const LoadingCurve& curve, const Eigen::Ref<const Eigen::VectorXd>& scores, int month) {
  if (month < 0 || month > curve.max_month)
    throw Error(ErrorCode::MaturityOutOfRange, "maturity " + std::to_string(month) + " months outside [0, " +
                                                   std::to_string(curve.max_month) + "]");
  return curve.mean(month) + curve.gamma.col(month).dot(scores);
}

}  // namespace ratesvol
