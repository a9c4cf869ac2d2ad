#include "ratesvol/diagnose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ratesvol/error.hpp"
#include "ratesvol/special.hpp"

namespace ratesvol {
namespace {

// MacKinnon (1994) response-surface coefficients, constant-only regression, N = 1.
// Below tau_star the small-p polynomial applies, above it the large-p polynomial;
// the p-value is Phi(poly(tau)).
constexpr double kTauMax = 2.74;
constexpr double kTauMin = -18.83;
constexpr double kTauStar = -1.61;
constexpr double kSmallP[] = {2.1659, 1.4412, 3.8269e-2};
constexpr double kLargeP[] = {1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2};

void require_non_degenerate(const Eigen::VectorXd& x) {
  const double scale = x.cwiseAbs().maxCoeff();
  const double m2 = (x.array() - x.mean()).square().mean();
  if (!(m2 > std::pow(1e-14 * scale, 2)) || m2 == 0.0)
    throw Error(ErrorCode::DegenerateSeries, "series has zero variance");
}

Eigen::VectorXd autocorrelations(const Eigen::VectorXd& x, int max_lag) {
  const Eigen::VectorXd c = x.array() - x.mean();
  const double denom = c.squaredNorm();
  const Eigen::Index T = x.size();
  Eigen::VectorXd rho(max_lag);
  for (int k = 1; k <= max_lag; ++k) rho(k - 1) = c.tail(T - k).dot(c.head(T - k)) / denom;
  return rho;
}

struct AdfRegression {
  double tau = 0.0;
  double ssr = 0.0;
  int nobs = 0;
  int ncoef = 0;
};

// dy(j) = y(j+1) - y(j). Rows j = first..T-2 regress dy(j) on [1, y(j), dy(j-1)..dy(j-p)].
AdfRegression adf_regression(const Eigen::VectorXd& y, const Eigen::VectorXd& dy, int p, int first) {
  const Eigen::Index n = dy.size() - first;
  Eigen::MatrixXd X(n, 2 + p);
  Eigen::VectorXd z(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index j = first + r;
    X(r, 0) = 1.0;
    X(r, 1) = y(j);
    for (int k = 1; k <= p; ++k) X(r, 1 + k) = dy(j - k);
    z(r) = dy(j);
  }
  const OlsFit fit = ols(X, z);
  return {fit.t_stats(1), fit.residuals.squaredNorm(), static_cast<int>(n), static_cast<int>(2 + p)};
}

}  // namespace

MomentSummary skew_kurt(const Eigen::VectorXd& x) {
  if (x.size() < 4) throw Error(ErrorCode::TooShort, "moments need at least 4 observations");
  require_non_degenerate(x);
  MomentSummary out;
  out.mean = x.mean();
  const Eigen::ArrayXd c = x.array() - out.mean;
  const double m2 = c.square().mean();
  const double m3 = c.cube().mean();
  const double m4 = c.square().square().mean();
  out.std = std::sqrt(m2);
  out.skewness = m3 / (m2 * out.std);
  out.kurtosis = m4 / (m2 * m2);
  return out;
}

AcfResult acf(const Eigen::VectorXd& x, int max_lag) {
  if (max_lag < 1) throw Error(ErrorCode::InvalidArgument, "max_lag must be positive");
  if (x.size() <= max_lag + 1)
    throw Error(ErrorCode::TooShort, "series of length " + std::to_string(x.size()) + " too short for " +
                                         std::to_string(max_lag) + " lags");
  require_non_degenerate(x);
  return {autocorrelations(x, max_lag), 1.96 / std::sqrt(static_cast<double>(x.size()))};
}

TestResult ljung_box(const Eigen::VectorXd& x, int lags) {
  if (lags < 1) throw Error(ErrorCode::InvalidArgument, "lags must be positive");
  if (x.size() <= lags + 1) throw Error(ErrorCode::TooShort, "series too short for Ljung-Box");
  require_non_degenerate(x);
  const Eigen::VectorXd rho = autocorrelations(x, lags);
  const double T = static_cast<double>(x.size());
  double q = 0.0;
  for (int k = 1; k <= lags; ++k) q += rho(k - 1) * rho(k - 1) / (T - k);
  q *= T * (T + 2.0);
  TestResult out;
  out.statistic = q;
  out.p_value = special::chi_square_sf(q, lags);
  out.lags_or_dof = lags;
  out.reject_at_5pct = out.p_value < 0.05;
  return out;
}

double mackinnon_p_value(double tau) {
  if (std::isnan(tau)) return std::numeric_limits<double>::quiet_NaN();
  if (tau > kTauMax) return 1.0;
  if (tau < kTauMin) return 0.0;
  double poly = 0.0;
  if (tau <= kTauStar) {
    for (int k = 2; k >= 0; --k) poly = poly * tau + kSmallP[k];
  } else {
    for (int k = 3; k >= 0; --k) poly = poly * tau + kLargeP[k];
  }
  return special::normal_cdf(poly);
}

AdfResult adf_test(const Eigen::VectorXd& y, const AdfOptions& options) {
  const Eigen::Index T = y.size();
  if (T < 30) throw Error(ErrorCode::TooShort, "ADF needs at least 30 observations, got " + std::to_string(T));
  if (!y.allFinite()) throw Error(ErrorCode::NonFiniteValue, "ADF input has non-finite values");
  const Eigen::VectorXd dy = y.tail(T - 1) - y.head(T - 1);
  require_non_degenerate(dy);

  int max_lag = options.max_lag;
  if (max_lag < 0) max_lag = static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
  // keep enough rows for the widest regression
  max_lag = std::min<int>(max_lag, static_cast<int>(T) / 2 - 3);
  max_lag = std::max(max_lag, 0);

  int lag = max_lag;
  if (options.autolag) {
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= max_lag; ++p) {
      AdfRegression r;
      try {
        r = adf_regression(y, dy, p, max_lag);
      } catch (const Error& e) {
        // exactly collinear lags (e.g. a noiseless recursion) are not candidates
        if (e.code() == ErrorCode::RankDeficientDesign) continue;
        throw;
      }
      const double aic = r.nobs * std::log(r.ssr / r.nobs) + 2.0 * r.ncoef;
      if (aic < best) {
        best = aic;
        lag = p;
      }
    }
  }
  const AdfRegression r = adf_regression(y, dy, lag, lag);
  AdfResult out;
  out.statistic = r.tau;
  out.p_value = mackinnon_p_value(r.tau);
  out.lags_or_dof = lag;
  out.used_lag = lag;
  out.nobs = r.nobs;
  out.reject_at_5pct = out.p_value < 0.05;
  return out;
}

std::vector<std::pair<double, double>> qq_data(const Eigen::VectorXd& x, bool standardize) {
  const Eigen::Index n = x.size();
  if (n < 10) throw Error(ErrorCode::TooShort, "QQ data needs at least 10 observations");
  require_non_degenerate(x);
  std::vector<double> sorted(x.data(), x.data() + n);
  std::sort(sorted.begin(), sorted.end());
  double mean = 0.0;
  double sd = 1.0;
  if (standardize) {
    mean = x.mean();
    sd = std::sqrt((x.array() - mean).square().sum() / static_cast<double>(n - 1));
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out.emplace_back(special::normal_quantile(p), (sorted[static_cast<std::size_t>(i)] - mean) / sd);
  }
  return out;
}

std::string DiagnosticsTable::to_text(const std::vector<std::string>& labels) const {
  std::string text = "Component";
  for (std::size_t i = 0; i < raw.size(); ++i)
    text += " | " + (i < labels.size() ? labels[i] : "P" + std::to_string(i + 1));
  text += '\n';
  const auto row = [&](const char* name, const std::vector<MomentSummary>& m, bool skew) {
    std::string line = name;
    char buf[32];
    for (const auto& s : m) {
      std::snprintf(buf, sizeof buf, " | %.2f", skew ? s.skewness : s.kurtosis);
      line += buf;
    }
    return line + '\n';
  };
  text += row("Skewness of Z", raw, true);
  text += row("Skewness of Z/V", scaled, true);
  text += row("Kurtosis of Z", raw, false);
  text += row("Kurtosis of Z/V", scaled, false);
  return text;
}

DiagnosticsTable diagnostics_table(const ArSvModel& model, const Eigen::MatrixXd& innovations,
                                   const Eigen::VectorXd& vol) {
  if (innovations.rows() != vol.size())
    throw Error(ErrorCode::MisalignedSeries, "innovations and volatility differ in length");
  if (innovations.cols() != model.dimension())
    throw Error(ErrorCode::MisalignedSeries, "innovation columns do not match model dimension");
  DiagnosticsTable table;
  for (Eigen::Index i = 0; i < innovations.cols(); ++i) {
    const Eigen::VectorXd z = innovations.col(i);
    table.raw.push_back(skew_kurt(z));
    table.scaled.push_back(skew_kurt(z.cwiseQuotient(vol)));
  }
  return table;
}

Eigen::MatrixXd scalar_ar_innovations(const Eigen::MatrixXd& scores) {
  Eigen::MatrixXd out(scores.rows() - 1, scores.cols());
  for (Eigen::Index i = 0; i < scores.cols(); ++i) out.col(i) = fit_scalar_ar(scores.col(i)).fit.residuals;
  return out;
}

}  // namespace ratesvol
