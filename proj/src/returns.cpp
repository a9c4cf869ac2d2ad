#include "ratesvol/returns.hpp"

#include <cmath>

#include "ratesvol/error.hpp"
#include "ratesvol/format.hpp"

namespace ratesvol {
namespace {

void check_maturity(int l, int lowest, int max_month) {
  if (l < lowest || l > max_month)
    throw Error(ErrorCode::MaturityOutOfRange, "maturity " + std::to_string(l) + " months outside [" +
                                                   std::to_string(lowest) + ", " + std::to_string(max_month) + "]");
}

void check_scores(const Eigen::MatrixXd& scores, Eigen::Index d) {
  if (scores.cols() != d)
    throw Error(ErrorCode::MisalignedSeries, "scores have " + std::to_string(scores.cols()) +
                                                 " columns but the curve has " + std::to_string(d) + " components");
  if (scores.rows() < 2) throw Error(ErrorCode::TooShort, "returns need at least two dates");
}

double log1p_rate(double percent) {
  const double r = percent / 100.0;
  if (!(r > -1.0)) throw Error(ErrorCode::InvalidRate, "reconstructed rate " + format_shortest(percent) + "% <= -100%");
  return std::log1p(r);
}

}  // namespace

double price_zero(double rate, double tau) {
  if (!(rate > -1.0) || !std::isfinite(rate)) throw Error(ErrorCode::InvalidRate, "rate must exceed -1");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::InvalidArgument, "tau must be nonnegative");
  return std::pow(1.0 + rate, -tau);
}

GammaMatrix gamma_matrix(const LoadingCurve& curve) {
  const int L = curve.max_month;
  if (L < 1 || curve.gamma.cols() != L + 1 || curve.mean.size() != L + 1)
    throw Error(ErrorCode::InvalidArgument, "loading curve must cover months 0..max_month with max_month >= 1");
  const Eigen::Index d = curve.gamma.rows();
  GammaMatrix g;
  g.max_month = L;
  g.gamma.resize(d, L + 1);
  g.diff.resize(d, L + 1);
  g.slope.resize(d, L + 1);
  g.carry.resize(L + 1);
  g.carry_slope.resize(L + 1);
  // (l/12) f_l and its derivative, with f' taken on the segment ending at l
  const auto fill = [L](const auto& f, auto&& level, auto&& diff, auto&& slope) {
    for (int l = 0; l <= L; ++l) {
      level(l) = l / 12.0 * f(l);
      diff(l) = l == 0 ? 0.0 : level(l) - (l - 1) / 12.0 * f(l - 1);
      const double df = l == 0 ? f(1) - f(0) : f(l) - f(l - 1);
      slope(l) = (f(l) + l * df) / 12.0;
    }
  };
  for (Eigen::Index i = 0; i < d; ++i)
    fill(curve.gamma.row(i), g.gamma.row(i), g.diff.row(i), g.slope.row(i));
  Eigen::VectorXd level(L + 1);
  fill(curve.mean, level, g.carry, g.carry_slope);
  return g;
}

Eigen::VectorXd exact_returns(const LoadingCurve& curve, const Eigen::MatrixXd& scores, int l) {
  check_maturity(l, 1, curve.max_month);
  check_scores(scores, curve.gamma.rows());
  const double tau = l / 12.0;
  Eigen::VectorXd q(scores.rows() - 1);
  for (Eigen::Index t = 1; t < scores.rows(); ++t) {
    const double shorter_now = curve_rate(curve, scores.row(t).transpose(), l - 1);
    const double held_before = curve_rate(curve, scores.row(t - 1).transpose(), l);
    q(t - 1) = -(tau - 1.0 / 12.0) * log1p_rate(shorter_now) + tau * log1p_rate(held_before);
  }
  return q;
}

Eigen::VectorXd approx_returns(const Eigen::MatrixXd& scores, const GammaMatrix& gamma, int l) {
  check_maturity(l, 1, gamma.max_month);
  check_scores(scores, gamma.components());
  const Eigen::Index n = scores.rows() - 1;
  const Eigen::VectorXd q = scores.topRows(n) * gamma.gamma.col(l) - scores.bottomRows(n) * gamma.gamma.col(l - 1);
  return (q.array() + gamma.carry(l)) / 100.0;
}

Eigen::VectorXd continuous_returns(const Eigen::MatrixXd& path_x, double h, const GammaMatrix& gamma, int l) {
  check_maturity(l, 0, gamma.max_month);
  check_scores(path_x, gamma.components());
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step h must be positive");
  const Eigen::Index n = path_x.rows() - 1;
  const Eigen::MatrixXd dx = path_x.bottomRows(n) - path_x.topRows(n);
  const Eigen::VectorXd q = h * (path_x.topRows(n) * gamma.slope.col(l)) - dx * gamma.gamma.col(l);
  return (q.array() + h * gamma.carry_slope(l)) / 100.0;
}

std::string ReturnSeries::to_csv() const {
  std::string out = "date,exact,approx\n";
  for (std::size_t t = 0; t < dates.size(); ++t) {
    const auto k = static_cast<Eigen::Index>(t);
    out += dates[t].to_string() + ',' + format_shortest(exact(k)) + ',' + format_shortest(approx(k)) + '\n';
  }
  return out;
}

ReturnSeries return_series(const std::vector<YearMonth>& dates, const LoadingCurve& curve, const GammaMatrix& gamma,
                           const Eigen::MatrixXd& scores, int l) {
  if (dates.size() != static_cast<std::size_t>(scores.rows()))
    throw Error(ErrorCode::MisalignedSeries, "dates and scores differ in length");
  ReturnSeries s;
  s.maturity = l;
  s.exact = exact_returns(curve, scores, l);
  s.approx = approx_returns(scores, gamma, l);
  s.dates.assign(dates.begin() + 1, dates.end());
  return s;
}

Eigen::VectorXd term_premium(const Eigen::VectorXd& returns_l, const Eigen::VectorXd& returns_short) {
  if (returns_l.size() != returns_short.size())
    throw Error(ErrorCode::MisalignedSeries, "return series have lengths " + std::to_string(returns_l.size()) +
                                                 " and " + std::to_string(returns_short.size()));
  return returns_l - returns_short;
}

CapmResult capm_slope(const Eigen::VectorXd& tp_l, const Eigen::VectorXd& tp_benchmark, int l, int l0) {
  if (tp_l.size() != tp_benchmark.size()) throw Error(ErrorCode::MisalignedSeries, "term premium series differ in length");
  const Eigen::Index n = tp_l.size();
  if (n < 2) throw Error(ErrorCode::TooShort, "CAPM slope needs at least two observations");
  if (!tp_l.allFinite() || !tp_benchmark.allFinite())
    throw Error(ErrorCode::NonFiniteValue, "term premium series contain non-finite values");
  const double sxx = tp_benchmark.squaredNorm();
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateSeries, "benchmark term premium is identically zero");
  CapmResult out;
  out.slope = tp_benchmark.dot(tp_l) / sxx;
  const double ssr = (tp_l - out.slope * tp_benchmark).squaredNorm();
  out.stderr_slope = std::sqrt(ssr / static_cast<double>(n - 1) / sxx);
  out.l = l;
  out.l0 = l0;
  out.theoretical = static_cast<double>(l) / static_cast<double>(l0);
  out.n = static_cast<long>(n);
  return out;
}

LlnReport returns_lln(const ArSvModel& model, const GammaMatrix& gamma, int l, const LlnOptions& options) {
  require_stationary(model, options.mode);
  const Eigen::Index d = model.dimension();
  if (gamma.components() != d)
    throw Error(ErrorCode::InvalidArgument, "Gamma matrix has " + std::to_string(gamma.components()) +
                                                " components, model has " + std::to_string(d));
  const bool continuous = options.mode == TimeMode::Continuous;
  check_maturity(l, continuous ? 0 : 1, gamma.max_month);

  LlnReport report;
  report.mode = options.mode;
  Eigen::VectorXd weights;
  Functional f;
  if (continuous) {
    weights = gamma.slope.col(l);
    const Eigen::VectorXd level = gamma.gamma.col(l);
    const double h = options.h;
    f = [weights, level, h](const StepState& s, Eigen::Ref<Eigen::VectorXd> out) {
      out(0) = (weights.dot(s.x_prev) - level.dot(s.x - s.x_prev) / h) / 100.0;
    };
    report.oracle_mean = Eigen::VectorXd::Constant(1, weights.dot(stationary_mean_continuous(model)) / 100.0);
  } else {
    weights = gamma.diff.col(l);
    const Eigen::VectorXd held = gamma.gamma.col(l);
    const Eigen::VectorXd rolled = gamma.gamma.col(l - 1);
    f = [held, rolled](const StepState& s, Eigen::Ref<Eigen::VectorXd> out) {
      out(0) = (held.dot(s.x_prev) - rolled.dot(s.x)) / 100.0;
    };
    report.oracle_mean = Eigen::VectorXd::Constant(1, weights.dot(stationary_mean_discrete(model)) / 100.0);
  }
  const TimeAverage avg = time_average(model, options, 1, f);
  report.checkpoint_steps = avg.checkpoint_steps;
  report.running_mean = avg.running_mean;
  report.time_average = avg.mean;
  report.mc_stderr = avg.mc_stderr;
  report.final_abs_error = (avg.mean - report.oracle_mean).cwiseAbs();
  report.atol = options.atol;
  report.passed = lln_pass(report.final_abs_error, report.mc_stderr, options.atol);
  report.terminal_x = avg.terminal_x;
  report.reps = options.reps;
  report.steps = avg.steps;
  report.seed = options.seed;
  return report;
}

}  // namespace ratesvol
