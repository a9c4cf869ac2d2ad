#include "ratesvol/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

#include "ratesvol/error.hpp"
#include "ratesvol/format.hpp"
#include "ratesvol/linalg.hpp"

namespace ratesvol {
namespace {

constexpr double kStateLimit = 1e12;
constexpr double kMaxSteps = 1e9;

double xi(const ArSvModel& model, Eigen::Index i, double v) {
  return model.vix_scaled[static_cast<std::size_t>(i)] ? v : 1.0;
}

bool continuous_stationary(const ArSvModel& model) {
  if (!(model.beta > 0.0)) return false;
  for (const auto& lambda : linalg::eigenvalues(model.B))
    if (!(lambda.real() > 0.0)) return false;
  return true;
}

long step_count(const LlnOptions& o) {
  if (!(o.T > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulation length must be positive");
  double n = o.T;
  if (o.mode == TimeMode::Continuous) {
    if (!(o.h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step h must be positive");
    n = o.T / o.h;
  }
  if (n > kMaxSteps) throw Error(ErrorCode::InvalidArgument, "more than 1e9 steps requested");
  return std::max(1L, std::lround(n));
}

std::vector<long> checkpoint_grid(long n, int count) {
  std::vector<long> grid;
  count = std::max(count, 1);
  for (int j = 1; j <= count; ++j) {
    const double frac = static_cast<double>(j) / count;
    const long s = std::max(1L, std::lround(std::pow(static_cast<double>(n), frac)));
    if (grid.empty() || s > grid.back()) grid.push_back(s);
  }
  if (grid.back() != n) grid.push_back(n);
  return grid;
}

// power of V in xi_i: 1 on volatility-scaled rows, 0 elsewhere
Eigen::VectorXd xi_exponents(const ArSvModel& model) {
  Eigen::VectorXd m(model.dimension());
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = model.vix_scaled[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  return m;
}

}  // namespace

std::string SimPath::to_csv() const {
  std::string out = "time,v";
  for (Eigen::Index i = 0; i < x.cols(); ++i) out += ",x" + std::to_string(i + 1);
  out += '\n';
  for (Eigen::Index r = 0; r < times.size(); ++r) {
    out += format_shortest(times(r));
    out += ',';
    out += format_shortest(v(r));
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
      out += ',';
      out += format_shortest(x(r, i));
    }
    out += '\n';
  }
  return out;
}

void require_stationary(const ArSvModel& model, TimeMode mode) {
  model.validate();
  if (mode == TimeMode::Discrete) {
    const StabilityReport s = check_stability(model);
    if (!s.beta_in_unit)
      throw Error(ErrorCode::Unstable, "log-volatility coefficient beta = " + format_shortest(model.beta) +
                                           " is outside (0, 1)");
    if (!s.stationary_ok)
      throw Error(ErrorCode::Unstable, "spectral radius of B is " + format_shortest(s.spectral_radius_B) + " >= 1");
  } else {
    if (!(model.beta > 0.0))
      throw Error(ErrorCode::Unstable, "continuous log-volatility needs beta > 0");
    if (!continuous_stationary(model))
      throw Error(ErrorCode::Unstable, "B has an eigenvalue with nonpositive real part");
  }
}

double stationary_vol_moment(const ArSvModel& model, TimeMode mode, double u) {
  const double s00 = model.innovation_cov(0, 0);
  double mu = 0.0, var = 0.0;
  if (mode == TimeMode::Discrete) {
    if (!(std::abs(model.beta) < 1.0)) throw Error(ErrorCode::Unstable, "log-volatility is not stationary");
    mu = model.alpha / (1.0 - model.beta);
    var = s00 / (1.0 - model.beta * model.beta);
  } else {
    if (!(model.beta > 0.0)) throw Error(ErrorCode::Unstable, "log-volatility is not stationary");
    mu = model.alpha / model.beta;
    var = s00 / (2.0 * model.beta);
  }
  return std::exp(u * mu + 0.5 * var * u * u);
}

Eigen::VectorXd stationary_mean_discrete(const ArSvModel& model) {
  require_stationary(model, TimeMode::Discrete);
  const Eigen::Index d = model.dimension();
  const double m1 = stationary_vol_moment(model, TimeMode::Discrete, 1.0);
  Eigen::VectorXd rhs = model.a + model.c * m1;
  // V(t) shares Z0(t), so a scaled row's noise V(t) Z_i(t) has mean Sigma_0i E[V] (Stein's lemma)
  for (Eigen::Index i = 0; i < d; ++i)
    if (model.vix_scaled[static_cast<std::size_t>(i)]) rhs(i) += model.innovation_cov(0, i + 1) * m1;
  const Eigen::MatrixXd I_B = Eigen::MatrixXd::Identity(d, d) - model.B;
  return I_B.fullPivLu().solve(rhs);
}

Eigen::VectorXd stationary_mean_continuous(const ArSvModel& model) {
  require_stationary(model, TimeMode::Continuous);
  const double m1 = stationary_vol_moment(model, TimeMode::Continuous, 1.0);
  return model.B.fullPivLu().solve(model.a + model.c * m1);
}

ArSvModel to_continuous(const ArSvModel& discrete) {
  discrete.validate();
  ArSvModel m = discrete;
  const Eigen::Index d = m.dimension();
  m.B = Eigen::MatrixXd::Identity(d, d) - discrete.B;
  m.beta = 1.0 - discrete.beta;
  return m;
}

InitState default_init(const ArSvModel& model, TimeMode mode) {
  model.validate();
  InitState init;
  double log_v0 = 0.0;
  if (mode == TimeMode::Discrete && std::abs(model.beta) < 1.0) log_v0 = model.alpha / (1.0 - model.beta);
  if (mode == TimeMode::Continuous && model.beta > 0.0) log_v0 = model.alpha / model.beta;
  init.v0 = std::exp(log_v0);
  init.x0 = Eigen::VectorXd::Zero(model.dimension());
  try {
    init.x0 = mode == TimeMode::Discrete ? stationary_mean_discrete(model) : stationary_mean_continuous(model);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Unstable) throw;
  }
  return init;
}

PathEngine::PathEngine(const ArSvModel& model, TimeMode mode, double h, std::uint64_t seed, std::uint64_t stream,
                       const std::optional<InitState>& init, InnovationLaw law)
    : model_(model), mode_(mode), h_(h), draw_(law, derive_stream_seed(seed, stream)) {
  model.validate();
  const Eigen::Index d = model.dimension();
  chol_ = linalg::psd_cholesky(model.innovation_cov);
  e_.resize(d + 1);
  z_.resize(d + 1);
  next_.resize(d);

  const InitState start = init ? *init : default_init(model, mode);
  if (!(start.v0 > 0.0) || !std::isfinite(start.v0))
    throw Error(ErrorCode::InvalidArgument, "initial volatility must be positive and finite");
  if (start.x0.size() != d) throw Error(ErrorCode::InvalidArgument, "initial state has the wrong dimension");
  if (!start.x0.allFinite()) throw Error(ErrorCode::InvalidArgument, "initial state is not finite");
  log_v_ = std::log(start.v0);
  x_ = start.x0;

  if (mode == TimeMode::Continuous) {
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidArgument, "step h must be positive");
    const double rho = spectral_radius(model.B);
    if (h * rho > 0.5)
      throw Error(ErrorCode::StepTooLarge, "h * spectral_radius(B) = " + format_shortest(h * rho) + " exceeds 0.5");
    const double beta = model.beta;
    const double s00 = model.innovation_cov(0, 0);
    decay_ = std::exp(-beta * h);
    double var = 0.0;
    if (beta != 0.0) {
      drift_ = model.alpha / beta * (1.0 - decay_);
      var = s00 * -std::expm1(-2.0 * beta * h) / (2.0 * beta);
    } else {
      drift_ = model.alpha * h;
      var = s00 * h;
    }
    // scale the unit-time draw Z0 ~ N(0, Sigma00) to the exact transition sd
    vol_sd_ = s00 > 0.0 ? std::sqrt(var / s00) : 0.0;
    sqrt_h_ = std::sqrt(h);
  }
}

void PathEngine::step() {
  const Eigen::Index d = x_.size();
  for (Eigen::Index k = 0; k <= d; ++k) e_(k) = draw_();
  z_.noalias() = chol_ * e_;
  if (mode_ == TimeMode::Discrete) {
    log_v_ = model_.alpha + model_.beta * log_v_ + z_(0);
    const double v = std::exp(log_v_);
    next_.noalias() = model_.B * x_;
    for (Eigen::Index i = 0; i < d; ++i) next_(i) += model_.a(i) + model_.c(i) * v + xi(model_, i, v) * z_(i + 1);
  } else {
    const double v = std::exp(log_v_);
    next_.noalias() = -(model_.B * x_);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double drift = next_(i) + model_.a(i) + model_.c(i) * v;
      next_(i) = x_(i) + drift * h_ + xi(model_, i, v) * sqrt_h_ * z_(i + 1);
    }
    log_v_ = decay_ * log_v_ + drift_ + vol_sd_ * z_(0);
  }
  x_.swap(next_);
  ++step_;
  const double x_norm = x_.size() ? x_.cwiseAbs().maxCoeff() : 0.0;
  if (!std::isfinite(log_v_) || log_v_ > std::log(kStateLimit) || log_v_ < -700.0 || !(x_norm <= kStateLimit))
    throw Error(ErrorCode::NonFiniteState, "state left the finite range at step " + std::to_string(step_));
}

SimPath simulate_discrete(const ArSvModel& model, long steps, std::uint64_t seed,
                          const std::optional<InitState>& init, InnovationLaw law) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "need at least one step");
  PathEngine engine(model, TimeMode::Discrete, 1.0, seed, 0, init, law);
  SimPath path;
  path.seed = seed;
  path.times = Eigen::VectorXd::LinSpaced(steps + 1, 0.0, static_cast<double>(steps));
  path.v.resize(steps + 1);
  path.x.resize(steps + 1, model.dimension());
  path.v(0) = engine.v();
  path.x.row(0) = engine.x().transpose();
  for (long t = 1; t <= steps; ++t) {
    engine.step();
    path.v(t) = engine.v();
    path.x.row(t) = engine.x().transpose();
  }
  return path;
}

SimPath simulate_continuous(const ArSvModel& model, double horizon, double h, std::uint64_t seed,
                            const std::optional<InitState>& init, InnovationLaw law) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "step h must be positive");
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  if (horizon / h > kMaxSteps) throw Error(ErrorCode::InvalidArgument, "horizon / h exceeds 1e9 steps");
  const long n = std::max(1L, std::lround(horizon / h));
  PathEngine engine(model, TimeMode::Continuous, h, seed, 0, init, law);
  SimPath path;
  path.seed = seed;
  path.times.resize(n + 1);
  path.v.resize(n + 1);
  path.x.resize(n + 1, model.dimension());
  for (long k = 0; k <= n; ++k) {
    if (k > 0) engine.step();
    path.times(k) = static_cast<double>(k) * h;
    path.v(k) = engine.v();
    path.x.row(k) = engine.x().transpose();
  }
  return path;
}

unsigned resolve_threads(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RATESVOL_THREADS")) {
    const auto cap = parse_double(env);
    if (cap && *cap >= 1.0) n = std::min(n, static_cast<unsigned>(*cap));
  }
  return std::max(1u, n);
}

TimeAverage time_average(const ArSvModel& model, const LlnOptions& options, int outputs, const Functional& f) {
  model.validate();
  if (options.reps < 1) throw Error(ErrorCode::InvalidArgument, "need at least one replication");
  if (outputs < 1) throw Error(ErrorCode::InvalidArgument, "functional needs at least one output");
  const long n = step_count(options);
  const int batches = static_cast<int>(std::clamp<long>(options.batches, 1, n));
  const std::vector<long> grid = checkpoint_grid(n, options.checkpoints);
  const int reps = options.reps;
  const Eigen::Index d = model.dimension();
  const double h = options.mode == TimeMode::Continuous ? options.h : 1.0;

  struct RepResult {
    Eigen::VectorXd mean;
    Eigen::MatrixXd batch_means;  // batches x outputs
    Eigen::MatrixXd running;      // grid x outputs
    Eigen::VectorXd terminal;
    std::exception_ptr error;
  };
  std::vector<RepResult> results(static_cast<std::size_t>(reps));

  const auto run_rep = [&](int rep) {
    RepResult& r = results[static_cast<std::size_t>(rep)];
    try {
      PathEngine engine(model, options.mode, h, options.seed, static_cast<std::uint64_t>(rep), std::nullopt,
                        options.law);
      Eigen::VectorXd prev(d);
      Eigen::VectorXd value(outputs), total = Eigen::VectorXd::Zero(outputs), batch = Eigen::VectorXd::Zero(outputs);
      r.batch_means.resize(batches, outputs);
      r.running.resize(static_cast<Eigen::Index>(grid.size()), outputs);
      std::size_t next_cp = 0;
      int b = 0;
      long batch_end = n / batches;
      long batch_start = 0;
      for (long k = 0; k < n; ++k) {
        prev = engine.x();
        const double v_prev = engine.v();
        engine.step();
        f(StepState{v_prev, engine.v(), prev, engine.x()}, value);
        total += value;
        batch += value;
        const long done = k + 1;
        if (done == batch_end) {
          r.batch_means.row(b) = (batch / static_cast<double>(batch_end - batch_start)).transpose();
          batch.setZero();
          ++b;
          batch_start = batch_end;
          batch_end = (static_cast<long>(b) + 1) * n / batches;
        }
        if (next_cp < grid.size() && done == grid[next_cp]) {
          r.running.row(static_cast<Eigen::Index>(next_cp)) = (total / static_cast<double>(done)).transpose();
          ++next_cp;
        }
      }
      r.mean = total / static_cast<double>(n);
      r.terminal = engine.x();
    } catch (...) {
      r.error = std::current_exception();
    }
  };

  const unsigned workers = std::min<unsigned>(resolve_threads(options.threads), static_cast<unsigned>(reps));
  if (workers <= 1) {
    for (int rep = 0; rep < reps; ++rep) run_rep(rep);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int rep = next++; rep < reps; rep = next++) run_rep(rep);
      });
    for (auto& t : pool) t.join();
  }
  for (const auto& r : results)
    if (r.error) std::rethrow_exception(r.error);

  // ordered reduction keeps results independent of the thread schedule
  TimeAverage out;
  out.steps = n;
  out.mean = Eigen::VectorXd::Zero(outputs);
  out.running_mean = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.size()), outputs);
  out.terminal_x.resize(reps, d);
  Eigen::MatrixXd all_batches(static_cast<Eigen::Index>(reps) * batches, outputs);
  for (int rep = 0; rep < reps; ++rep) {
    const RepResult& r = results[static_cast<std::size_t>(rep)];
    out.mean += r.mean;
    out.running_mean += r.running;
    out.terminal_x.row(rep) = r.terminal.transpose();
    all_batches.middleRows(static_cast<Eigen::Index>(rep) * batches, batches) = r.batch_means;
  }
  out.mean /= reps;
  out.running_mean /= reps;
  out.checkpoint_steps.resize(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) out.checkpoint_steps(static_cast<Eigen::Index>(j)) = static_cast<double>(grid[j]);

  const Eigen::Index m = all_batches.rows();
  out.mc_stderr = Eigen::VectorXd::Zero(outputs);
  if (m > 1) {
    const Eigen::RowVectorXd centre = all_batches.colwise().mean();
    const Eigen::MatrixXd dev = all_batches.rowwise() - centre;
    const Eigen::RowVectorXd var = dev.array().square().colwise().sum() / static_cast<double>(m - 1);
    out.mc_stderr = (var.array() / static_cast<double>(m)).sqrt().transpose();
  }
  return out;
}

bool lln_pass(const Eigen::VectorXd& error, const Eigen::VectorXd& mc_stderr, double atol) {
  for (Eigen::Index i = 0; i < error.size(); ++i)
    if (!(error(i) < 4.0 * mc_stderr(i) + atol)) return false;
  return true;
}

LlnReport verify_lln(const ArSvModel& model, const LlnOptions& options) {
  require_stationary(model, options.mode);
  const Eigen::Index d = model.dimension();
  LlnReport report;
  report.mode = options.mode;
  report.oracle_mean =
      options.mode == TimeMode::Discrete ? stationary_mean_discrete(model) : stationary_mean_continuous(model);

  // discrete averages X(1..T); continuous takes left points for the Riemann sum
  const bool left = options.mode == TimeMode::Continuous;
  const TimeAverage avg = time_average(model, options, static_cast<int>(d) + 1,
                                       [d, left](const StepState& s, Eigen::Ref<Eigen::VectorXd> out) {
                                         const Eigen::VectorXd& x = left ? s.x_prev : s.x;
                                         out.head(d) = x;
                                         out(d) = x.squaredNorm();
                                       });
  report.checkpoint_steps = avg.checkpoint_steps;
  report.running_mean = avg.running_mean.leftCols(d);
  report.time_average = avg.mean.head(d);
  report.mc_stderr = avg.mc_stderr.head(d);
  report.final_abs_error = (report.time_average - report.oracle_mean).cwiseAbs();
  report.atol = options.atol;
  report.passed = lln_pass(report.final_abs_error, report.mc_stderr, options.atol);
  report.sq_norm_average = avg.mean(d);
  report.sq_norm_stderr = avg.mc_stderr(d);
  report.terminal_x = avg.terminal_x;
  report.reps = options.reps;
  report.steps = avg.steps;
  report.seed = options.seed;

  if (options.mode == TimeMode::Continuous && model.c.cwiseAbs().maxCoeff() == 0.0) {
    // c = 0 leaves X Gaussian given V; its stationary covariance solves
    // B S + S B^T = D with D_ij = Sigma_ij E[xi_i xi_j].
    const Eigen::VectorXd s = xi_exponents(model);
    Eigen::MatrixXd D(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        D(i, j) = model.innovation_cov(i + 1, j + 1) *
                  stationary_vol_moment(model, TimeMode::Continuous, s(i) + s(j));
    const Eigen::MatrixXd S = linalg::solve_lyapunov(model.B, D);
    const double oracle = report.oracle_mean.squaredNorm() + S.trace();
    report.sq_norm_oracle = oracle;
    // Euler-Maruyama inflates the stationary variance by O(h rho(B))
    const double allowance = options.h * spectral_radius(model.B) * std::abs(oracle);
    report.sq_norm_ok = std::abs(report.sq_norm_average - oracle) < 4.0 * report.sq_norm_stderr + allowance + options.atol;
  }
  return report;
}

VolMomentReport verify_vol_moments(const ArSvModel& model, const LlnOptions& options,
                                   const Eigen::VectorXd& exponents) {
  model.validate();
  if (exponents.size() == 0) throw Error(ErrorCode::InvalidArgument, "no exponents given");
  VolMomentReport report;
  report.exponents = exponents;
  report.oracle.resize(exponents.size());
  for (Eigen::Index k = 0; k < exponents.size(); ++k)
    report.oracle(k) = stationary_vol_moment(model, options.mode, exponents(k));
  const Eigen::ArrayXd u = exponents.array();
  const bool left = options.mode == TimeMode::Continuous;
  const TimeAverage avg = time_average(model, options, static_cast<int>(exponents.size()),
                                       [&u, left](const StepState& s, Eigen::Ref<Eigen::VectorXd> out) {
                                         out = (u * std::log(left ? s.v_prev : s.v)).exp().matrix();
                                       });
  report.estimate = avg.mean;
  report.mc_stderr = avg.mc_stderr;
  report.passed = lln_pass((report.estimate - report.oracle).cwiseAbs(), report.mc_stderr, options.atol);
  return report;
}

}  // namespace ratesvol
