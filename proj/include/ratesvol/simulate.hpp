#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "ratesvol/estimate.hpp"
#include "ratesvol/rng.hpp"

namespace ratesvol {

/// Jointly simulated (V, X). Discrete paths have times 0..T, continuous paths k*h.
struct SimPath {
  Eigen::VectorXd times;
  Eigen::VectorXd v;
  Eigen::MatrixXd x;  // rows match times
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Delimited text: header "time,v,x1..xd" then one row per time.
  std::string to_csv() const;
};

struct InitState {
  double v0 = 1.0;
  Eigen::VectorXd x0;
};

enum class TimeMode { Discrete, Continuous };

/// One path's state machine. Draws (Z0, Z1..Zd) jointly with covariance Sigma through
/// its PSD Cholesky factor; `stream` selects the derived RNG stream under `seed`.
class PathEngine {
 public:
  PathEngine(const ArSvModel& model, TimeMode mode, double h, std::uint64_t seed, std::uint64_t stream,
             const std::optional<InitState>& init, InnovationLaw law = {});

  /// Discrete: one step of the recursion. Continuous: exact log-vol transition over h
  /// and one Euler-Maruyama step of X, with the diffusion evaluated at the step start.
  void step();

  double v() const noexcept { return std::exp(log_v_); }
  double log_v() const noexcept { return log_v_; }
  const Eigen::VectorXd& x() const noexcept { return x_; }
  long steps_taken() const noexcept { return step_; }

 private:
  const ArSvModel& model_;
  TimeMode mode_;
  double h_;
  Eigen::MatrixXd chol_;
  InnovationSampler draw_;
  Eigen::VectorXd e_;
  Eigen::VectorXd z_;
  Eigen::VectorXd x_;
  Eigen::VectorXd next_;
  double log_v_ = 0.0;
  long step_ = 0;
  // continuous-mode transition constants
  double decay_ = 0.0;
  double drift_ = 0.0;
  double vol_sd_ = 0.0;
  double sqrt_h_ = 0.0;
};

/// Default starting point: ln V at its stationary mean, X at the stationary mean of the
/// mode when it exists, else zeros.
InitState default_init(const ArSvModel& model, TimeMode mode);

SimPath simulate_discrete(const ArSvModel& model, long steps, std::uint64_t seed,
                          const std::optional<InitState>& init = std::nullopt, InnovationLaw law = {});

/// Throws StepTooLarge when h * spectral_radius(B) > 0.5.
SimPath simulate_continuous(const ArSvModel& model, double horizon, double h, std::uint64_t seed,
                            const std::optional<InitState>& init = std::nullopt, InnovationLaw law = {});

/// (I - B)^{-1} (a + c m1 + k m1), m1 = exp(mu + s^2/2) with mu = alpha/(1-beta),
/// s^2 = Sigma00/(1-beta^2), and k_i = Sigma_{0i} on volatility-scaled rows (0 elsewhere):
/// the contemporaneous V(t) Z_i(t) term has that mean when Z0 and Z_i are correlated.
Eigen::VectorXd stationary_mean_discrete(const ArSvModel& model);

/// B^{-1} (a + c m1), m1 = exp(alpha/beta + Sigma00/(4 beta)).
Eigen::VectorXd stationary_mean_continuous(const ArSvModel& model);

/// Stationary E[V^u] = exp(u mu + 0.5 s^2 u^2) of the log-vol process in either mode.
double stationary_vol_moment(const ArSvModel& model, TimeMode mode, double u);

/// Monthly discrete fit mapped to the SDE with a one-month time unit: B -> I - B,
/// beta -> 1 - beta, everything else unchanged.
ArSvModel to_continuous(const ArSvModel& discrete);

/// Throws Unstable unless the mode's stationarity conditions hold.
void require_stationary(const ArSvModel& model, TimeMode mode);

/// Worker count: `requested` (0 = hardware concurrency), capped by RATESVOL_THREADS.
unsigned resolve_threads(unsigned requested);

struct LlnOptions {
  TimeMode mode = TimeMode::Discrete;
  double T = 1e6;      // discrete steps, or continuous horizon in model time units
  double h = 1.0 / 12.0;  // continuous step
  int reps = 8;
  std::uint64_t seed = 0;
  int batches = 20;      // batch means per replication for the standard error
  unsigned threads = 0;
  double atol = 1e-10;
  int checkpoints = 120;  // log-spaced samples of the running mean
  InnovationLaw law{};
};

/// Time averages of an arbitrary functional f(V, X) (k outputs) across replications.
struct TimeAverage {
  Eigen::VectorXd mean;             // k, averaged over replications
  Eigen::VectorXd mc_stderr;        // k, batch-means Monte Carlo standard error
  Eigen::VectorXd checkpoint_steps; // n_j
  Eigen::MatrixXd running_mean;     // checkpoints x k, replication-averaged (1/n_j) sum f
  Eigen::MatrixXd terminal_x;       // reps x d, state after the last step
  long steps = 0;
};

/// State on both sides of one step.
struct StepState {
  double v_prev;
  double v;
  const Eigen::VectorXd& x_prev;
  const Eigen::VectorXd& x;
};

using Functional = std::function<void(const StepState& s, Eigen::Ref<Eigen::VectorXd> out)>;

/// Averages f over the N steps of each replication (N = T, or T/h in continuous mode).
/// A left-point functional of the state gives the Riemann sum of (1/T) int f dt.
TimeAverage time_average(const ArSvModel& model, const LlnOptions& options, int outputs, const Functional& f);

struct LlnReport {
  TimeMode mode = TimeMode::Discrete;
  Eigen::VectorXd checkpoint_steps;
  Eigen::MatrixXd running_mean;
  Eigen::VectorXd oracle_mean;
  Eigen::VectorXd time_average;
  Eigen::VectorXd final_abs_error;
  Eigen::VectorXd mc_stderr;
  double atol = 0.0;
  bool passed = false;
  // time average of |X|^2; oracle only when it has a closed form (continuous, c = 0)
  double sq_norm_average = 0.0;
  double sq_norm_stderr = 0.0;
  std::optional<double> sq_norm_oracle;
  std::optional<bool> sq_norm_ok;
  Eigen::MatrixXd terminal_x;
  int reps = 0;
  long steps = 0;
  std::uint64_t seed = 0;
};

/// passed <=> every |time_average - oracle| < 4 mc_stderr + atol.
bool lln_pass(const Eigen::VectorXd& error, const Eigen::VectorXd& mc_stderr, double atol);

LlnReport verify_lln(const ArSvModel& model, const LlnOptions& options);

struct VolMomentReport {
  Eigen::VectorXd exponents;
  Eigen::VectorXd estimate;
  Eigen::VectorXd oracle;
  Eigen::VectorXd mc_stderr;
  bool passed = false;
};

/// Time averages of V^u against the stationary lognormal moments.
VolMomentReport verify_vol_moments(const ArSvModel& model, const LlnOptions& options,
                                   const Eigen::VectorXd& exponents);

}  // namespace ratesvol
