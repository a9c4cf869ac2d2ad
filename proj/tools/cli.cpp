#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ratesvol/diagnose.hpp"
#include "ratesvol/error.hpp"
#include "ratesvol/estimate.hpp"
#include "ratesvol/format.hpp"
#include "ratesvol/ingest.hpp"
#include "ratesvol/json_io.hpp"
#include "ratesvol/returns.hpp"
#include "ratesvol/simulate.hpp"
#include "ratesvol/yieldpca.hpp"

namespace ratesvol::cli {
namespace {

namespace fs = std::filesystem;

// Files are staged here and written only after a command has fully succeeded.
class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {}
  void add(const std::string& name, std::string text) { files_.emplace_back(name, std::move(text)); }
  void add_json(const std::string& name, const Json& j) { add(name, dump_json(j)); }
  void commit(std::ostream& out) const {
    for (const auto& [name, text] : files_) {
      const std::string path = (fs::path(dir_) / name).string();
      write_text_file(path, text);
      out << "wrote " << path << '\n';
    }
  }

 private:
  std::string dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

struct DataOptions {
  std::string rates;
  std::string vix;
  std::string vix_frequency = "monthly";
};

struct FitOptions {
  DataOptions data;
  int d = 3;
  std::vector<int> vix_scaled;
  bool diagonal_b = false;
  bool diagonal_cov = false;
  std::string out = "out";
};

struct DiagnoseOptions {
  DataOptions data;
  std::string model;
  int component = 0;  // 0 = all
  int lags = 10;
  int acf_lags = 24;
  std::string out = "out";
};

struct SimulateOptions {
  std::string model;
  std::string mode = "discrete";
  double T = 1e6;
  double h = 1.0 / 12.0;
  int reps = 8;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  long path_steps = 1200;
  bool no_map = false;
  bool allow_unstable = false;
  std::string out = "out";
};

struct ReturnsOptions {
  std::string rates;
  std::string model;
  std::vector<int> maturities{120};
  int benchmark = 120;
  int short_l = 1;
  std::optional<std::uint64_t> seed;
  std::string mode = "discrete";
  double T = 1e6;
  double h = 1.0 / 12.0;
  int reps = 8;
  unsigned threads = 0;
  bool no_map = false;
  std::string out = "out";
};

TimeMode parse_mode(const std::string& mode) {
  if (mode == "discrete") return TimeMode::Discrete;
  if (mode == "continuous") return TimeMode::Continuous;
  throw Error(ErrorCode::InvalidArgument, "mode must be 'discrete' or 'continuous', got '" + mode + "'");
}

VolFrequency parse_frequency(const std::string& f) {
  if (f == "monthly") return VolFrequency::Monthly;
  if (f == "daily") return VolFrequency::Daily;
  throw Error(ErrorCode::InvalidArgument, "vix frequency must be 'monthly' or 'daily', got '" + f + "'");
}

void add_data_flags(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--rates", o.rates, "Zero-coupon rate panel (CSV, percent)")->required();
  cmd->add_option("--vix", o.vix, "Volatility index series (CSV)")->required();
  cmd->add_option("--vix-frequency", o.vix_frequency, "Volatility file frequency: monthly or daily")
      ->capture_default_str();
}

AlignedDataset load_data(const DataOptions& o, LoadReport* rates_report) {
  const RatePanel panel = load_rate_panel(o.rates, {}, rates_report);
  const VolSeries vol = load_vol(o.vix, parse_frequency(o.vix_frequency));
  return align(panel, vol);
}

std::vector<std::string> row_names(Eigen::Index i, Eigen::Index d, bool diagonal_b) {
  std::vector<std::string> names{"a" + std::to_string(i + 1)};
  for (Eigen::Index j = 0; j < d; ++j)
    if (!diagonal_b || j == i) names.push_back("b" + std::to_string(i + 1) + std::to_string(j + 1));
  names.push_back("c" + std::to_string(i + 1));
  return names;
}

std::string coefficient_table(const OlsFit& fit, const std::vector<std::string>& names) {
  std::ostringstream s;
  char line[160];
  std::snprintf(line, sizeof line, "  %-8s %14s %12s %10s %10s\n", "coef", "estimate", "stderr", "t", "p");
  s << line;
  for (Eigen::Index k = 0; k < fit.coefficients.size(); ++k) {
    std::snprintf(line, sizeof line, "  %-8s %14.6g %12.4g %10.3f %10.4f\n", names[static_cast<std::size_t>(k)].c_str(),
                  fit.coefficients(k), fit.standard_errors(k), fit.t_stats(k), fit.p_values(k));
    s << line;
  }
  return s.str();
}

std::string matrix_csv(const std::string& header, const std::vector<std::string>& first_col, const Eigen::MatrixXd& m) {
  std::string text = header + '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    text += first_col[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < m.cols(); ++c) text += ',' + format_shortest(m(r, c));
    text += '\n';
  }
  return text;
}

std::vector<std::string> date_strings(const std::vector<YearMonth>& dates) {
  std::vector<std::string> out;
  for (const auto& d : dates) out.push_back(d.to_string());
  return out;
}

std::vector<std::string> integer_strings(const Eigen::VectorXd& v) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(format_shortest(v(i)));
  return out;
}

std::string indexed_header(const std::string& first, const std::string& prefix, Eigen::Index d) {
  std::string h = first;
  for (Eigen::Index i = 0; i < d; ++i) h += ',' + prefix + std::to_string(i + 1);
  return h;
}

int cmd_fit(const FitOptions& o, std::ostream& out) {
  LoadReport report;
  const AlignedDataset data = load_data(o.data, &report);
  const Eigen::Index M = data.panel.cols();
  if (o.d < 1 || o.d > M)
    throw Error(ErrorCode::InvalidArgument, "--d must lie in 1.." + std::to_string(M) + ", got " + std::to_string(o.d));
  std::vector<bool> mask(static_cast<std::size_t>(o.d), false);
  for (int k : o.vix_scaled) {
    if (k < 1 || k > o.d)
      throw Error(ErrorCode::InvalidArgument, "--vix-scaled index " + std::to_string(k) + " outside 1.." + std::to_string(o.d));
    mask[static_cast<std::size_t>(k - 1)] = true;
  }

  const PcModel pca = fit_pca(data.panel, o.d);
  const LoadingCurve curve = interpolate_loadings(pca);
  ArSvOptions fit_opts;
  fit_opts.vix_scaled = mask;
  fit_opts.diagonal_b = o.diagonal_b;
  fit_opts.diagonal_cov = o.diagonal_cov;
  const ArSvFit fit = fit_arsv(pca.scores, data.vol.values, fit_opts);
  const StabilityReport stability = check_stability(fit.model);

  Json rep;
  rep["schema"] = kSchemaVersion;
  rep["data"] = {{"rows", data.panel.rows()},
                 {"first", data.panel.dates.front().to_string()},
                 {"last", data.panel.dates.back().to_string()},
                 {"rate_rows_dropped", report.rows_dropped}};
  rep["pca"] = {{"eigenvalues", to_json(pca.eigenvalues)}, {"variance_ratio", to_json(pca.variance_ratio)},
                {"total_variance", pca.total_variance}};
  rep["log_vol"] = to_json(fit.vol_fit.fit, {"alpha", "beta"});
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < o.d; ++i) {
    Json r;
    r["component"] = i + 1;
    r["vix_scaled"] = static_cast<bool>(mask[static_cast<std::size_t>(i)]);
    r["fit"] = to_json(fit.row_fits[static_cast<std::size_t>(i)], row_names(i, o.d, o.diagonal_b));
    rows.push_back(r);
  }
  rep["components"] = rows;
  rep["stability"] = to_json(stability);

  Outputs files(o.out);
  files.add_json("model.json", model_to_json(fit.model, &pca));
  files.add_json("fit_report.json", rep);
  Eigen::MatrixXd curves(curve.max_month + 1, o.d + 1);
  curves.leftCols(o.d) = curve.gamma.transpose();
  curves.col(o.d) = curve.mean;
  files.add("loadings.csv", matrix_csv(indexed_header("month", "gamma", o.d) + ",mean",
                                       integer_strings(Eigen::VectorXd::LinSpaced(curve.max_month + 1, 0, curve.max_month)),
                                       curves));
  Eigen::MatrixXd sv(pca.scores.rows(), o.d + 1);
  sv.leftCols(o.d) = pca.scores;
  sv.col(o.d) = data.vol.values;
  files.add("scores.csv", matrix_csv(indexed_header("date", "P", o.d) + ",V", date_strings(data.panel.dates), sv));

  out << "fitted " << o.d << " component(s) on " << data.panel.rows() << " months ("
      << data.panel.dates.front().to_string() << " to " << data.panel.dates.back().to_string() << ")\n";
  out << "ln V(t) = alpha + beta ln V(t-1) + Z0(t)\n" << coefficient_table(fit.vol_fit.fit, {"alpha", "beta"});
  for (Eigen::Index i = 0; i < o.d; ++i) {
    out << "P" << i + 1 << (mask[static_cast<std::size_t>(i)] ? " (innovations scaled by V)\n" : "\n");
    out << coefficient_table(fit.row_fits[static_cast<std::size_t>(i)], row_names(i, o.d, o.diagonal_b));
  }
  out << "spectral radius of B: " << format_shortest(stability.spectral_radius_B)
      << (stability.stationary_ok ? " (stationary)\n" : " (NOT stationary)\n");
  files.commit(out);
  return kOk;
}

const PcModel& require_pca(const ModelDocument& doc) {
  if (!doc.pca) throw Error(ErrorCode::InvalidModel, "model file carries no PCA block; refit with 'ratesvol fit'");
  return *doc.pca;
}

int cmd_diagnose(const DiagnoseOptions& o, std::ostream& out) {
  const ModelDocument doc = load_model(o.model);
  const AlignedDataset data = load_data(o.data, nullptr);
  const PcModel& pca = require_pca(doc);
  const Eigen::MatrixXd scores = project_scores(pca, data.panel);
  const Eigen::Index d = scores.cols();
  if (o.component < 0 || o.component > d)
    throw Error(ErrorCode::InvalidArgument, "--component must lie in 1.." + std::to_string(d));
  std::vector<Eigen::Index> comps;
  for (Eigen::Index i = 0; i < d; ++i)
    if (o.component == 0 || o.component == i + 1) comps.push_back(i);

  const Eigen::VectorXd log_v = data.vol.log_values();
  const LogArFit vol_fit = fit_log_ar(data.vol.values);
  const Eigen::MatrixXd innovations = scalar_ar_innovations(scores);
  const Eigen::VectorXd v_now = data.vol.values.tail(innovations.rows());

  Json diag;
  diag["schema"] = kSchemaVersion;
  diag["log_vol"] = {{"adf", to_json(adf_test(log_v))},
                     {"ljung_box_residuals", to_json(ljung_box(vol_fit.fit.residuals, o.lags))},
                     {"ljung_box_abs_residuals", to_json(ljung_box(vol_fit.fit.residuals.cwiseAbs(), o.lags))},
                     {"moments_residuals", to_json(skew_kurt(vol_fit.fit.residuals))}};
  Json comp_json = Json::array();
  Outputs files(o.out);
  DiagnosticsTable table;
  std::vector<std::string> labels;
  for (Eigen::Index i : comps) {
    const std::string tag = std::to_string(i + 1);
    const Eigen::VectorXd z = innovations.col(i);
    const Eigen::VectorXd zv = z.cwiseQuotient(v_now);
    table.raw.push_back(skew_kurt(z));
    table.scaled.push_back(skew_kurt(zv));
    labels.push_back("P" + tag);
    Json c;
    c["component"] = i + 1;
    c["adf_scores"] = to_json(adf_test(scores.col(i)));
    c["ljung_box_z"] = to_json(ljung_box(z, o.lags));
    c["ljung_box_z_over_v"] = to_json(ljung_box(zv, o.lags));
    c["moments_z"] = to_json(table.raw.back());
    c["moments_z_over_v"] = to_json(table.scaled.back());
    comp_json.push_back(c);

    const AcfResult a1 = acf(z, o.acf_lags), a2 = acf(z.cwiseAbs(), o.acf_lags);
    const AcfResult a3 = acf(zv, o.acf_lags), a4 = acf(zv.cwiseAbs(), o.acf_lags);
    Eigen::MatrixXd acf_rows(o.acf_lags, 5);
    acf_rows << a1.rho, a2.rho, a3.rho, a4.rho, Eigen::VectorXd::Constant(o.acf_lags, a1.band);
    files.add("acf_P" + tag + ".csv",
              matrix_csv("lag,z,abs_z,z_over_v,abs_z_over_v,band",
                         integer_strings(Eigen::VectorXd::LinSpaced(o.acf_lags, 1, o.acf_lags)), acf_rows));
    const auto q1 = qq_data(z), q2 = qq_data(zv);
    std::string qq = "theoretical,z,z_over_v\n";
    for (std::size_t k = 0; k < q1.size(); ++k)
      qq += format_shortest(q1[k].first) + ',' + format_shortest(q1[k].second) + ',' + format_shortest(q2[k].second) + '\n';
    files.add("qq_P" + tag + ".csv", qq);
  }
  diag["components"] = comp_json;
  const std::string text = table.to_text(labels);
  files.add("table1.txt", text);
  files.add_json("diagnostics.json", diag);
  out << text;
  files.commit(out);
  return kOk;
}

ArSvModel simulation_model(const ArSvModel& fitted, TimeMode mode, bool no_map) {
  return mode == TimeMode::Continuous && !no_map ? to_continuous(fitted) : fitted;
}

LlnOptions lln_options(TimeMode mode, double T, double h, int reps, std::uint64_t seed, unsigned threads) {
  LlnOptions l;
  l.mode = mode;
  l.T = T;
  l.h = h;
  l.reps = reps;
  l.seed = seed;
  l.threads = threads;
  return l;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const TimeMode mode = parse_mode(o.mode);
  const ModelDocument doc = load_model(o.model);
  const ArSvModel model = simulation_model(doc.model, mode, o.no_map);
  const std::uint64_t seed = *o.seed;
  bool stationary = true;
  try {
    require_stationary(model, mode);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Unstable || !o.allow_unstable) throw;
    stationary = false;
    out << "warning: " << e.what() << "; emitting paths without the LLN check\n";
  }

  Outputs files(o.out);
  const SimPath path = mode == TimeMode::Discrete
                           ? simulate_discrete(model, o.path_steps, seed)
                           : simulate_continuous(model, static_cast<double>(o.path_steps) * o.h, o.h, seed);
  files.add("path.csv", path.to_csv());

  if (stationary) {
    const LlnOptions lo = lln_options(mode, o.T, o.h, o.reps, seed, o.threads);
    const LlnReport lln = verify_lln(model, lo);
    Json j = to_json(lln);
    if (mode == TimeMode::Continuous) {
      Eigen::VectorXd u(4);
      u << -2.0, -1.0, 1.0, 2.0;
      j["vol_moments"] = to_json(verify_vol_moments(model, lo, u));
    }
    files.add_json("lln.json", j);
    files.add("running_mean.csv", matrix_csv(indexed_header("step", "x", model.dimension()),
                                             integer_strings(lln.checkpoint_steps), lln.running_mean));
    out << "LLN (" << o.mode << ", " << lln.reps << " x " << lln.steps << " steps): "
        << (lln.passed ? "passed" : "FAILED") << '\n';
    for (Eigen::Index i = 0; i < lln.oracle_mean.size(); ++i)
      out << "  x" << i + 1 << ": average " << format_shortest(lln.time_average(i)) << ", oracle "
          << format_shortest(lln.oracle_mean(i)) << ", stderr " << format_shortest(lln.mc_stderr(i)) << '\n';
  }
  files.commit(out);
  return kOk;
}

int cmd_returns(const ReturnsOptions& o, std::ostream& out) {
  const ModelDocument doc = load_model(o.model);
  const PcModel& pca = require_pca(doc);
  const LoadingCurve curve = interpolate_loadings(pca);
  const GammaMatrix gamma = gamma_matrix(curve);
  std::vector<int> wanted = o.maturities;
  wanted.push_back(o.benchmark);
  wanted.push_back(o.short_l);
  for (int l : wanted)
    if (l < 1 || l > curve.max_month)
      throw Error(ErrorCode::MaturityOutOfRange, "maturity " + std::to_string(l) + " months outside [1, " +
                                                     std::to_string(curve.max_month) + "]");
  const RatePanel panel = load_rate_panel(o.rates);
  const Eigen::MatrixXd scores = project_scores(pca, panel);

  std::map<int, ReturnSeries> series;
  for (int l : wanted)
    if (!series.count(l)) series.emplace(l, return_series(panel.dates, curve, gamma, scores, l));
  const ReturnSeries& shorter = series.at(o.short_l);
  const Eigen::VectorXd tp_bench = term_premium(series.at(o.benchmark).exact, shorter.exact);

  Outputs files(o.out);
  Json capm = Json::array();
  for (int l : o.maturities) {
    const ReturnSeries& s = series.at(l);
    files.add("returns_l" + std::to_string(l) + ".csv", s.to_csv());
    ReturnSeries tp = s;
    tp.exact = term_premium(s.exact, shorter.exact);
    tp.approx = term_premium(s.approx, shorter.approx);
    files.add("term_premium_l" + std::to_string(l) + ".csv", tp.to_csv());
    const CapmResult r = capm_slope(tp.exact, tp_bench, l, o.benchmark);
    capm.push_back(to_json(r));
    out << "l=" << l << ": mean exact " << format_shortest(s.exact.mean()) << ", mean approx "
        << format_shortest(s.approx.mean()) << ", CAPM slope vs l0=" << o.benchmark << ": "
        << format_shortest(r.slope) << " (stderr " << format_shortest(r.stderr_slope) << ", one-factor value "
        << format_shortest(r.theoretical) << ")\n";
  }
  files.add_json("capm.json", Json{{"schema", kSchemaVersion}, {"short", o.short_l}, {"results", capm}});

  if (o.seed) {
    const TimeMode mode = parse_mode(o.mode);
    const ArSvModel model = simulation_model(doc.model, mode, o.no_map);
    const LlnOptions lo = lln_options(mode, o.T, o.h, o.reps, *o.seed, o.threads);
    Json lln = Json::array();
    for (int l : o.maturities) {
      const LlnReport r = returns_lln(model, gamma, l, lo);
      Json j = to_json(r);
      j["maturity"] = l;
      lln.push_back(j);
      out << "returns LLN l=" << l << ": " << (r.passed ? "passed" : "FAILED") << " (average "
          << format_shortest(r.time_average(0)) << ", oracle " << format_shortest(r.oracle_mean(0)) << ")\n";
    }
    files.add_json("lln_returns.json", Json{{"schema", kSchemaVersion}, {"results", lln}});
  }
  files.commit(out);
  return kOk;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Expands "--config FILE" after a subcommand into flags. Lines are "key = value" with key a
// flag name without dashes; '#' starts a comment; flags take true/false. Keys already on the
// command line are skipped so the command line wins.
std::vector<std::string> merge_config(CLI::App& app, const std::vector<std::string>& args) {
  if (args.empty()) return args;
  CLI::App* cmd = app.get_subcommand_no_throw(args.front());
  if (cmd == nullptr) return args;
  std::vector<std::string> rest;
  std::optional<std::string> file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!file) return args;
  std::ifstream in(*file);
  if (!in) throw CLI::FileError::Missing(*file);
  auto given = [&](const std::string& flag) {
    return std::any_of(rest.begin(), rest.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> extra;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    view = strip(view.substr(0, view.find('#')));
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw CLI::ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'", CLI::ExitCodes::ConversionError);
    const std::string key(strip(view.substr(0, eq)));
    std::string value(strip(view.substr(eq + 1)));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    const std::string flag = "--" + key;
    CLI::Option* op = cmd->get_option_no_throw(flag);
    if (op == nullptr || key == "config" || key == "help")
      throw CLI::ParseError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'", CLI::ExitCodes::ExtrasError);
    if (given(flag)) continue;
    if (op->get_expected_min() == 0) {
      if (value == "true" || value == "1") {
        extra.push_back(flag);
      } else if (value != "false" && value != "0") {
        throw CLI::ParseError("config line " + std::to_string(line_no) + ": flag '" + key + "' takes true or false",
                              CLI::ExitCodes::ConversionError);
      }
    } else {
      extra.push_back(flag);
      extra.push_back(value);
    }
  }
  rest.insert(rest.begin() + 1, extra.begin(), extra.end());
  return rest;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Input:
      return kInputError;
    case ErrorKind::Estimation:
      return kEstimationError;
    case ErrorKind::Stability:
      return kStabilityError;
  }
  return kInputError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ratesvol: yield-curve principal components with volatility-driven autoregression"};
  app.require_subcommand(1);
  // '-h' stays free for the Euler step flag
  app.set_help_flag("--help", "Print this help message and exit");
  app.footer("Exit codes: 0 ok, 2 input error, 3 estimation error, 4 stability error.\n"
             "Each command accepts --config FILE with 'key = value' lines (flag names without dashes);\n"
             "flags given on the command line take precedence. RATESVOL_THREADS caps worker threads.");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate the PCA and the autoregressive stochastic-volatility model");
  add_data_flags(fit_cmd, fit.data);
  fit_cmd->add_option("--d", fit.d, "Number of principal components")->capture_default_str();
  fit_cmd->add_option("--vix-scaled", fit.vix_scaled, "1-based components whose innovations scale with V")
      ->delimiter(',');
  fit_cmd->add_flag("--diagonal-b", fit.diagonal_b, "Restrict B to a diagonal matrix");
  fit_cmd->add_flag("--diagonal-cov", fit.diagonal_cov, "Zero the off-diagonal innovation covariance");
  fit_cmd->add_option("--out", fit.out, "Output directory")->capture_default_str();

  DiagnoseOptions diag;
  auto* diag_cmd = app.add_subcommand("diagnose", "Unit-root, white-noise and normality diagnostics");
  add_data_flags(diag_cmd, diag.data);
  diag_cmd->add_option("--model", diag.model, "Model file written by 'fit'")->required();
  diag_cmd->add_option("--component", diag.component, "Restrict outputs to one component (1-based)");
  diag_cmd->add_option("--lags", diag.lags, "Ljung-Box lags")->capture_default_str();
  diag_cmd->add_option("--acf-lags", diag.acf_lags, "Autocorrelation lags exported")->capture_default_str();
  diag_cmd->add_option("--out", diag.out, "Output directory")->capture_default_str();

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the model and check time averages against the oracle");
  sim_cmd->add_option("--model", sim.model, "Model file written by 'fit'")->required();
  sim_cmd->add_option("--mode", sim.mode, "discrete or continuous")->capture_default_str();
  sim_cmd->add_option("--T", sim.T, "Steps per replication (discrete) or horizon in months (continuous)")
      ->capture_default_str();
  sim_cmd->add_option("--h", sim.h, "Euler step in months (continuous)")->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Independent replications")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "RNG seed")->required();
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();
  sim_cmd->add_option("--path-steps", sim.path_steps, "Length of the exported sample path")->capture_default_str();
  sim_cmd->add_flag("--no-map", sim.no_map, "Use the model file as continuous parameters without B -> I - B");
  sim_cmd->add_flag("--allow-unstable", sim.allow_unstable, "Emit paths for a nonstationary model, skipping the LLN check");
  sim_cmd->add_option("--out", sim.out, "Output directory")->capture_default_str();

  ReturnsOptions ret;
  auto* ret_cmd = app.add_subcommand("returns", "Bond returns, term premia and the CAPM maturity slope");
  ret_cmd->add_option("--rates", ret.rates, "Zero-coupon rate panel (CSV, percent)")->required();
  ret_cmd->add_option("--model", ret.model, "Model file written by 'fit'")->required();
  ret_cmd->add_option("--l", ret.maturities, "Maturities in months, comma separated")->delimiter(',')->capture_default_str();
  ret_cmd->add_option("--benchmark", ret.benchmark, "Benchmark maturity l0 for the CAPM slope")->capture_default_str();
  ret_cmd->add_option("--short", ret.short_l, "Short maturity defining the term premium")->capture_default_str();
  ret_cmd->add_option("--seed", ret.seed, "RNG seed; when given, the returns LLN is simulated");
  ret_cmd->add_option("--mode", ret.mode, "LLN time mode: discrete or continuous")->capture_default_str();
  ret_cmd->add_option("--T", ret.T, "LLN length, as for simulate")->capture_default_str();
  ret_cmd->add_option("--h", ret.h, "Euler step in months (continuous)")->capture_default_str();
  ret_cmd->add_option("--reps", ret.reps, "LLN replications")->capture_default_str();
  ret_cmd->add_option("--threads", ret.threads, "Worker threads (0 = all cores)")->capture_default_str();
  ret_cmd->add_flag("--no-map", ret.no_map, "Use the model file as continuous parameters without B -> I - B");
  ret_cmd->add_option("--out", ret.out, "Output directory")->capture_default_str();

  std::string config_path;
  for (auto* cmd : {fit_cmd, diag_cmd, sim_cmd, ret_cmd}) {
    cmd->set_help_flag("--help", "Print this help message and exit");
    cmd->add_option("--config", config_path, "key = value configuration file");
  }

  try {
    const std::vector<std::string> merged = merge_config(app, args);
    std::vector<std::string> reversed(merged.rbegin(), merged.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, out);
    if (*diag_cmd) return cmd_diagnose(diag, out);
    if (*sim_cmd) return cmd_simulate(sim, out);
    if (*ret_cmd) return cmd_returns(ret, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace ratesvol::cli
