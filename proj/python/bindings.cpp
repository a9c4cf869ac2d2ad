#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cli.hpp"
#include "ratesvol/diagnose.hpp"
#include "ratesvol/error.hpp"
#include "ratesvol/estimate.hpp"
#include "ratesvol/ingest.hpp"
#include "ratesvol/json_io.hpp"
#include "ratesvol/returns.hpp"
#include "ratesvol/simulate.hpp"
#include "ratesvol/yieldpca.hpp"

namespace py = pybind11;
using namespace ratesvol;

namespace {

std::vector<std::string> date_strings(const std::vector<YearMonth>& dates) {
  std::vector<std::string> out;
  out.reserve(dates.size());
  for (const auto& d : dates) out.push_back(d.to_string());
  return out;
}

std::vector<YearMonth> parse_dates(const std::vector<std::string>& text) {
  std::vector<YearMonth> out;
  out.reserve(text.size());
  for (const auto& s : text) {
    auto d = YearMonth::parse(s);
    if (!d) throw Error(ErrorCode::ParseError, "bad date '" + s + "', expected YYYY-MM");
    out.push_back(*d);
  }
  return out;
}

TimeMode parse_mode(const std::string& mode) {
  if (mode == "discrete") return TimeMode::Discrete;
  if (mode == "continuous") return TimeMode::Continuous;
  throw Error(ErrorCode::InvalidArgument, "mode must be 'discrete' or 'continuous'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Yield-curve principal components with volatility-driven autoregression";

  static py::exception<Error> error(m, "RatesvolError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::class_<RatePanel>(m, "RatePanel")
      .def(py::init([](const std::vector<std::string>& dates, std::vector<double> maturities, Eigen::MatrixXd values) {
             RatePanel p{parse_dates(dates), std::move(maturities), std::move(values)};
             validate(p);
             return p;
           }),
           py::arg("dates"), py::arg("maturities"), py::arg("values"))
      .def_property_readonly("dates", [](const RatePanel& p) { return date_strings(p.dates); })
      .def_readonly("maturities", &RatePanel::maturities)
      .def_readonly("values", &RatePanel::values);

  py::class_<VolSeries>(m, "VolSeries")
      .def(py::init([](const std::vector<std::string>& dates, Eigen::VectorXd values) {
             return VolSeries{parse_dates(dates), std::move(values)};
           }),
           py::arg("dates"), py::arg("values"))
      .def_property_readonly("dates", [](const VolSeries& v) { return date_strings(v.dates); })
      .def_readonly("values", &VolSeries::values);

  m.def("load_rate_panel", [](const std::filesystem::path& path) { return load_rate_panel(path); }, py::arg("path"));
  m.def(
      "load_vol",
      [](const std::filesystem::path& path, const std::string& frequency) {
        if (frequency != "daily" && frequency != "monthly")
          throw Error(ErrorCode::InvalidArgument, "frequency must be 'daily' or 'monthly'");
        return load_vol(path, frequency == "daily" ? VolFrequency::Daily : VolFrequency::Monthly);
      },
      py::arg("path"), py::arg("frequency") = "daily");
  m.def(
      "align",
      [](const RatePanel& p, const VolSeries& v) {
        AlignedDataset a = align(p, v);
        return py::make_tuple(a.panel, a.vol);
      },
      py::arg("panel"), py::arg("vol"));

  py::class_<PcModel>(m, "PcModel")
      .def_readonly("maturities", &PcModel::maturities)
      .def_readonly("mean_rates", &PcModel::mean_rates)
      .def_readonly("loadings", &PcModel::loadings)
      .def_readonly("eigenvalues", &PcModel::eigenvalues)
      .def_readonly("variance_ratio", &PcModel::variance_ratio)
      .def_readonly("total_variance", &PcModel::total_variance)
      .def_readonly("scores", &PcModel::scores);
  py::class_<LoadingCurve>(m, "LoadingCurve")
      .def_readonly("gamma", &LoadingCurve::gamma)
      .def_readonly("mean", &LoadingCurve::mean)
      .def_readonly("max_month", &LoadingCurve::max_month);
  m.def("fit_pca", &fit_pca, py::arg("panel"), py::arg("components") = 3);
  m.def("interpolate_loadings", &interpolate_loadings, py::arg("pca"));
  m.def("project_scores", &project_scores, py::arg("pca"), py::arg("panel"));

  py::class_<OlsFit>(m, "OlsFit")
      .def_readonly("coefficients", &OlsFit::coefficients)
      .def_readonly("standard_errors", &OlsFit::standard_errors)
      .def_readonly("t_stats", &OlsFit::t_stats)
      .def_readonly("p_values", &OlsFit::p_values)
      .def_readonly("residuals", &OlsFit::residuals)
      .def_readonly("r_squared", &OlsFit::r_squared)
      .def_readonly("residual_std", &OlsFit::residual_std)
      .def_readonly("dof", &OlsFit::dof);
  py::class_<LogArFit>(m, "LogArFit")
      .def_readonly("alpha", &LogArFit::alpha)
      .def_readonly("beta", &LogArFit::beta)
      .def_readonly("sigma0", &LogArFit::sigma0)
      .def_readonly("fit", &LogArFit::fit);
  py::class_<ScalarArFit>(m, "ScalarArFit")
      .def_readonly("a", &ScalarArFit::a)
      .def_readonly("b", &ScalarArFit::b)
      .def_readonly("fit", &ScalarArFit::fit);
  py::class_<ArSvModel>(m, "ArSvModel")
      .def(py::init(&make_model), py::arg("alpha"), py::arg("beta"), py::arg("sigma0"), py::arg("a"), py::arg("B"),
           py::arg("c"), py::arg("vix_scaled"), py::arg("noise_scales"))
      .def_readonly("alpha", &ArSvModel::alpha)
      .def_readonly("beta", &ArSvModel::beta)
      .def_readonly("sigma0", &ArSvModel::sigma0)
      .def_readonly("a", &ArSvModel::a)
      .def_readonly("B", &ArSvModel::B)
      .def_readonly("c", &ArSvModel::c)
      .def_readonly("vix_scaled", &ArSvModel::vix_scaled)
      .def_readonly("noise_scales", &ArSvModel::noise_scales)
      .def_readonly("innovation_cov", &ArSvModel::innovation_cov)
      .def_property_readonly("dimension", &ArSvModel::dimension);
  py::class_<ArSvFit>(m, "ArSvFit")
      .def_readonly("model", &ArSvFit::model)
      .def_readonly("vol_fit", &ArSvFit::vol_fit)
      .def_readonly("row_fits", &ArSvFit::row_fits)
      .def_readonly("innovations", &ArSvFit::innovations);
  py::class_<StabilityReport>(m, "StabilityReport")
      .def_readonly("spectral_radius_B", &StabilityReport::spectral_radius_B)
      .def_readonly("eigenvalues_B", &StabilityReport::eigenvalues_B)
      .def_readonly("beta_in_unit", &StabilityReport::beta_in_unit)
      .def_readonly("stationary_ok", &StabilityReport::stationary_ok);

  m.def("ols", &ols, py::arg("design"), py::arg("response"));
  m.def("fit_log_ar", py::overload_cast<const Eigen::VectorXd&>(&fit_log_ar), py::arg("vol"));
  m.def("fit_scalar_ar", &fit_scalar_ar, py::arg("series"));
  m.def(
      "fit_arsv",
      [](const Eigen::MatrixXd& scores, const Eigen::VectorXd& vol, std::vector<bool> vix_scaled, bool diagonal_b,
         bool diagonal_cov) {
        ArSvOptions o;
        o.vix_scaled = std::move(vix_scaled);
        o.diagonal_b = diagonal_b;
        o.diagonal_cov = diagonal_cov;
        return fit_arsv(scores, vol, o);
      },
      py::arg("scores"), py::arg("vol"), py::arg("vix_scaled") = std::vector<bool>{}, py::arg("diagonal_b") = false,
      py::arg("diagonal_cov") = false);
  m.def("spectral_radius", &spectral_radius, py::arg("B"));
  m.def("check_stability", &check_stability, py::arg("model"));

  py::class_<TestResult>(m, "TestResult")
      .def_readonly("statistic", &TestResult::statistic)
      .def_readonly("p_value", &TestResult::p_value)
      .def_readonly("lags_or_dof", &TestResult::lags_or_dof)
      .def_readonly("reject_at_5pct", &TestResult::reject_at_5pct);
  py::class_<AdfResult, TestResult>(m, "AdfResult")
      .def_readonly("used_lag", &AdfResult::used_lag)
      .def_readonly("nobs", &AdfResult::nobs);
  py::class_<MomentSummary>(m, "MomentSummary")
      .def_readonly("mean", &MomentSummary::mean)
      .def_readonly("std", &MomentSummary::std)
      .def_readonly("skewness", &MomentSummary::skewness)
      .def_readonly("kurtosis", &MomentSummary::kurtosis);
  m.def(
      "adf_test",
      [](const Eigen::VectorXd& series, int max_lag, bool autolag) {
        AdfOptions o;
        o.max_lag = max_lag;
        o.autolag = autolag;
        return adf_test(series, o);
      },
      py::arg("series"), py::arg("max_lag") = -1, py::arg("autolag") = true);
  m.def("ljung_box", &ljung_box, py::arg("series"), py::arg("lags") = 10);
  m.def("skew_kurt", &skew_kurt, py::arg("series"));
  m.def("acf", [](const Eigen::VectorXd& s, int lags) { return acf(s, lags).rho; }, py::arg("series"),
        py::arg("max_lag"));
  m.def("scalar_ar_innovations", &scalar_ar_innovations, py::arg("scores"));

  py::class_<SimPath>(m, "SimPath")
      .def_readonly("times", &SimPath::times)
      .def_readonly("v", &SimPath::v)
      .def_readonly("x", &SimPath::x)
      .def("to_csv", &SimPath::to_csv);
  m.def(
      "simulate",
      [](const ArSvModel& model, const std::string& mode, double horizon, double h, std::uint64_t seed) {
        if (parse_mode(mode) == TimeMode::Discrete) return simulate_discrete(model, static_cast<long>(horizon), seed);
        return simulate_continuous(model, horizon, h, seed);
      },
      py::arg("model"), py::arg("mode") = "discrete", py::arg("horizon") = 1000.0, py::arg("h") = 1.0 / 12,
      py::arg("seed") = 0);
  m.def("to_continuous", &to_continuous, py::arg("model"));
  m.def("stationary_mean",
        [](const ArSvModel& model, const std::string& mode) {
          return parse_mode(mode) == TimeMode::Discrete ? stationary_mean_discrete(model)
                                                        : stationary_mean_continuous(model);
        },
        py::arg("model"), py::arg("mode") = "discrete");

  py::class_<LlnReport>(m, "LlnReport")
      .def_readonly("oracle_mean", &LlnReport::oracle_mean)
      .def_readonly("time_average", &LlnReport::time_average)
      .def_readonly("final_abs_error", &LlnReport::final_abs_error)
      .def_readonly("mc_stderr", &LlnReport::mc_stderr)
      .def_readonly("checkpoint_steps", &LlnReport::checkpoint_steps)
      .def_readonly("running_mean", &LlnReport::running_mean)
      .def_readonly("passed", &LlnReport::passed)
      .def_readonly("reps", &LlnReport::reps)
      .def_readonly("steps", &LlnReport::steps)
      .def("to_json", [](const LlnReport& r) { return dump_json(to_json(r)); });
  auto lln_options = [](const std::string& mode, double T, double h, int reps, std::uint64_t seed, unsigned threads) {
    LlnOptions o;
    o.mode = parse_mode(mode);
    o.T = T;
    o.h = h;
    o.reps = reps;
    o.seed = seed;
    o.threads = threads;
    return o;
  };
  m.def(
      "verify_lln",
      [lln_options](const ArSvModel& model, const std::string& mode, double T, double h, int reps, std::uint64_t seed,
                    unsigned threads) {
        const LlnOptions o = lln_options(mode, T, h, reps, seed, threads);
        py::gil_scoped_release release;
        return verify_lln(model, o);
      },
      py::arg("model"), py::arg("mode") = "discrete", py::arg("T") = 1e6, py::arg("h") = 1.0 / 12,
      py::arg("reps") = 8, py::arg("seed") = 0, py::arg("threads") = 0u);

  py::class_<GammaMatrix>(m, "GammaMatrix")
      .def_readonly("gamma", &GammaMatrix::gamma)
      .def_readonly("diff", &GammaMatrix::diff)
      .def_readonly("max_month", &GammaMatrix::max_month);
  py::class_<ReturnSeries>(m, "ReturnSeries")
      .def_readonly("maturity", &ReturnSeries::maturity)
      .def_property_readonly("dates", [](const ReturnSeries& s) { return date_strings(s.dates); })
      .def_readonly("exact", &ReturnSeries::exact)
      .def_readonly("approx", &ReturnSeries::approx);
  py::class_<CapmResult>(m, "CapmResult")
      .def_readonly("slope", &CapmResult::slope)
      .def_readonly("stderr", &CapmResult::stderr_slope)
      .def_readonly("l", &CapmResult::l)
      .def_readonly("l0", &CapmResult::l0)
      .def_readonly("theoretical", &CapmResult::theoretical)
      .def_readonly("n", &CapmResult::n);
  m.def("price_zero", &price_zero, py::arg("rate"), py::arg("tau"));
  m.def("gamma_matrix", &gamma_matrix, py::arg("curve"));
  m.def(
      "return_series",
      [](const PcModel& pca, const RatePanel& panel, int l) {
        const LoadingCurve curve = interpolate_loadings(pca);
        return return_series(panel.dates, curve, gamma_matrix(curve), project_scores(pca, panel), l);
      },
      py::arg("pca"), py::arg("panel"), py::arg("l"));
  m.def("term_premium", &term_premium, py::arg("returns_l"), py::arg("returns_short"));
  m.def("capm_slope", &capm_slope, py::arg("tp_l"), py::arg("tp_benchmark"), py::arg("l"), py::arg("l0"));
  m.def(
      "returns_lln",
      [lln_options](const ArSvModel& model, const GammaMatrix& gamma, int l, const std::string& mode, double T,
                    double h, int reps, std::uint64_t seed, unsigned threads) {
        const LlnOptions o = lln_options(mode, T, h, reps, seed, threads);
        py::gil_scoped_release release;
        return returns_lln(model, gamma, l, o);
      },
      py::arg("model"), py::arg("gamma"), py::arg("l"), py::arg("mode") = "discrete", py::arg("T") = 1e6,
      py::arg("h") = 1.0 / 12, py::arg("reps") = 8, py::arg("seed") = 0, py::arg("threads") = 0u);

  m.def("save_model", [](const std::filesystem::path& path, const ArSvModel& model) { save_model(path.string(), model); },
        py::arg("path"), py::arg("model"));
  m.def("load_model", [](const std::filesystem::path& path) { return load_model(path.string()).model; }, py::arg("path"));
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a ratesvol command; returns (exit_code, stdout, stderr).");
}
