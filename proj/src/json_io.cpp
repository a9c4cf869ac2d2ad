#include "ratesvol/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ratesvol/error.hpp"
#include "ratesvol/format.hpp"

namespace ratesvol {
namespace {

void dump_into(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_into(it.value(), out, indent + 2);
      }
      out += '\n' + close_pad + '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric rows stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && (e.is_number() || e.is_boolean() || e.is_null());
      if (flat) {
        out += '[';
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          dump_into(j[k], out, indent);
        }
        out += ']';
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out += pad;
        dump_into(j[k], out, indent + 2);
      }
      out += '\n' + close_pad + ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      // JSON has no non-finite numbers
      out += std::isfinite(v) ? format_17(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorCode::InvalidModel, std::string("model document lacks '") + key + "'");
  return j.at(key);
}

double number(const Json& j) {
  if (j.is_null()) return std::nan("");
  if (!j.is_number()) throw Error(ErrorCode::InvalidModel, "expected a number, got " + j.dump());
  return j.get<double>();
}

}  // namespace

std::string dump_json(const Json& value) {
  std::string out;
  dump_into(value, out, 0);
  out += '\n';
  return out;
}

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
  return a;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidModel, "expected an array, got " + j.dump());
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = number(j[k]);
  return v;
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidModel, "expected a nested array");
  if (j.empty()) return {};
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw Error(ErrorCode::InvalidModel, "ragged matrix in model document");
    m.row(static_cast<Eigen::Index>(r)) = vector_from_json(j[r]).transpose();
  }
  return m;
}

Json model_to_json(const ArSvModel& model, const PcModel* pca) {
  model.validate();
  Json j;
  j["schema"] = kSchemaVersion;
  j["model_version"] = kModelVersion;
  j["dimension"] = model.dimension();
  j["log_vol"] = {{"alpha", model.alpha}, {"beta", model.beta}, {"sigma0", model.sigma0}};
  j["a"] = to_json(model.a);
  j["B"] = to_json(model.B);
  j["c"] = to_json(model.c);
  Json scaled = Json::array();
  for (bool s : model.vix_scaled) scaled.push_back(s);
  j["vix_scaled"] = scaled;
  j["noise_scales"] = to_json(model.noise_scales);
  j["innovation_cov"] = to_json(model.innovation_cov);
  if (pca) {
    Json p;
    p["maturities"] = to_json(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
        pca->maturities.data(), static_cast<Eigen::Index>(pca->maturities.size()))));
    p["mean_rates"] = to_json(pca->mean_rates);
    p["loadings"] = to_json(pca->loadings);
    p["eigenvalues"] = to_json(pca->eigenvalues);
    p["variance_ratio"] = to_json(pca->variance_ratio);
    p["total_variance"] = pca->total_variance;
    j["pca"] = p;
  }
  return j;
}

ModelDocument model_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidModel, "model document must be a JSON object");
  const int version = field(j, "model_version").get<int>();
  if (version != kModelVersion)
    throw Error(ErrorCode::InvalidModel, "unsupported model_version " + std::to_string(version));
  ModelDocument doc;
  ArSvModel& m = doc.model;
  const Json& lv = field(j, "log_vol");
  m.alpha = number(field(lv, "alpha"));
  m.beta = number(field(lv, "beta"));
  m.sigma0 = number(field(lv, "sigma0"));
  m.a = vector_from_json(field(j, "a"));
  m.B = matrix_from_json(field(j, "B"));
  m.c = vector_from_json(field(j, "c"));
  for (const auto& s : field(j, "vix_scaled")) {
    if (!s.is_boolean()) throw Error(ErrorCode::InvalidModel, "vix_scaled entries must be booleans");
    m.vix_scaled.push_back(s.get<bool>());
  }
  m.noise_scales = vector_from_json(field(j, "noise_scales"));
  m.innovation_cov = matrix_from_json(field(j, "innovation_cov"));
  m.validate();
  if (j.contains("pca")) {
    const Json& p = j.at("pca");
    PcModel pc;
    const Eigen::VectorXd mats = vector_from_json(field(p, "maturities"));
    pc.maturities.assign(mats.data(), mats.data() + mats.size());
    pc.mean_rates = vector_from_json(field(p, "mean_rates"));
    pc.loadings = matrix_from_json(field(p, "loadings"));
    pc.eigenvalues = vector_from_json(field(p, "eigenvalues"));
    pc.variance_ratio = vector_from_json(field(p, "variance_ratio"));
    pc.total_variance = number(field(p, "total_variance"));
    if (pc.loadings.rows() != m.dimension() || pc.loadings.cols() != mats.size() || pc.mean_rates.size() != mats.size())
      throw Error(ErrorCode::InvalidModel, "PCA block shapes disagree with the model");
    doc.pca = std::move(pc);
  }
  return doc;
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::FileNotFound, "failed writing " + path);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

void save_model(const std::string& path, const ArSvModel& model, const PcModel* pca) {
  write_text_file(path, dump_json(model_to_json(model, pca)));
}

ModelDocument load_model(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    return model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidModel, path + ": " + e.what());
  }
}

Json to_json(const OlsFit& fit, const std::vector<std::string>& names) {
  Json coefs = Json::array();
  for (Eigen::Index k = 0; k < fit.coefficients.size(); ++k) {
    Json c;
    c["name"] = static_cast<std::size_t>(k) < names.size() ? names[static_cast<std::size_t>(k)] : "x" + std::to_string(k);
    c["estimate"] = fit.coefficients(k);
    c["stderr"] = fit.standard_errors(k);
    c["t"] = fit.t_stats(k);
    c["p_value"] = fit.p_values(k);
    coefs.push_back(c);
  }
  Json j;
  j["coefficients"] = coefs;
  j["r_squared"] = fit.r_squared;
  j["residual_std"] = fit.residual_std;
  j["dof"] = fit.dof;
  j["nobs"] = fit.residuals.size();
  return j;
}

Json to_json(const TestResult& r) {
  return {{"statistic", r.statistic}, {"p_value", r.p_value}, {"lags", r.lags_or_dof},
          {"reject_at_5pct", r.reject_at_5pct}};
}

Json to_json(const AdfResult& r) {
  Json j = to_json(static_cast<const TestResult&>(r));
  j["used_lag"] = r.used_lag;
  j["nobs"] = r.nobs;
  return j;
}

Json to_json(const MomentSummary& m) {
  return {{"mean", m.mean}, {"std", m.std}, {"skewness", m.skewness}, {"kurtosis", m.kurtosis}};
}

Json to_json(const StabilityReport& s) {
  Json eig = Json::array();
  for (const auto& z : s.eigenvalues_B) eig.push_back({{"re", z.real()}, {"im", z.imag()}});
  return {{"spectral_radius_B", s.spectral_radius_B}, {"eigenvalues_B", eig}, {"beta_in_unit", s.beta_in_unit},
          {"stationary_ok", s.stationary_ok}};
}

Json to_json(const LlnReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["mode"] = r.mode == TimeMode::Discrete ? "discrete" : "continuous";
  j["seed"] = r.seed;
  j["reps"] = r.reps;
  j["steps"] = r.steps;
  j["oracle_mean"] = to_json(r.oracle_mean);
  j["time_average"] = to_json(r.time_average);
  j["final_abs_error"] = to_json(r.final_abs_error);
  j["mc_stderr"] = to_json(r.mc_stderr);
  j["atol"] = r.atol;
  j["passed"] = r.passed;
  if (r.mode == TimeMode::Continuous) {
    Json sq;
    sq["average"] = r.sq_norm_average;
    sq["mc_stderr"] = r.sq_norm_stderr;
    sq["oracle"] = r.sq_norm_oracle ? Json(*r.sq_norm_oracle) : Json(nullptr);
    sq["within_band"] = r.sq_norm_ok ? Json(*r.sq_norm_ok) : Json(nullptr);
    j["squared_norm"] = sq;
  }
  return j;
}

Json to_json(const VolMomentReport& r) {
  return {{"exponents", to_json(r.exponents)}, {"estimate", to_json(r.estimate)}, {"oracle", to_json(r.oracle)},
          {"mc_stderr", to_json(r.mc_stderr)}, {"passed", r.passed}};
}

Json to_json(const CapmResult& r) {
  return {{"schema", kSchemaVersion}, {"slope", r.slope}, {"stderr", r.stderr_slope}, {"l", r.l},
          {"l0", r.l0}, {"theoretical", r.theoretical}, {"n", r.n}};
}

}  // namespace ratesvol
