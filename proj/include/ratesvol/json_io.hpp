#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ratesvol/diagnose.hpp"
#include "ratesvol/estimate.hpp"
#include "ratesvol/returns.hpp"
#include "ratesvol/simulate.hpp"
#include "ratesvol/yieldpca.hpp"

namespace ratesvol {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kModelVersion = 1;

/// Pretty JSON with every floating value printed with 17 significant digits, so that
/// reruns are byte-identical and values round-trip exactly.
std::string dump_json(const Json& value);

Json to_json(const Eigen::VectorXd& v);
Json to_json(const Eigen::MatrixXd& m);
Eigen::VectorXd vector_from_json(const Json& j);
Eigen::MatrixXd matrix_from_json(const Json& j);

/// Model document: the contract between the fit, simulate and returns commands. When a
/// PCA is supplied its loadings, mean rates and maturities travel with the model.
Json model_to_json(const ArSvModel& model, const PcModel* pca = nullptr);

struct ModelDocument {
  ArSvModel model;
  std::optional<PcModel> pca;  // scores are not stored
};

ModelDocument model_from_json(const Json& j);

void write_text_file(const std::string& path, const std::string& text);
Json read_json_file(const std::string& path);

void save_model(const std::string& path, const ArSvModel& model, const PcModel* pca = nullptr);
ModelDocument load_model(const std::string& path);

Json to_json(const OlsFit& fit, const std::vector<std::string>& names);
Json to_json(const TestResult& r);
Json to_json(const AdfResult& r);
Json to_json(const MomentSummary& m);
Json to_json(const StabilityReport& s);
Json to_json(const LlnReport& r);
Json to_json(const VolMomentReport& r);
Json to_json(const CapmResult& r);

}  // namespace ratesvol
