#include <doctest.h>

#include <cmath>
#include <limits>

#include "ratesvol/error.hpp"
#include "ratesvol/json_io.hpp"
#include "support.hpp"

using namespace ratesvol;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

bool same(const ArSvModel& a, const ArSvModel& b) {
  return a.alpha == b.alpha && a.beta == b.beta && a.sigma0 == b.sigma0 && (a.a.array() == b.a.array()).all() &&
         (a.B.array() == b.B.array()).all() && (a.c.array() == b.c.array()).all() && a.vix_scaled == b.vix_scaled &&
         (a.noise_scales.array() == b.noise_scales.array()).all() &&
         (a.innovation_cov.array() == b.innovation_cov.array()).all();
}

}  // namespace

TEST_SUITE("json") {
  TEST_CASE("model round-trips bit-exactly") {
    const RatePanel p = testsupport::synthetic_panel(300, 1);
    const PcModel pca = fit_pca(p, 3);
    const SimPath path = simulate_discrete(testsupport::reference_trivariate(), 300, 1);
    ArSvOptions opt;
    opt.vix_scaled = {false, true, false};
    const ArSvModel m = fit_arsv(pca.scores, path.v.head(300), opt).model;

    const std::string text = dump_json(model_to_json(m, &pca));
    const ModelDocument doc = model_from_json(Json::parse(text));
    CHECK(same(doc.model, m));
    REQUIRE(doc.pca);
    CHECK((doc.pca->loadings.array() == pca.loadings.array()).all());
    CHECK((doc.pca->mean_rates.array() == pca.mean_rates.array()).all());
    CHECK(doc.pca->maturities == pca.maturities);
    CHECK(doc.pca->total_variance == pca.total_variance);
    CHECK(dump_json(model_to_json(doc.model, &*doc.pca)) == text);
  }

  TEST_CASE("document fields") {
    const Json j = model_to_json(testsupport::reference_trivariate());
    CHECK(j["schema"] == 1);
    CHECK(j["model_version"] == 1);
    CHECK(j["dimension"] == 3);
    CHECK(j["vix_scaled"][1] == true);
    CHECK(j["log_vol"]["beta"] == 0.88);
    CHECK_FALSE(j.contains("pca"));
    const std::vector<std::string> keys = {"schema", "model_version", "dimension", "log_vol", "a", "B", "c",
                                           "vix_scaled", "noise_scales", "innovation_cov"};
    std::size_t k = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++k) CHECK(it.key() == keys[k]);
  }

  TEST_CASE("dump format") {
    Json j;
    j["x"] = 0.1;
    j["v"] = Json::array({1.0, 2.5, std::numeric_limits<double>::quiet_NaN()});
    j["n"] = 3;
    j["s"] = "text";
    const std::string out = dump_json(j);
    CHECK(out.find("\"x\": 0.10000000000000001") != std::string::npos);
    CHECK(out.find("[1, 2.5, null]") != std::string::npos);
    CHECK(out.find("\"n\": 3") != std::string::npos);
    CHECK(out.back() == '\n');
    CHECK(Json::parse(out)["x"].get<double>() == 0.1);
  }

  TEST_CASE("malformed documents") {
    Json j = model_to_json(testsupport::reference_trivariate());
    Json wrong_version = j;
    wrong_version["model_version"] = 2;
    CHECK(code_of([&] { model_from_json(wrong_version); }) == ErrorCode::InvalidModel);
    Json missing = j;
    missing.erase("B");
    CHECK(code_of([&] { model_from_json(missing); }) == ErrorCode::InvalidModel);
    Json ragged = j;
    ragged["B"][1] = Json::array({1.0});
    CHECK(code_of([&] { model_from_json(ragged); }) == ErrorCode::InvalidModel);
    Json shape = j;
    shape["c"] = Json::array({1.0});
    CHECK(code_of([&] { model_from_json(shape); }) == ErrorCode::InvalidModel);
    CHECK(code_of([&] { model_from_json(Json::array()); }) == ErrorCode::InvalidModel);
  }

  TEST_CASE("files") {
    testsupport::TempDir dir("json");
    const std::string path = dir.file("nested/model.json");
    save_model(path, testsupport::reference_trivariate());
    CHECK(same(load_model(path).model, testsupport::reference_trivariate()));
    testsupport::write_file(dir.file("bad.json"), "{ not json");
    CHECK(code_of([&] { load_model(dir.file("bad.json")); }) == ErrorCode::ParseError);
    CHECK(code_of([&] { load_model(dir.file("absent.json")); }) == ErrorCode::FileNotFound);
  }

  TEST_CASE("report serialisation") {
    const ArSvModel m = testsupport::scalar_model(0.1, 0.9, 0.2);
    LlnOptions o;
    o.T = 5000;
    o.reps = 2;
    o.seed = 1;
    const Json a = to_json(verify_lln(m, o));
    const Json b = to_json(verify_lln(m, o));
    CHECK(dump_json(a) == dump_json(b));
    CHECK(a["mode"] == "discrete");
    CHECK(a.contains("passed"));
    CHECK(a["oracle_mean"].size() == 1);

    const Json c = to_json(CapmResult{0.5, 0.01, 60, 120, 0.5, 100});
    CHECK(c["theoretical"] == 0.5);
    CHECK(c["l0"] == 120);
  }

  TEST_CASE("matrices") {
    MatrixXd m(2, 3);
    m << 1, 2, 3, 4, 5, 6.25;
    CHECK((matrix_from_json(to_json(m)).array() == m.array()).all());
    const VectorXd v = VectorXd::LinSpaced(5, -1, 1);
    CHECK((vector_from_json(to_json(v)).array() == v.array()).all());
  }
}
