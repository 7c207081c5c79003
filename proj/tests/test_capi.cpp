#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "splinelab/splinelab.h"

using doctest::Approx;

namespace {

std::filesystem::path write_plan(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

const char* kPlan = R"([study]
kind = blowup
m = 2
[truth]
representers = 0.35:1, 0.8:0.5
[noise]
sigma = 0.5
[grid]
n = 20, 40, 80, 160
p = 0.25, 1.0
replicates = 4
base_seed = 5
)";

}  // namespace

TEST_CASE("version and errors") {
  CHECK(std::string(splinelab_version()).size() > 0);
  splinelab_space* space = nullptr;
  CHECK(splinelab_space_create(0, &space) == SPLINELAB_INVALID_ARGUMENT);
  CHECK(space == nullptr);
  CHECK(std::string(splinelab_last_error()).size() > 0);
  CHECK(splinelab_space_create(2, nullptr) == SPLINELAB_INVALID_ARGUMENT);
}

TEST_CASE("kernels through the C interface") {
  splinelab_space* space = nullptr;
  REQUIRE(splinelab_space_create(2, &space) == SPLINELAB_OK);
  CHECK(std::string(splinelab_last_error()).empty());
  CHECK(splinelab_space_order(space) == 2);
  double k0 = 0, k1 = 0, k = 0;
  REQUIRE(splinelab_kernel_eval(space, 0.5, 0.5, &k0, &k1, &k) == SPLINELAB_OK);
  CHECK(k0 == Approx(1.25));
  CHECK(k1 == Approx(1.0 / 24.0));
  CHECK(k == Approx(1.25 + 1.0 / 24.0));
  CHECK(splinelab_kernel_eval(space, 1.5, 0.5, &k0, nullptr, nullptr) == SPLINELAB_OUT_OF_DOMAIN);

  const double pts[] = {0.2, 0.8};
  double g[4];
  REQUIRE(splinelab_gram(space, pts, 2, SPLINELAB_KERNEL_H1, g) == SPLINELAB_OK);
  CHECK(g[1] == Approx(0.044 / 3.0).epsilon(1e-10));
  CHECK(g[1] == g[2]);
  CHECK(splinelab_gram(space, pts, 2, 7, g) == SPLINELAB_INVALID_ARGUMENT);
  splinelab_space_destroy(space);
}

TEST_CASE("fits through the C interface") {
  splinelab_space* space = nullptr;
  REQUIRE(splinelab_space_create(2, &space) == SPLINELAB_OK);
  std::vector<double> t, y;
  for (int i = 0; i < 15; ++i) {
    t.push_back((i + 0.5) / 15);
    y.push_back(2.0 + 3.0 * t.back());
  }
  splinelab_fit* fit = nullptr;
  REQUIRE(splinelab_fit_create(space, t.data(), y.data(), t.size(), 0.1, &fit) == SPLINELAB_OK);
  CHECK(splinelab_fit_size(fit) == 15);
  double v = 0;
  REQUIRE(splinelab_fit_eval(fit, 0.25, &v) == SPLINELAB_OK);
  CHECK(v == Approx(2.75));
  double poly[2], knots[15], weights[15];
  REQUIRE(splinelab_fit_coefficients(fit, poly, knots, weights) == SPLINELAB_OK);
  CHECK(poly[0] == Approx(2.0));
  CHECK(poly[1] == Approx(3.0));
  CHECK(knots[3] == t[3]);
  CHECK(std::abs(weights[7]) < 1e-8);
  double h0 = 0, h1 = 0, full = 0;
  REQUIRE(splinelab_fit_norms(fit, &h0, &h1, &full) == SPLINELAB_OK);
  CHECK(h0 == Approx(std::sqrt(13.0)));
  CHECK(h1 < 1e-8);
  double residual = 1, cond = 0;
  int ill = -1;
  REQUIRE(splinelab_fit_diagnostics(fit, &residual, &cond, &ill) == SPLINELAB_OK);
  CHECK(residual < 1e-12);
  CHECK(cond > 1.0);
  CHECK(ill == 0);
  splinelab_fit_destroy(fit);

  t[4] = t[3];
  splinelab_fit* dup = nullptr;
  CHECK(splinelab_fit_create(space, t.data(), y.data(), t.size(), 0.1, &dup) ==
        SPLINELAB_DUPLICATE_KNOTS);
  CHECK(dup == nullptr);
  CHECK(splinelab_fit_create(space, t.data(), y.data(), 1, 0.1, &dup) ==
        SPLINELAB_TOO_FEW_POINTS);

  char* json = nullptr;
  const double design[] = {0.1, 0.4, 0.9};
  REQUIRE(splinelab_spectral_json(space, design, 3, 0.5, 1e-12, &json) == SPLINELAB_OK);
  const auto doc = nlohmann::json::parse(json);
  splinelab_string_free(json);
  CHECK(doc["betas"].size() == 3);
  CHECK(doc["rank"] == 3);
  CHECK(doc["op_norm"].get<double>() > 0.0);
  CHECK(doc.contains("inv_beta_sum"));
  CHECK(doc["cutoff"].get<double>() > 0.0);
  REQUIRE(splinelab_spectral_json(space, design, 3, 0.0, 1e-12, &json) == SPLINELAB_OK);
  CHECK(nlohmann::json::parse(json)["op_norm"].is_null());
  splinelab_string_free(json);
  splinelab_space_destroy(space);
}

TEST_CASE("studies through the C interface") {
  const auto path = write_plan("splinelab_capi_plan.ini", kPlan);
  splinelab_plan* plan = nullptr;
  CHECK(splinelab_plan_load(path.c_str(), "rate", &plan) == SPLINELAB_CONFIG);
  CHECK(std::string(splinelab_last_error()).find(path.string()) != std::string::npos);
  CHECK(splinelab_plan_load(path.c_str(), "bogus", &plan) == SPLINELAB_CONFIG);
  REQUIRE(splinelab_plan_load(path.c_str(), nullptr, &plan) == SPLINELAB_OK);
  CHECK(std::string(splinelab_plan_out_dir(plan)) == "results");

  splinelab_result* r1 = nullptr;
  splinelab_result* r2 = nullptr;
  REQUIRE(splinelab_study_run(plan, 1, &r1) == SPLINELAB_OK);
  REQUIRE(splinelab_study_run(plan, 3, &r2) == SPLINELAB_OK);
  char* c1 = nullptr;
  char* c2 = nullptr;
  REQUIRE(splinelab_result_csv(r1, &c1) == SPLINELAB_OK);
  REQUIRE(splinelab_result_csv(r2, &c2) == SPLINELAB_OK);
  CHECK(std::string(c1) == std::string(c2));
  CHECK(std::string(c1).rfind("study,m,p,n,replicates,statistic,mean,std_error,median\n", 0) == 0);
  splinelab_string_free(c1);
  splinelab_string_free(c2);

  char* js = nullptr;
  REQUIRE(splinelab_result_json(r1, &js) == SPLINELAB_OK);
  CHECK(nlohmann::json::parse(js)["study"] == "blowup");
  splinelab_string_free(js);

  const auto dir = std::filesystem::temp_directory_path() / "splinelab_capi_out";
  std::filesystem::remove_all(dir);
  REQUIRE(splinelab_result_write(r1, plan, 1, dir.c_str()) == SPLINELAB_OK);
  CHECK(std::filesystem::exists(dir / "blowup.csv"));
  CHECK(std::filesystem::exists(dir / "blowup.json"));
  CHECK(std::filesystem::exists(dir / "blowup_manifest.json"));
  std::filesystem::remove_all(dir);

  splinelab_result_destroy(r1);
  splinelab_result_destroy(r2);
  splinelab_plan_destroy(plan);
  std::filesystem::remove(path);

  const auto bad = write_plan("splinelab_capi_bad.ini", "[study]\nkind = blowup\nm = two\n");
  CHECK(splinelab_plan_load(bad.c_str(), nullptr, &plan) == SPLINELAB_CONFIG);
  std::filesystem::remove(bad);
}
