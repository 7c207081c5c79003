#include "core/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

#ifndef SPLINELAB_VERSION_STRING
#define SPLINELAB_VERSION_STRING "unknown"
#endif

namespace splinelab {
namespace {

using nlohmann::json;

// NaN and infinities become null so the document stays valid JSON.
json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json element_json(const SpanElement& e) {
  json knots = json::array();
  for (const Knot& k : e.knots) knots.push_back({{"s", k.s}, {"w", k.w}});
  return {{"poly", e.poly}, {"knots", knots}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorCode::kIo, "cannot create directory '" + path.parent_path().string() +
                                      "': " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path.string() + "' failed");
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const StudyResult& result, std::ostream& out) {
  out << "study,m,p,n,replicates,statistic,mean,std_error,median\n";
  for (const auto& r : result.rows) {
    out << to_string(r.study) << ',' << r.m << ',' << format_number(r.p) << ',' << r.n << ','
        << r.replicates << ',' << r.statistic << ',' << format_number(r.mean) << ','
        << format_number(r.std_error) << ',' << format_number(r.median) << '\n';
  }
}

json to_json(const StudyResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"study", to_string(r.study)},
                    {"m", r.m},
                    {"p", r.p},
                    {"n", r.n},
                    {"replicates", r.replicates},
                    {"statistic", r.statistic},
                    {"mean", number(r.mean)},
                    {"std_error", number(r.std_error)},
                    {"median", number(r.median)}});
  }
  json slopes = json::array();
  for (const auto& s : result.slopes) {
    slopes.push_back({{"study", to_string(s.study)},
                      {"p", s.p},
                      {"statistic", s.statistic},
                      {"slope", number(s.slope)},
                      {"std_error", number(s.std_error)},
                      {"points", s.points}});
  }
  json cells = json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"p", c.p},
                     {"n", c.n},
                     {"included", c.included},
                     {"excluded", c.excluded},
                     {"failures", c.failures}});
  }
  json summary = json::object();
  for (const auto& [key, value] : result.summary) summary[key] = number(value);
  return {{"study", to_string(result.study)},
          {"m", result.m},
          {"rows", rows},
          {"slopes", slopes},
          {"cells", cells},
          {"summary", summary}};
}

json to_json(const StudyPlan& plan) {
  json design = {{"kind", plan.design.is_uniform() ? "uniform" : "piecewise"},
                 {"edges", plan.design.edges()},
                 {"masses", plan.design.masses()}};
  json noise = {{"kind", plan.noise.kind == NoiseKind::kGaussian ? "gaussian" : "uniform"},
                {"sigma", plan.noise.sigma}};
  json functional = nullptr;
  if (plan.functional) {
    if (plan.functional->kind == FunctionalSpec::Kind::kPointEval) {
      functional = {{"kind", "point"}, {"t", plan.functional->point}};
    } else {
      functional = {{"kind", "inner"}, {"xi", element_json(plan.functional->xi)}};
    }
  }
  return {{"study", to_string(plan.study)},
          {"m", plan.m},
          {"truth", element_json(plan.truth)},
          {"design", design},
          {"noise", noise},
          {"functional", functional},
          {"n_grid", plan.n_grid},
          {"p_grid", plan.p_grid},
          {"lambda_scale", plan.lambda_scale},
          {"replicates", plan.replicates},
          {"base_seed", plan.base_seed},
          {"quad", plan.quad},
          {"eps_grid", plan.eps_grid},
          {"probes", plan.probes},
          {"out_dir", plan.out_dir.string()}};
}

json to_json(const SpectralReport& report, double cutoff) {
  json betas = json::array();
  for (double b : report.betas) betas.push_back(number(b));
  return {{"betas", betas},
          {"op_norm", number(report.op_norm)},
          {"inv_beta_sum", number(report.inv_beta.value)},
          {"cutoff", number(cutoff)},
          {"rank", report.rank}};
}

void emit(const StudyResult& result, ReportFormat format, const std::filesystem::path& path) {
  if (format == ReportFormat::kCsv) {
    std::ostringstream out;
    write_csv(result, out);
    write_file(path, out.str());
  } else {
    write_file(path, to_json(result).dump(2) + "\n");
  }
}

void write_manifest(const StudyPlan& plan, int workers, const std::filesystem::path& path) {
  const json manifest = {{"version", SPLINELAB_VERSION_STRING},
                         {"study", to_string(plan.study)},
                         {"base_seed", plan.base_seed},
                         {"workers", workers},
                         {"plan", to_json(plan)}};
  write_file(path, manifest.dump(2) + "\n");
}

void emit_all(const StudyResult& result, const StudyPlan& plan, int workers,
              const std::filesystem::path& dir) {
  const std::string stem = to_string(result.study);
  emit(result, ReportFormat::kCsv, dir / (stem + ".csv"));
  emit(result, ReportFormat::kJson, dir / (stem + ".json"));
  write_manifest(plan, workers, dir / (stem + "_manifest.json"));
}

}  // namespace splinelab
