#pragma once

// CSV/JSON emission for study results and spectral reports. Numbers are
// printed with %.17g so output is byte-stable and round-trips exactly.

#include <filesystem>
#include <ostream>
#include <string>

#include "json.hpp"

#include "core/spectral.hpp"
#include "core/study.hpp"

namespace splinelab {

enum class ReportFormat { kCsv, kJson };

std::string format_number(double v);

void write_csv(const StudyResult& result, std::ostream& out);
nlohmann::json to_json(const StudyResult& result);
nlohmann::json to_json(const StudyPlan& plan);
nlohmann::json to_json(const SpectralReport& report, double cutoff);

void emit(const StudyResult& result, ReportFormat format, const std::filesystem::path& path);
void write_manifest(const StudyPlan& plan, int workers, const std::filesystem::path& path);

// Writes <dir>/<study>.csv, <dir>/<study>.json and <dir>/<study>_manifest.json.
void emit_all(const StudyResult& result, const StudyPlan& plan, int workers,
              const std::filesystem::path& dir);

}  // namespace splinelab
