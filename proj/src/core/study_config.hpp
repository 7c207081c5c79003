#pragma once

// INI-style study configuration. Sections and keys:
//
//   [study]      kind (optional), m
//   [truth]      poly, knots, representers
//   [design]     kind = uniform | piecewise, edges, weights
//   [noise]      kind = gaussian | uniform, sigma
//   [functional] kind = point | inner, t, poly, knots, representers
//   [grid]       n, p, lambda_scale, replicates, base_seed, quad, eps, probes
//   [output]     dir
//
// Lists are comma separated. knots/representers entries are `s:w`; a
// representer entry adds w * eta_s, a knot entry adds w * chi1 eta_s.
// Unknown sections or keys are errors.

#include <filesystem>
#include <istream>
#include <optional>
#include <string>

#include "core/study.hpp"

namespace splinelab {

StudyPlan parse_study_plan(std::istream& in, std::optional<StudyKind> kind = std::nullopt);
StudyPlan load_study_plan(const std::filesystem::path& path,
                          std::optional<StudyKind> kind = std::nullopt);

}  // namespace splinelab
