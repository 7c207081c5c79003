#pragma once

// Monte Carlo studies over (p, n, replicate) grids. Every replicate draws its
// data from child_seed(base_seed, n, r), so all exponents p at a given
// (n, r) see the same dataset, and results never depend on scheduling.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/observation.hpp"
#include "core/rkhs.hpp"

namespace splinelab {

enum class StudyKind { kConverge, kBlowup, kRate, kGamma };

std::string to_string(StudyKind kind);
std::optional<StudyKind> parse_study_kind(const std::string& name);

inline constexpr std::size_t kMaxStudySize = 1600;

struct StudyPlan {
  StudyKind study = StudyKind::kConverge;
  int m = 2;
  SpanElement truth;
  DesignDistribution design = DesignDistribution::uniform();
  NoiseModel noise;
  std::optional<FunctionalSpec> functional;
  std::vector<std::size_t> n_grid;
  std::vector<double> p_grid;
  double lambda_scale = 1.0;
  std::size_t replicates = 1;
  std::uint64_t base_seed = 0;
  int quad = 201;
  std::vector<double> eps_grid{0.02, 0.05, 0.1};  // converge: P(|err| >= eps)
  std::size_t probes = 2;                          // gamma: generic probes
  std::filesystem::path out_dir = "results";

  // Throws Error(kConfig) describing the first violated constraint.
  void validate() const;
};

struct StudyRow {
  StudyKind study;
  int m;
  double p;
  std::size_t n;
  std::size_t replicates;  // included replicates
  std::string statistic;
  double mean;
  double std_error;
  double median;
};

struct SlopeRow {
  StudyKind study;
  double p;
  std::string statistic;
  double slope;
  double std_error;
  std::size_t points;
};

struct CellAccounting {
  double p;
  std::size_t n;
  std::size_t included;
  std::size_t excluded;
  std::vector<std::string> failures;  // first few failure messages
};

struct StudyResult {
  StudyKind study = StudyKind::kConverge;
  int m = 0;
  std::vector<StudyRow> rows;
  std::vector<SlopeRow> slopes;
  std::vector<CellAccounting> cells;
  // Study-level scalars: best_p (rate), q_estimate (rate).
  std::map<std::string, double> summary;

  const StudyRow* find(double p, std::size_t n, const std::string& statistic) const;
  const SlopeRow* find_slope(double p, const std::string& statistic) const;
};

StudyResult run_convergence_study(const StudyPlan& plan, int workers = 1);
StudyResult run_blowup_study(const StudyPlan& plan, int workers = 1);
StudyResult run_rate_study(const StudyPlan& plan, int workers = 1);
StudyResult run_gamma_study(const StudyPlan& plan, int workers = 1);
StudyResult run_study(const StudyPlan& plan, int workers = 1);

struct Slope {
  double slope = 0.0;
  double std_error = 0.0;
};

// Ordinary least squares of y on x (of log y on log x when log_log).
Slope fit_slope(const std::vector<std::pair<double, double>>& points, bool log_log);

// Seeded generic probe element for the gamma study.
SpanElement probe_element(const KernelSpace& space, std::uint64_t base_seed,
                          std::size_t index);

}  // namespace splinelab
