#include "core/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "core/error.hpp"
#include "core/solver.hpp"
#include "core/spectral.hpp"

namespace splinelab {

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::kConverge: return "converge";
    case StudyKind::kBlowup: return "blowup";
    case StudyKind::kRate: return "rate";
    case StudyKind::kGamma: return "gamma";
  }
  return "unknown";
}

std::optional<StudyKind> parse_study_kind(const std::string& name) {
  if (name == "converge") return StudyKind::kConverge;
  if (name == "blowup") return StudyKind::kBlowup;
  if (name == "rate") return StudyKind::kRate;
  if (name == "gamma") return StudyKind::kGamma;
  return std::nullopt;
}

void StudyPlan::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfig, msg); };
  if (m < 1) fail("m must be >= 1");
  const KernelSpace space(m);
  try {
    splinelab::validate(space, truth);
  } catch (const Error& e) {
    fail(std::string("truth: ") + e.what());
  }
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) fail("noise sigma must be >= 0");
  if (n_grid.empty()) fail("n grid is empty");
  if (p_grid.empty()) fail("p grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < static_cast<std::size_t>(m) || n_grid[i] < 2) {
      fail("every n must be >= max(m, 2)");
    }
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) fail("n grid must be strictly ascending");
  }
  if (study != StudyKind::kGamma && n_grid.back() > kMaxStudySize) {
    fail("n grid exceeds the dense-solver limit of " + std::to_string(kMaxStudySize));
  }
  for (double p : p_grid) {
    if (!(p > 0.0 && p <= 1.5)) fail("every p must lie in (0, 1.5]");
  }
  if (!(lambda_scale > 0.0) || !std::isfinite(lambda_scale)) fail("lambda_scale must be > 0");
  if (replicates < 1) fail("replicates must be >= 1");
  if (quad < 2) fail("quad must be >= 2");
  if ((study == StudyKind::kConverge || study == StudyKind::kRate) && !functional) {
    fail(to_string(study) + " study needs a [functional] section");
  }
  if (functional && functional->kind == FunctionalSpec::Kind::kInner) {
    try {
      splinelab::validate(space, functional->xi);
    } catch (const Error& e) {
      fail(std::string("functional: ") + e.what());
    }
  }
  for (double eps : eps_grid) {
    if (!(eps > 0.0)) fail("every eps must be > 0");
  }
}

const StudyRow* StudyResult::find(double p, std::size_t n,
                                  const std::string& statistic) const {
  for (const auto& r : rows) {
    if (r.p == p && r.n == n && r.statistic == statistic) return &r;
  }
  return nullptr;
}

const SlopeRow* StudyResult::find_slope(double p, const std::string& statistic) const {
  for (const auto& s : slopes) {
    if (s.p == p && s.statistic == statistic) return &s;
  }
  return nullptr;
}

Slope fit_slope(const std::vector<std::pair<double, double>>& points, bool log_log) {
  if (points.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "slope fit needs at least 2 points");
  }
  std::vector<double> x, y;
  for (const auto& [px, py] : points) {
    if (log_log && !(px > 0.0 && py > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "log-log slope needs positive coordinates");
    }
    x.push_back(log_log ? std::log(px) : px);
    y.push_back(log_log ? std::log(py) : py);
  }
  const double k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::kInvalidArgument, "slope fit: degenerate x values");
  Slope out;
  out.slope = sxy / sxx;
  if (x.size() > 2) {
    const double intercept = my - out.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - intercept - out.slope * x[i];
      ssr += r * r;
    }
    out.std_error = std::sqrt(ssr / (k - 2.0) / sxx);
  }
  return out;
}

SpanElement probe_element(const KernelSpace& space, std::uint64_t base_seed,
                          std::size_t index) {
  std::mt19937_64 gen(child_seed(base_seed, 0x70726f6265ULL, index));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SpanElement e = SpanElement::zero(space);
  for (double& d : e.poly) d = gauss(gen);
  for (int k = 0; k < 3; ++k) e.knots.push_back({unif(gen), gauss(gen)});
  return e;
}

namespace {

constexpr std::size_t kKeptFailureMessages = 3;

struct Outcome {
  bool ok = false;
  std::vector<double> values;
  std::string error;
};

// outcomes[(n_index * replicates + r) * p_count + p_index]
using ReplicateFn = std::function<void(std::size_t n_index, std::size_t replicate,
                                       std::vector<Outcome>& per_p)>;

std::vector<Outcome> run_grid(const StudyPlan& plan, int workers, const ReplicateFn& body) {
  const std::size_t np = plan.p_grid.size();
  const std::size_t tasks = plan.n_grid.size() * plan.replicates;
  std::vector<Outcome> outcomes(tasks * np);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    std::vector<Outcome> per_p(np);
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= tasks) return;
      {
        std::lock_guard lock(fatal_mutex);
        if (fatal) return;
      }
      const std::size_t ni = task / plan.replicates;
      const std::size_t r = task % plan.replicates;
      std::fill(per_p.begin(), per_p.end(), Outcome{});
      try {
        body(ni, r, per_p);
      } catch (const Error& e) {
        // Dataset-level failure: every exponent loses this replicate.
        for (auto& o : per_p) o = Outcome{false, {}, e.what()};
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        return;
      }
      std::copy(per_p.begin(), per_p.end(), outcomes.begin() + static_cast<long>(task * np));
    }
  };

  unsigned count = workers > 0 ? static_cast<unsigned>(workers)
                               : std::max(1u, std::thread::hardware_concurrency());
  count = static_cast<unsigned>(std::min<std::size_t>(count, std::max<std::size_t>(tasks, 1)));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < count; ++i) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);
  return outcomes;
}

struct Summary {
  double mean = 0.0;
  double std_error = 0.0;
  double median = 0.0;
};

Summary summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) {
    s.mean = s.std_error = s.median = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  const double k = static_cast<double>(v.size());
  for (double x : v) s.mean += x;
  s.mean /= k;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / (k - 1.0) / k);
  }
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  s.median = v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  return s;
}

StudyResult aggregate(const StudyPlan& plan, const std::vector<std::string>& statistics,
                      const std::vector<std::string>& slope_statistics,
                      const std::vector<Outcome>& outcomes) {
  StudyResult result;
  result.study = plan.study;
  result.m = plan.m;
  const std::size_t np = plan.p_grid.size();
  for (std::size_t pi = 0; pi < np; ++pi) {
    for (std::size_t ni = 0; ni < plan.n_grid.size(); ++ni) {
      CellAccounting cell{plan.p_grid[pi], plan.n_grid[ni], 0, 0, {}};
      std::vector<std::vector<double>> columns(statistics.size());
      for (std::size_t r = 0; r < plan.replicates; ++r) {
        const Outcome& o = outcomes[(ni * plan.replicates + r) * np + pi];
        if (!o.ok) {
          ++cell.excluded;
          if (cell.failures.size() < kKeptFailureMessages) cell.failures.push_back(o.error);
          continue;
        }
        ++cell.included;
        for (std::size_t k = 0; k < statistics.size(); ++k) columns[k].push_back(o.values[k]);
      }
      for (std::size_t k = 0; k < statistics.size(); ++k) {
        const Summary s = summarize(columns[k]);
        result.rows.push_back({plan.study, plan.m, plan.p_grid[pi], plan.n_grid[ni],
                               cell.included, statistics[k], s.mean, s.std_error, s.median});
      }
      result.cells.push_back(std::move(cell));
    }
  }
  if (plan.n_grid.size() >= 4) {
    for (double p : plan.p_grid) {
      for (const auto& stat : slope_statistics) {
        std::vector<std::pair<double, double>> pts;
        bool usable = true;
        for (std::size_t n : plan.n_grid) {
          const StudyRow* row = result.find(p, n, stat);
          if (!row || !(row->mean > 0.0) || !std::isfinite(row->mean)) {
            usable = false;
            break;
          }
          pts.emplace_back(static_cast<double>(n), row->mean);
        }
        if (!usable) continue;
        const Slope s = fit_slope(pts, true);
        result.slopes.push_back({plan.study, p, stat, s.slope, s.std_error, pts.size()});
      }
    }
  }
  return result;
}

std::string eps_label(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "exceed_%g", eps);
  return buf;
}

Dataset replicate_dataset(const StudyPlan& plan, const KernelSpace& space, std::size_t ni,
                          std::size_t r) {
  const std::size_t n = plan.n_grid[ni];
  return sample_dataset(space, plan.truth, plan.design, plan.noise, n,
                        child_seed(plan.base_seed, n, r));
}

void expect_kind(const StudyPlan& plan, StudyKind kind) {
  if (plan.study != kind) {
    throw Error(ErrorCode::kConfig, "plan is for study '" + to_string(plan.study) +
                                        "', not '" + to_string(kind) + "'");
  }
  plan.validate();
}

}  // namespace

StudyResult run_convergence_study(const StudyPlan& plan, int workers) {
  expect_kind(plan, StudyKind::kConverge);
  const KernelSpace space(plan.m);
  const FunctionalSpec& f = *plan.functional;
  const double target = functional_apply(space, f, plan.truth);

  std::vector<std::string> stats{"abs_error"};
  for (double eps : plan.eps_grid) stats.push_back(eps_label(eps));

  auto outcomes = run_grid(plan, workers, [&](std::size_t ni, std::size_t r,
                                              std::vector<Outcome>& per_p) {
    const Dataset ds = replicate_dataset(plan, space, ni, r);
    for (std::size_t pi = 0; pi < plan.p_grid.size(); ++pi) {
      const LambdaSchedule sched{plan.p_grid[pi], plan.lambda_scale};
      try {
        const SplineFit fitted = fit(space, ds, sched.at(ds.size()));
        const double err = std::abs(functional_apply(space, f, fitted.as_element()) - target);
        Outcome o{true, {err}, {}};
        for (double eps : plan.eps_grid) o.values.push_back(err >= eps ? 1.0 : 0.0);
        per_p[pi] = std::move(o);
      } catch (const Error& e) {
        per_p[pi] = Outcome{false, {}, e.what()};
      }
    }
  });
  return aggregate(plan, stats, {"abs_error"}, outcomes);
}

StudyResult run_blowup_study(const StudyPlan& plan, int workers) {
  expect_kind(plan, StudyKind::kBlowup);
  const KernelSpace space(plan.m);
  const std::vector<std::string> stats{"norm_sq", "h1_sq", "h0_sq"};

  auto outcomes = run_grid(plan, workers, [&](std::size_t ni, std::size_t r,
                                              std::vector<Outcome>& per_p) {
    const Dataset ds = replicate_dataset(plan, space, ni, r);
    for (std::size_t pi = 0; pi < plan.p_grid.size(); ++pi) {
      const LambdaSchedule sched{plan.p_grid[pi], plan.lambda_scale};
      try {
        const Norms nm = fit_norms(fit(space, ds, sched.at(ds.size())));
        per_p[pi] = Outcome{true, {nm.full * nm.full, nm.h1 * nm.h1, nm.h0 * nm.h0}, {}};
      } catch (const Error& e) {
        per_p[pi] = Outcome{false, {}, e.what()};
      }
    }
  });
  return aggregate(plan, stats, stats, outcomes);
}

StudyResult run_rate_study(const StudyPlan& plan, int workers) {
  expect_kind(plan, StudyKind::kRate);
  const KernelSpace space(plan.m);
  const FunctionalSpec& f = *plan.functional;
  const SpanElement xi = f.representer(space);
  const double target = functional_apply(space, f, plan.truth);
  const std::vector<std::string> stats{"abs_error", "bias_term", "proj_term", "noise_term"};

  auto outcomes = run_grid(plan, workers, [&](std::size_t ni, std::size_t r,
                                              std::vector<Outcome>& per_p) {
    const Dataset ds = replicate_dataset(plan, space, ni, r);
    const double projected = projected_pairing(space, ds.design, plan.truth, xi);
    for (std::size_t pi = 0; pi < plan.p_grid.size(); ++pi) {
      const LambdaSchedule sched{plan.p_grid[pi], plan.lambda_scale};
      try {
        std::optional<SplineFit> fitted;
        const RateReport rr = rate_terms(space, ds, plan.truth, xi, sched.at(ds.size()),
                                         plan.noise.sigma, projected, &fitted);
        const double err = std::abs(functional_apply(space, f, fitted->as_element()) - target);
        per_p[pi] = Outcome{true, {err, rr.bias_term, rr.proj_term, rr.noise_term}, {}};
      } catch (const Error& e) {
        per_p[pi] = Outcome{false, {}, e.what()};
      }
    }
  });
  StudyResult result = aggregate(plan, stats, stats, outcomes);

  const std::size_t largest = plan.n_grid.back();
  double best_p = std::numeric_limits<double>::quiet_NaN();
  double best_err = std::numeric_limits<double>::infinity();
  for (double p : plan.p_grid) {
    const StudyRow* row = result.find(p, largest, "abs_error");
    if (row && row->mean < best_err) {
      best_err = row->mean;
      best_p = p;
    }
  }
  result.summary["best_p"] = best_p;
  if (const SlopeRow* s = result.find_slope(plan.p_grid.front(), "proj_term")) {
    result.summary["q_estimate"] = -s->slope;
  }
  return result;
}

StudyResult run_gamma_study(const StudyPlan& plan, int workers) {
  expect_kind(plan, StudyKind::kGamma);
  const KernelSpace space(plan.m);
  std::vector<SpanElement> probes{plan.truth};
  std::vector<std::string> stats{"gap_truth"};
  for (std::size_t k = 0; k < plan.probes; ++k) {
    probes.push_back(probe_element(space, plan.base_seed, k));
    stats.push_back("gap_probe_" + std::to_string(k + 1));
  }
  std::vector<double> limit;
  for (const auto& mu : probes) {
    limit.push_back(f_infinity(space, plan.truth, mu, plan.design, plan.noise.sigma, plan.quad));
  }

  auto outcomes = run_grid(plan, workers, [&](std::size_t ni, std::size_t r,
                                              std::vector<Outcome>& per_p) {
    const Dataset ds = replicate_dataset(plan, space, ni, r);
    for (std::size_t pi = 0; pi < plan.p_grid.size(); ++pi) {
      const double lambda = LambdaSchedule{plan.p_grid[pi], plan.lambda_scale}.at(ds.size());
      Outcome o{true, {}, {}};
      for (std::size_t k = 0; k < probes.size(); ++k) {
        o.values.push_back(std::abs(empirical_risk(space, probes[k], ds, lambda) - limit[k]));
      }
      per_p[pi] = std::move(o);
    }
  });
  return aggregate(plan, stats, stats, outcomes);
}

StudyResult run_study(const StudyPlan& plan, int workers) {
  switch (plan.study) {
    case StudyKind::kConverge: return run_convergence_study(plan, workers);
    case StudyKind::kBlowup: return run_blowup_study(plan, workers);
    case StudyKind::kRate: return run_rate_study(plan, workers);
    case StudyKind::kGamma: return run_gamma_study(plan, workers);
  }
  throw Error(ErrorCode::kInternal, "unhandled study kind");
}

}  // namespace splinelab
