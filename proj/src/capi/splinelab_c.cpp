#include "splinelab/splinelab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "core/error.hpp"
#include "core/report.hpp"
#include "core/rkhs.hpp"
#include "core/solver.hpp"
#include "core/spectral.hpp"
#include "core/study.hpp"
#include "core/study_config.hpp"

struct splinelab_space {
  splinelab::KernelSpace space;
};

struct splinelab_fit {
  splinelab::SplineFit fit;
};

struct splinelab_plan {
  splinelab::StudyPlan plan;
  std::string out_dir;
};

struct splinelab_result {
  splinelab::StudyResult result;
};

namespace {

thread_local std::string last_error;

int set_error(int code, const std::string& msg) {
  last_error = msg;
  return code;
}

template <class F>
int guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return SPLINELAB_OK;
  } catch (const splinelab::Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SPLINELAB_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SPLINELAB_INTERNAL, e.what());
  } catch (...) {
    return set_error(SPLINELAB_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw splinelab::Error(splinelab::ErrorCode::kInvalidArgument, what);
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* splinelab_version(void) { return SPLINELAB_VERSION_STRING; }

const char* splinelab_last_error(void) { return last_error.c_str(); }

void splinelab_string_free(char* s) { std::free(s); }

int splinelab_space_create(int m, splinelab_space** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new splinelab_space{splinelab::KernelSpace(m)};
  });
}

void splinelab_space_destroy(splinelab_space* space) { delete space; }

int splinelab_space_order(const splinelab_space* space) {
  return space ? space->space.order() : 0;
}

int splinelab_kernel_eval(const splinelab_space* space, double s, double t, double* k0,
                          double* k1, double* k) {
  return guarded([&] {
    require(space != nullptr, "null space handle");
    splinelab::check_point(s, "s");
    splinelab::check_point(t, "t");
    if (k0) *k0 = splinelab::k0(space->space, s, t);
    if (k1) *k1 = splinelab::k1(space->space, s, t);
    if (k) *k = splinelab::kernel(space->space, s, t);
  });
}

int splinelab_gram(const splinelab_space* space, const double* points, size_t n, int which,
                   double* out) {
  return guarded([&] {
    require(space != nullptr, "null space handle");
    require(n == 0 || (points && out), "null array");
    require(which >= SPLINELAB_KERNEL_FULL && which <= SPLINELAB_KERNEL_H1, "unknown kernel part");
    const auto kind = which == SPLINELAB_KERNEL_H0   ? splinelab::KernelKind::kH0
                      : which == SPLINELAB_KERNEL_H1 ? splinelab::KernelKind::kH1
                                                     : splinelab::KernelKind::kFull;
    for (size_t i = 0; i < n; ++i) splinelab::check_point(points[i], "point");
    const Eigen::MatrixXd g = splinelab::gram(space->space, {points, n}, kind);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        out[i * n + j] = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  });
}

int splinelab_fit_create(const splinelab_space* space, const double* t, const double* y,
                         size_t n, double lambda, splinelab_fit** out) {
  return guarded([&] {
    require(space != nullptr && out != nullptr, "null handle");
    require(n == 0 || (t && y), "null array");
    *out = new splinelab_fit{splinelab::fit(space->space, {t, n}, {y, n}, lambda)};
  });
}

void splinelab_fit_destroy(splinelab_fit* fit) { delete fit; }

size_t splinelab_fit_size(const splinelab_fit* fit) { return fit ? fit->fit.knots().size() : 0; }

int splinelab_fit_eval(const splinelab_fit* fit, double t, double* value) {
  return guarded([&] {
    require(fit != nullptr && value != nullptr, "null handle");
    *value = splinelab::evaluate(fit->fit, t);
  });
}

int splinelab_fit_coefficients(const splinelab_fit* fit, double* poly, double* knots,
                               double* weights) {
  return guarded([&] {
    require(fit != nullptr, "null fit handle");
    const auto& f = fit->fit;
    for (Eigen::Index j = 0; poly && j < f.d().size(); ++j) poly[j] = f.d()[j];
    for (std::size_t i = 0; i < f.knots().size(); ++i) {
      if (knots) knots[i] = f.knots()[i];
      if (weights) weights[i] = f.c()[static_cast<Eigen::Index>(i)];
    }
  });
}

int splinelab_fit_norms(const splinelab_fit* fit, double* h0, double* h1, double* full) {
  return guarded([&] {
    require(fit != nullptr, "null fit handle");
    const auto nm = splinelab::fit_norms(fit->fit);
    if (h0) *h0 = nm.h0;
    if (h1) *h1 = nm.h1;
    if (full) *full = nm.full;
  });
}

int splinelab_fit_diagnostics(const splinelab_fit* fit, double* residual,
                              double* condition_estimate, int* ill_conditioned) {
  return guarded([&] {
    require(fit != nullptr, "null fit handle");
    const auto& d = fit->fit.diagnostics();
    if (residual) *residual = d.residual;
    if (condition_estimate) *condition_estimate = d.condition_estimate;
    if (ill_conditioned) *ill_conditioned = d.ill_conditioned ? 1 : 0;
  });
}

int splinelab_spectral_json(const splinelab_space* space, const double* t, size_t n,
                            double lambda, double relative_cutoff, char** json) {
  return guarded([&] {
    require(space != nullptr && json != nullptr, "null handle");
    require(n == 0 || t, "null array");
    const auto report = splinelab::spectral_report(space->space, {t, n}, lambda, relative_cutoff);
    *json = duplicate(splinelab::to_json(report, report.inv_beta.cutoff).dump(2));
  });
}

int splinelab_plan_load(const char* path, const char* kind, splinelab_plan** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    std::optional<splinelab::StudyKind> k;
    if (kind) {
      k = splinelab::parse_study_kind(kind);
      if (!k) {
        throw splinelab::Error(splinelab::ErrorCode::kConfig,
                               std::string("unknown study kind '") + kind + "'");
      }
    }
    auto plan = splinelab::load_study_plan(path, k);
    const std::string dir = plan.out_dir.string();
    *out = new splinelab_plan{std::move(plan), dir};
  });
}

void splinelab_plan_destroy(splinelab_plan* plan) { delete plan; }

const char* splinelab_plan_out_dir(const splinelab_plan* plan) {
  return plan ? plan->out_dir.c_str() : nullptr;
}

int splinelab_study_run(const splinelab_plan* plan, int workers, splinelab_result** out) {
  return guarded([&] {
    require(plan != nullptr && out != nullptr, "null handle");
    *out = new splinelab_result{splinelab::run_study(plan->plan, workers)};
  });
}

void splinelab_result_destroy(splinelab_result* result) { delete result; }

int splinelab_result_csv(const splinelab_result* result, char** csv) {
  return guarded([&] {
    require(result != nullptr && csv != nullptr, "null handle");
    std::ostringstream out;
    splinelab::write_csv(result->result, out);
    *csv = duplicate(out.str());
  });
}

int splinelab_result_json(const splinelab_result* result, char** json) {
  return guarded([&] {
    require(result != nullptr && json != nullptr, "null handle");
    *json = duplicate(splinelab::to_json(result->result).dump(2));
  });
}

int splinelab_result_write(const splinelab_result* result, const splinelab_plan* plan,
                           int workers, const char* dir) {
  return guarded([&] {
    require(result != nullptr && plan != nullptr && dir != nullptr, "null argument");
    splinelab::emit_all(result->result, plan->plan, workers, dir);
  });
}

}  // extern "C"
