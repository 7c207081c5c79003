#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "splinelab/splinelab.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Failure {
  int exit_code;
  std::string message;
};

// Bad input maps to the validation exit code, numerical or I/O trouble to the
// runtime one.
int exit_code_for(int status) {
  switch (status) {
    case SPLINELAB_INVALID_ARGUMENT:
    case SPLINELAB_OUT_OF_DOMAIN:
    case SPLINELAB_DUPLICATE_KNOTS:
    case SPLINELAB_TOO_FEW_POINTS:
    case SPLINELAB_CONFIG:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

void check(int status) {
  if (status != SPLINELAB_OK) throw Failure{exit_code_for(status), splinelab_last_error()};
}

struct Deleter {
  void operator()(splinelab_space* p) const { splinelab_space_destroy(p); }
  void operator()(splinelab_fit* p) const { splinelab_fit_destroy(p); }
  void operator()(splinelab_plan* p) const { splinelab_plan_destroy(p); }
  void operator()(splinelab_result* p) const { splinelab_result_destroy(p); }
  void operator()(char* p) const { splinelab_string_free(p); }
};
template <class T>
using Owned = std::unique_ptr<T, Deleter>;

Owned<splinelab_space> make_space(int m) {
  splinelab_space* raw = nullptr;
  check(splinelab_space_create(m, &raw));
  return Owned<splinelab_space>(raw);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Output goes to `path`, or stdout when the path is empty or "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Failure{kExitRuntime, "cannot open '" + path + "' for writing"};
    }
  }
  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  return cells;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Failure{kExitValidation, where + ": cannot parse '" + s + "' as a number"};
}

// Reads a CSV with a header naming a `t` column and, when needed, a `y` column.
void read_dataset(const std::string& path, bool need_y, std::vector<double>& t,
                  std::vector<double>& y) {
  std::ifstream in(path);
  if (!in) throw Failure{kExitValidation, "cannot open data file '" + path + "'"};
  std::string line;
  if (!std::getline(in, line)) throw Failure{kExitValidation, path + ": empty file"};
  const auto header = split_csv_line(line);
  int ti = -1, yi = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "t") ti = static_cast<int>(i);
    if (header[i] == "y") yi = static_cast<int>(i);
  }
  if (ti < 0 || (need_y && yi < 0)) {
    throw Failure{kExitValidation, path + ": header must name columns t" + (need_y ? ",y" : "")};
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    const std::string where = path + ":" + std::to_string(row);
    if (static_cast<int>(cells.size()) <= std::max(ti, yi)) {
      throw Failure{kExitValidation, where + ": too few columns"};
    }
    t.push_back(to_double(cells[static_cast<std::size_t>(ti)], where));
    if (yi >= 0) y.push_back(to_double(cells[static_cast<std::size_t>(yi)], where));
  }
}

std::vector<double> uniform_grid(int points) {
  std::vector<double> g;
  for (int i = 0; i < points; ++i) g.push_back(static_cast<double>(i) / (points - 1));
  return g;
}

struct KernelOptions {
  int m = 2;
  int grid = 11;
  std::string out;
};

void run_kernel(const KernelOptions& o) {
  const auto space = make_space(o.m);
  const auto g = uniform_grid(o.grid);
  Sink sink(o.out);
  auto& out = sink.out();
  out << "s,t,k0,k1,k\n";
  for (double s : g) {
    for (double t : g) {
      double k0 = 0, k1 = 0, k = 0;
      check(splinelab_kernel_eval(space.get(), s, t, &k0, &k1, &k));
      out << fmt(s) << ',' << fmt(t) << ',' << fmt(k0) << ',' << fmt(k1) << ',' << fmt(k) << '\n';
    }
  }
}

struct FitOptions {
  std::string data;
  int m = 2;
  double lambda = 0.0;
  int grid = 201;
  std::string out;
  std::string coefficients;
};

void run_fit(const FitOptions& o) {
  std::vector<double> t, y;
  read_dataset(o.data, true, t, y);
  const auto space = make_space(o.m);
  splinelab_fit* raw = nullptr;
  check(splinelab_fit_create(space.get(), t.data(), y.data(), t.size(), o.lambda, &raw));
  const Owned<splinelab_fit> fit(raw);

  double residual = 0, cond = 0;
  int ill = 0;
  check(splinelab_fit_diagnostics(fit.get(), &residual, &cond, &ill));
  if (ill) std::cerr << "warning: condition estimate " << fmt(cond) << " exceeds 1e12\n";

  {
    Sink sink(o.out);
    auto& out = sink.out();
    out << "t,mu_hat\n";
    for (double s : uniform_grid(o.grid)) {
      double v = 0;
      check(splinelab_fit_eval(fit.get(), s, &v));
      out << fmt(s) << ',' << fmt(v) << '\n';
    }
  }
  if (!o.coefficients.empty()) {
    const std::size_t n = splinelab_fit_size(fit.get());
    std::vector<double> poly(static_cast<std::size_t>(o.m)), knots(n), weights(n);
    check(splinelab_fit_coefficients(fit.get(), poly.data(), knots.data(), weights.data()));
    Sink sink(o.coefficients);
    auto& out = sink.out();
    out << "kind,index,location,coefficient\n";
    for (std::size_t j = 0; j < poly.size(); ++j) {
      out << "poly," << j << ",," << fmt(poly[j]) << '\n';
    }
    for (std::size_t i = 0; i < n; ++i) {
      out << "knot," << i << ',' << fmt(knots[i]) << ',' << fmt(weights[i]) << '\n';
    }
  }
}

struct SpectralOptions {
  std::string data;
  int m = 2;
  double lambda = 0.0;
  double cutoff = 1e-12;
  std::string out;
};

void run_spectral(const SpectralOptions& o) {
  std::vector<double> t, y;
  read_dataset(o.data, false, t, y);
  const auto space = make_space(o.m);
  char* raw = nullptr;
  check(splinelab_spectral_json(space.get(), t.data(), t.size(), o.lambda, o.cutoff, &raw));
  const Owned<char> json(raw);
  Sink sink(o.out);
  sink.out() << json.get() << '\n';
}

struct StudyOptions {
  std::string kind;
  std::string config;
  std::string out;
  int workers = 1;
};

void run_study(const StudyOptions& o) {
  splinelab_plan* plan_raw = nullptr;
  check(splinelab_plan_load(o.config.c_str(), o.kind.c_str(), &plan_raw));
  const Owned<splinelab_plan> plan(plan_raw);
  splinelab_result* result_raw = nullptr;
  check(splinelab_study_run(plan.get(), o.workers, &result_raw));
  const Owned<splinelab_result> result(result_raw);
  const std::string dir = o.out.empty() ? splinelab_plan_out_dir(plan.get()) : o.out;
  check(splinelab_result_write(result.get(), plan.get(), o.workers, dir.c_str()));
  std::cerr << "wrote " << o.kind << " results to " << dir << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized spline estimation and asymptotic studies on H^m([0,1])"};
  app.set_version_flag("--version", std::string(splinelab_version()));
  app.require_subcommand(1);

  KernelOptions ko;
  auto* kernel = app.add_subcommand("kernel", "Tabulate k0, k1 and k on a uniform grid");
  kernel->add_option("--m", ko.m, "Sobolev order")->check(CLI::PositiveNumber);
  kernel->add_option("--grid", ko.grid, "Grid points per axis")->check(CLI::Range(2, 100000));
  kernel->add_option("--out", ko.out, "Output CSV (default stdout)");

  FitOptions fo;
  auto* fit = app.add_subcommand("fit", "Fit a penalized spline to a t,y CSV");
  fit->add_option("--data", fo.data, "Input CSV with columns t,y")->required();
  fit->add_option("--m", fo.m, "Sobolev order")->check(CLI::PositiveNumber);
  fit->add_option("--lambda", fo.lambda, "Penalty weight (0 interpolates)");
  fit->add_option("--grid", fo.grid, "Evaluation grid size")->check(CLI::Range(2, 10000000));
  fit->add_option("--out", fo.out, "Grid CSV t,mu_hat (default stdout)");
  fit->add_option("--coefficients", fo.coefficients, "Coefficient CSV");

  SpectralOptions so;
  auto* spectral = app.add_subcommand("spectral", "Spectrum of U_n at a design, as JSON");
  spectral->add_option("--data", so.data, "CSV with a t column")->required();
  spectral->add_option("--m", so.m, "Sobolev order")->check(CLI::PositiveNumber);
  spectral->add_option("--lambda", so.lambda, "Penalty weight for the operator norm");
  spectral->add_option("--cutoff", so.cutoff, "Relative eigenvalue cutoff");
  spectral->add_option("--out", so.out, "Output JSON (default stdout)");

  StudyOptions st;
  auto* study = app.add_subcommand("study", "Run a Monte Carlo study");
  study->add_option("kind", st.kind, "converge, blowup, rate or gamma")
      ->required()
      ->check(CLI::IsMember({"converge", "blowup", "rate", "gamma"}));
  study->add_option("--config", st.config, "Study configuration file")->required();
  study->add_option("--out", st.out, "Output directory (overrides the config)");
  study->add_option("--workers", st.workers, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*kernel) run_kernel(ko);
    if (*fit) run_fit(fo);
    if (*spectral) run_spectral(so);
    if (*study) run_study(st);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
