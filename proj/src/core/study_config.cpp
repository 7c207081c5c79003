#include "core/study_config.hpp"

#include <charconv>
#include <fstream>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "core/error.hpp"

namespace splinelab {
namespace {

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::kConfig, msg); }

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& key) {
  const std::string s = trim(text);
  T value{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) {
    fail("key '" + key + "': cannot parse '" + s + "' as a number");
  }
  return value;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(item, key));
  return out;
}

std::vector<Knot> parse_knots(const std::string& text, const std::string& key) {
  std::vector<Knot> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) fail("key '" + key + "': expected s:w entries, got '" + item + "'");
    out.push_back({parse_number<double>(parts[0], key), parse_number<double>(parts[1], key)});
  }
  return out;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name,
          std::initializer_list<const char*> allowed)
      : tree_(tree), name_(std::move(name)) {
    if (!tree_) return;
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, child] : *tree_) {
      if (!child.empty()) fail("section [" + name_ + "]: nested key '" + key + "'");
      if (!ok.count(key)) fail("section [" + name_ + "]: unknown key '" + key + "'");
    }
  }

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> get(const std::string& key) const {
    if (!tree_) return std::nullopt;
    if (auto v = tree_->get_optional<std::string>(key)) return trim(*v);
    return std::nullopt;
  }

  std::string qualified(const std::string& key) const { return name_ + "." + key; }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

SpanElement parse_element(const Section& sec, int m) {
  SpanElement e;
  e.poly.assign(static_cast<std::size_t>(m), 0.0);
  if (auto v = sec.get("poly")) {
    auto poly = parse_list<double>(*v, sec.qualified("poly"));
    if (static_cast<int>(poly.size()) != m) {
      fail("key '" + sec.qualified("poly") + "': expected " + std::to_string(m) +
           " coefficients, got " + std::to_string(poly.size()));
    }
    e.poly = std::move(poly);
  }
  if (auto v = sec.get("knots")) {
    for (const Knot& k : parse_knots(*v, sec.qualified("knots"))) e.knots.push_back(k);
  }
  if (auto v = sec.get("representers")) {
    const KernelSpace space(m);
    for (const Knot& k : parse_knots(*v, sec.qualified("representers"))) {
      if (!(k.s >= 0.0 && k.s <= 1.0)) fail("representer location outside [0,1]");
      e = add(e, scaled(representer(space, k.s), k.w));
    }
  }
  for (const Knot& k : e.knots) {
    if (!(k.s >= 0.0 && k.s <= 1.0)) fail("knot location outside [0,1]");
  }
  return e;
}

}  // namespace

StudyPlan parse_study_plan(std::istream& in, std::optional<StudyKind> kind) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(std::string("malformed configuration: ") + e.message() + " (line " +
         std::to_string(e.line()) + ")");
  }

  static const std::set<std::string> sections{"study", "truth",  "design", "noise",
                                              "functional", "grid", "output"};
  for (const auto& [name, child] : tree) {
    if (!sections.count(name)) fail("unknown section [" + name + "]");
    if (child.empty()) fail("key '" + name + "' outside any section");
  }
  auto section = [&](const char* name) -> const pt::ptree* {
    auto it = tree.find(name);
    return it == tree.not_found() ? nullptr : &it->second;
  };

  StudyPlan plan;
  const Section study(section("study"), "study", {"kind", "m"});
  const Section truth(section("truth"), "truth", {"poly", "knots", "representers"});
  const Section design(section("design"), "design", {"kind", "edges", "weights"});
  const Section noise(section("noise"), "noise", {"kind", "sigma"});
  const Section functional(section("functional"), "functional",
                           {"kind", "t", "poly", "knots", "representers"});
  const Section grid(section("grid"), "grid",
                     {"n", "p", "lambda_scale", "replicates", "base_seed", "quad", "eps",
                      "probes"});
  const Section output(section("output"), "output", {"dir"});

  std::optional<StudyKind> file_kind;
  if (auto v = study.get("kind")) {
    file_kind = parse_study_kind(*v);
    if (!file_kind) fail("unknown study kind '" + *v + "'");
  }
  if (kind && file_kind && *kind != *file_kind) {
    fail("config declares study '" + to_string(*file_kind) + "' but '" + to_string(*kind) +
         "' was requested");
  }
  if (!kind && !file_kind) fail("study kind not given");
  plan.study = kind ? *kind : *file_kind;

  if (auto v = study.get("m")) plan.m = parse_number<int>(*v, "study.m");
  if (plan.m < 1) fail("study.m must be >= 1");

  plan.truth = parse_element(truth, plan.m);

  const std::string design_kind = design.get("kind").value_or("uniform");
  if (design_kind == "uniform") {
    if (design.get("edges") || design.get("weights")) {
      fail("design.edges/weights only apply to kind = piecewise");
    }
    plan.design = DesignDistribution::uniform();
  } else if (design_kind == "piecewise") {
    auto edges = parse_list<double>(design.get("edges").value_or(""), "design.edges");
    auto weights = parse_list<double>(design.get("weights").value_or(""), "design.weights");
    try {
      plan.design = DesignDistribution::piecewise(std::move(edges), std::move(weights));
    } catch (const Error& e) {
      fail(std::string("design: ") + e.what());
    }
  } else {
    fail("unknown design kind '" + design_kind + "'");
  }

  const std::string noise_kind = noise.get("kind").value_or("gaussian");
  if (noise_kind == "gaussian") {
    plan.noise.kind = NoiseKind::kGaussian;
  } else if (noise_kind == "uniform") {
    plan.noise.kind = NoiseKind::kUniform;
  } else {
    fail("unknown noise kind '" + noise_kind + "'");
  }
  if (auto v = noise.get("sigma")) plan.noise.sigma = parse_number<double>(*v, "noise.sigma");

  if (functional.present()) {
    const std::string fk = functional.get("kind").value_or("point");
    if (fk == "point") {
      if (functional.get("poly") || functional.get("knots") || functional.get("representers")) {
        fail("functional.poly/knots/representers only apply to kind = inner");
      }
      const double t = parse_number<double>(functional.get("t").value_or(""), "functional.t");
      if (!(t >= 0.0 && t <= 1.0)) fail("functional.t must lie in [0,1]");
      plan.functional = FunctionalSpec::point_eval(t);
    } else if (fk == "inner") {
      if (functional.get("t")) fail("functional.t only applies to kind = point");
      plan.functional = FunctionalSpec::inner(parse_element(functional, plan.m));
    } else {
      fail("unknown functional kind '" + fk + "'");
    }
  }

  if (auto v = grid.get("n")) plan.n_grid = parse_list<std::size_t>(*v, "grid.n");
  if (auto v = grid.get("p")) plan.p_grid = parse_list<double>(*v, "grid.p");
  if (auto v = grid.get("lambda_scale")) {
    plan.lambda_scale = parse_number<double>(*v, "grid.lambda_scale");
  }
  if (auto v = grid.get("replicates")) {
    plan.replicates = parse_number<std::size_t>(*v, "grid.replicates");
  }
  if (auto v = grid.get("base_seed")) {
    plan.base_seed = parse_number<std::uint64_t>(*v, "grid.base_seed");
  }
  if (auto v = grid.get("quad")) plan.quad = parse_number<int>(*v, "grid.quad");
  if (auto v = grid.get("eps")) plan.eps_grid = parse_list<double>(*v, "grid.eps");
  if (auto v = grid.get("probes")) plan.probes = parse_number<std::size_t>(*v, "grid.probes");
  if (auto v = output.get("dir")) plan.out_dir = *v;

  plan.validate();
  return plan;
}

StudyPlan load_study_plan(const std::filesystem::path& path, std::optional<StudyKind> kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config file '" + path.string() + "'");
  try {
    return parse_study_plan(in, kind);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace splinelab
