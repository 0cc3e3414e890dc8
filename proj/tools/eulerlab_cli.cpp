#include <CLI11.hpp>
#include <eulerlab/acceptance.hpp>
#include <eulerlab/diagnostics.hpp>
#include <eulerlab/elliptic2d.hpp>
#include <eulerlab/flows.hpp>
#include <eulerlab/io.hpp>
#include <eulerlab/oned.hpp>
#include <eulerlab/streamlines.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace eulerlab;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kSolverError = 2;
constexpr int kVerifyFailed = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Options of one subcommand, mirrored in the JSON config file under the
/// flag names. Precedence: flags, then config, then defaults.
class Params {
 public:
  explicit Params(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON file with values for any of the flags");
    add("out", out_, "output directory (EULERLAB_OUT overrides the config and default)");
  }

  template <class T>
  CLI::Option* add(const std::string& key, T& var, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + key, var, help);
    entries_.push_back({key, opt, [key, &var](const nlohmann::ordered_json& j) {
                          try {
                            var = j.get<T>();
                          } catch (const nlohmann::json::exception&) {
                            throw ConfigError("config field '" + key + "': wrong type");
                          }
                        },
                        [key, &var](nlohmann::ordered_json& j) { j[key] = var; }});
    return opt;
  }

  void flag(const std::string& key, bool& var, const std::string& help) {
    CLI::Option* opt = app_->add_flag("--" + key, var, help);
    entries_.push_back({key, opt, [key, &var](const nlohmann::ordered_json& j) {
                          if (!j.is_boolean()) throw ConfigError("config field '" + key + "': expected true or false");
                          var = j.get<bool>();
                        },
                        [key, &var](nlohmann::ordered_json& j) { j[key] = var; }});
  }

  [[nodiscard]] bool given(const std::string& key) const {
    for (const Entry& e : entries_) {
      if (e.key == key) return e.option->count() > 0;
    }
    return false;
  }

  /// Applies the config file to options not given as flags.
  void resolve(const std::string& command) {
    if (!config_path_.empty()) {
      json file;
      try {
        file = json::parse(read_text(config_path_));
      } catch (const json::exception& e) {
        throw ConfigError(config_path_ + ": " + e.what());
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
      if (!file.is_object()) throw ConfigError(config_path_ + ": top level must be an object");
      const json& section = file.contains(command) && file.at(command).is_object() ? file.at(command) : file;
      for (const auto& [key, value] : section.items()) {
        if (key == command && value.is_object()) continue;
        bool known = false;
        for (const Entry& e : entries_) known = known || e.key == key;
        if (!known) throw ConfigError(config_path_ + ": unknown field '" + key + "' for " + command);
      }
      for (const Entry& e : entries_) {
        if (e.option->count() == 0 && section.contains(e.key)) e.load(section.at(e.key));
      }
    }
    if (const char* env = std::getenv("EULERLAB_OUT"); env && *env && !given("out")) out_ = env;
  }

  [[nodiscard]] json resolved() const {
    json j = json::object();
    for (const Entry& e : entries_) e.store(j);
    return j;
  }

  [[nodiscard]] fs::path out() const { return out_; }

 private:
  struct Entry {
    std::string key;
    CLI::Option* option;
    std::function<void(const json&)> load;
    std::function<void(json&)> store;
  };
  CLI::App* app_;
  std::string config_path_;
  std::string out_ = "out";
  std::vector<Entry> entries_;
};

void need(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void need_positive(double v, const std::string& field) {
  need(std::isfinite(v) && v > 0.0, "field '" + field + "' must be a positive number");
}

void need_nodes(int n, const std::string& field) { need(n >= 8, "field '" + field + "' must be at least 8"); }

bool is_config_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGrid:
    case ErrorCode::InvalidArgument:
    case ErrorCode::IncompatibleGrid:
    case ErrorCode::ParseError:
    case ErrorCode::SeedOutsideDomain:
    case ErrorCode::RTooLarge:
    case ErrorCode::NotAStripGrid:
    case ErrorCode::NonUnitReference: return true;
    default: return false;
  }
}

json error_json(const Error& e) { return {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}; }

std::string g17(double v) { return format17(v); }

// Flow sources shared by analyze and trace.

struct SolveParams {
  std::string family = "arctan";
  double lambda = std::nan("");
  double L = std::nan("");
  int nx = 769;
  int ny = 129;
  int n = 321;
  double tol = 1e-10;
  std::string far_field = "profile";
  std::string method = "dst";
  std::string start = "";

  void add_to(Params& p, bool with_family) {
    if (with_family) p.add("family", family, "arctan or allen-cahn");
    p.add("lambda", lambda, "lambda of the arctan family");
    p.add("L", L, "truncation half-length");
    p.add("nx", nx, "nodes along x1 (strip, odd)");
    p.add("ny", ny, "nodes along x2 (strip)");
    p.add("n", n, "nodes per side of the quadrant (half-plane)");
    p.add("tol", tol, "iteration tolerance");
    p.add("far-field", far_field, "strip truncation data: profile or zero");
    p.add("method", method, "inner linear solver: dst or cg");
    p.add("start", start, "sub or super (default: sub for strip, super for half-plane)");
  }
};

LinearMethod parse_method(const std::string& m) {
  if (m == "dst") return LinearMethod::SineTransform;
  if (m == "cg") return LinearMethod::ConjugateGradient;
  throw ConfigError("field 'method' must be dst or cg, got '" + m + "'");
}

std::optional<Start> parse_start(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "sub") return Start::FromSub;
  if (s == "super") return Start::FromSuper;
  throw ConfigError("field 'start' must be sub or super, got '" + s + "'");
}

struct Solved {
  Flow flow;
  json report;
};

Solved solve_strip(const SolveParams& s) {
  need(!std::isnan(s.lambda), "missing required field 'lambda'");
  need_positive(s.lambda, "lambda");
  double L = std::isnan(s.L) ? 12.0 : s.L;
  need_positive(L, "L");
  need_nodes(s.nx, "nx");
  need_nodes(s.ny, "ny");
  need(s.nx % 2 == 1, "field 'nx' must be odd");
  need_positive(s.tol, "tol");
  need(s.far_field == "profile" || s.far_field == "zero", "field 'far-field' must be profile or zero");
  Type3Options opt;
  opt.far_field = s.far_field == "zero" ? FarFieldMode::Zero : FarFieldMode::Profile;
  opt.solve.method = parse_method(s.method);
  if (auto st = parse_start(s.start)) opt.start = *st;
  Nonlinearity nl = Nonlinearity::arctan(s.lambda);
  Type3Result r = solve_type3_strip(nl, L, s.nx, s.ny, s.tol, opt);
  json report = to_json(r.report);
  report["attachment_error"] = r.attachment_error;
  report["attachment_warning"] = r.attachment_warning;
  report["evenness_gap"] = r.evenness_gap;
  report["subsolution_epsilon"] = r.epsilon;
  report["profile"] = to_json(r.profile);
  report["nonlinearity"] = nl.tag();
  return {flow_from_stream(r.u, nl), report};
}

Solved solve_halfplane(const SolveParams& s) {
  double L = std::isnan(s.L) ? 20.0 : s.L;
  need_positive(L, "L");
  need_nodes(s.n, "n");
  need_positive(s.tol, "tol");
  SaddleOptions opt;
  opt.solve.method = parse_method(s.method);
  if (auto st = parse_start(s.start)) opt.start = *st;
  Nonlinearity nl = Nonlinearity::allen_cahn();
  SaddleResult r = solve_saddle_quadrant(nl, L, s.n, s.tol, opt);
  json report = to_json(r.report);
  report["diagonal_gap"] = r.diagonal_gap;
  report["subsolution_epsilon"] = r.epsilon;
  report["profile"] = to_json(r.profile);
  report["nonlinearity"] = nl.tag();
  return {flow_from_stream(r.u, nl), report};
}

/// strip:L:nx:ny, halfplane:L:nx:ny, quadrant:L:n, torus:n[:period],
/// plane:lo:hi:n
Grid parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto number = [&](std::size_t k) {
    need(k < parts.size(), "field 'grid': '" + spec + "' is missing values");
    try {
      std::size_t used = 0;
      double v = std::stod(parts[k], &used);
      need(used == parts[k].size(), "field 'grid': bad number '" + parts[k] + "'");
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError("field 'grid': bad number '" + parts[k] + "'");
    }
  };
  auto count = [&](std::size_t k) {
    double v = number(k);
    need(v == std::floor(v) && v >= 8, "field 'grid': node counts must be integers >= 8");
    return static_cast<int>(v);
  };
  need(!parts.empty(), "field 'grid' is empty");
  const std::string& kind = parts[0];
  try {
    if (kind == "strip" && parts.size() == 4) return Grid::strip(number(1), count(2), count(3));
    if (kind == "halfplane" && parts.size() == 4) return Grid::half_plane(number(1), count(2), count(3));
    if (kind == "quadrant" && parts.size() == 3) return Grid::quadrant(number(1), count(2));
    if (kind == "torus" && parts.size() == 2) return Grid::torus(count(1));
    if (kind == "torus" && parts.size() == 3) return Grid::torus(count(1), number(2));
    if (kind == "plane" && parts.size() == 4) {
      double lo = number(1), hi = number(2);
      return Grid(count(3), count(3), {lo, hi}, {lo, hi});
    }
  } catch (const Error& e) {
    throw ConfigError(std::string("field 'grid': ") + e.what());
  }
  throw ConfigError("field 'grid': unrecognised spec '" + spec + "'");
}

struct FlowSource {
  std::string input;
  std::string catalog;
  std::string grid;
  std::string solve;
  SolveParams params;

  void add_to(Params& p) {
    p.add("input", input, "flow bundle JSON written by solve");
    p.add("catalog", catalog, "catalog flow name (couette, poiseuille, kolmogorov, sign-example, exponential, taylor-green)");
    p.add("grid", grid, "grid for --catalog, e.g. torus:512 or strip:12:257:65");
    p.add("solve", solve, "strip or halfplane: solve afresh");
    params.add_to(p, false);
  }

  Solved load() const {
    int sources = (input.empty() ? 0 : 1) + (catalog.empty() ? 0 : 1) + (solve.empty() ? 0 : 1);
    need(sources == 1, "exactly one of 'input', 'catalog', 'solve' is required");
    if (!input.empty()) {
      try {
        return {read_flow_bundle(input), json::object()};
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    if (!catalog.empty()) {
      need(!grid.empty(), "field 'grid' is required with 'catalog'");
      AnalyticFlowName name;
      try {
        name = analytic_flow_from_string(catalog);
      } catch (const Error& e) {
        throw ConfigError("field 'catalog': " + std::string(e.what()));
      }
      Grid g = parse_grid(grid);
      try {
        return {analytic_flow(name, g), json::object()};
      } catch (const Error& e) {
        throw ConfigError("field 'grid': " + std::string(e.what()));
      }
    }
    need(solve == "strip" || solve == "halfplane", "field 'solve' must be strip or halfplane");
    return solve == "strip" ? solve_strip(params) : solve_halfplane(params);
  }
};

Vec2 parse_seed(const std::string& text) {
  auto comma = text.find(',');
  need(comma != std::string::npos, "field 'seed': expected x,y, got '" + text + "'");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::logic_error&) {
    throw ConfigError("field 'seed': expected x,y, got '" + text + "'");
  }
}

void write_polylines(const fs::path& csv, const std::vector<Polyline>& lines, const std::string& command,
                     const json& config) {
  write_text(csv, polylines_csv(lines));
  write_json(fs::path(csv).replace_extension(".json"),
             envelope(command, config, {{"csv", csv.filename().string()}, {"polylines", polylines_manifest(lines)}}));
}

// Commands

struct Solve1d {
  std::string family = "arctan";
  double lambda = std::nan("");
  int n = 2001;
  double L = 20.0;
  double tol = 1e-11;
  std::string start = "sub";

  void add_to(Params& p) {
    p.add("family", family, "arctan or allen-cahn");
    p.add("lambda", lambda, "lambda of the arctan family");
    p.add("n", n, "nodes");
    p.add("L", L, "half-line length for allen-cahn");
    p.add("tol", tol, "iteration tolerance");
    p.add("start", start, "sub or super");
  }

  int run(const Params& p) const {
    need(family == "arctan" || family == "allen-cahn", "field 'family' must be arctan or allen-cahn");
    need_nodes(n, "n");
    need_positive(tol, "tol");
    OneDOptions opt;
    opt.start = parse_start(start).value_or(Start::FromSub);
    json config = p.resolved();
    if (family == "arctan") {
      need(!std::isnan(lambda), "missing required field 'lambda' for family arctan");
      need_positive(lambda, "lambda");
    } else {
      need_positive(L, "L");
    }
    try {
      Profile prof = family == "arctan" ? solve_strip_profile(Nonlinearity::arctan(lambda), n, tol, opt)
                                        : solve_heteroclinic(Nonlinearity::allen_cahn(), L, n, tol, opt);
      write_text(p.out() / "profile.csv", profile_csv(prof));
      json result = to_json(prof);
      result["converged"] = prof.residual < tol;
      result["csv"] = "profile.csv";
      write_json(p.out() / "profile.json", envelope("solve1d", config, result));
      std::printf("residual=%s slope_lower=%s slope_upper=%s iterations=%d\n", g17(prof.residual).c_str(),
                  g17(prof.boundary_derivatives[0]).c_str(), g17(prof.boundary_derivatives[1]).c_str(), prof.iterations);
      return prof.residual < tol ? kOk : kSolverError;
    } catch (const Error& e) {
      if (is_config_code(e.code())) throw;
      write_json(p.out() / "profile.json", envelope("solve1d", config, {{"error", error_json(e)}}));
      std::fprintf(stderr, "solver error: %s\n", e.what());
      return kSolverError;
    }
  }
};

int run_solve(const Params& p, const SolveParams& s, bool strip) {
  std::string name = strip ? "strip" : "halfplane";
  json config = p.resolved();
  try {
    Solved solved = strip ? solve_strip(s) : solve_halfplane(s);
    write_flow_bundle(p.out(), name + "_flow", solved.flow, config);
    write_json(p.out() / (name + "_report.json"), envelope("solve " + name, config, solved.report));
    std::printf("iterations=%d residual=%s", solved.report.at("iterations").get<int>(),
                g17(solved.report.at("final_residual").get<double>()).c_str());
    if (strip) {
      std::printf(" attachment_error=%s attachment_warning=%s", g17(solved.report.at("attachment_error")).c_str(),
                  solved.report.at("attachment_warning").get<bool>() ? "true" : "false");
    }
    std::printf("\n");
    return kOk;
  } catch (const Error& e) {
    if (is_config_code(e.code())) throw;
    write_json(p.out() / (name + "_report.json"), envelope("solve " + name, config, {{"error", error_json(e)}}));
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kSolverError;
  }
}

struct Analyze {
  FlowSource source;
  int bins = 360;
  int kappa_bins = 64;
  std::vector<double> R;
  double tol_curv = 1e-10;
  std::string quadrature = "cell";

  void add_to(Params& p) {
    source.add_to(p);
    p.add("bins", bins, "angle-set bins");
    p.add("kappa-bins", kappa_bins, "curvature-profile bins");
    p.add("R", R, "cutoff radii for the wall trace");
    p.add("tol-curv", tol_curv, "total curvature below which a flow counts as shear");
    p.add("quadrature", quadrature, "cell or nodal");
  }

  int run(const Params& p) const {
    need(bins >= 4 && bins % 2 == 0, "field 'bins' must be even and at least 4");
    need(kappa_bins >= 16 && kappa_bins % 2 == 0, "field 'kappa-bins' must be even and at least 16");
    need(quadrature == "cell" || quadrature == "nodal", "field 'quadrature' must be cell or nodal");
    json config = p.resolved();
    Solved solved;
    try {
      solved = source.load();
    } catch (const Error& e) {
      if (is_config_code(e.code())) throw;
      std::fprintf(stderr, "solver error: %s\n", e.what());
      return kSolverError;
    }
    AnalyzeOptions opt;
    opt.n_bins = bins;
    opt.kappa_bins = kappa_bins;
    opt.R_list = R;
    opt.tol_curv = tol_curv;
    opt.quadrature.kind = quadrature == "cell" ? CurvatureQuadrature::CellMidpoint : CurvatureQuadrature::Nodal;
    DiagnosticsReport r;
    try {
      r = analyze(solved.flow, opt);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    json result = to_json(r);
    result["flow"] = flow_metadata(solved.flow);
    if (!solved.report.empty()) result["solve_report"] = solved.report;
    result["angle_csv"] = "angle_set.csv";
    result["kappa_csv"] = "kappa.csv";
    write_json(p.out() / "analyze_report.json", envelope("analyze", config, result));
    write_text(p.out() / "angle_set.csv", angle_set_csv(r.angles));
    write_text(p.out() / "kappa.csv", kappa_csv(r.kappa));
    std::printf("classification=%s TC=%s Jinf=%s gap=%s\n", r.verdict.name().c_str(), g17(r.total_curvature).c_str(),
                g17(r.J_inf_signed).c_str(), g17(r.lower_bound_gap).c_str());
    return kOk;
  }
};

struct Verify {
  std::string suite = "all";
  bool fast = false;
  bool quiet = false;

  void add_to(Params& p) {
    p.add("suite", suite, "all, shear, counterexample, example, oned, type3, halfplane, distribution, strict, identities, margin, invariance");
    p.flag("fast", fast, "reduced resolutions");
    p.flag("quiet", quiet, "summary lines only");
  }

  int run(const Params&) const {
    auto names = acceptance::suite_names();
    need(std::find(names.begin(), names.end(), suite) != names.end(), "field 'suite': unknown suite '" + suite + "'");
    acceptance::Options opt;
    opt.fast = fast;
    bool all = true;
    acceptance::run(suite, opt, [&](const acceptance::CriterionResult& r) {
      std::printf("%s\n", acceptance::summary_line(r).c_str());
      if (!quiet) {
        for (const auto& c : r.checks) std::printf("%s\n", acceptance::check_line(c).c_str());
      }
      std::fflush(stdout);
      all = all && r.pass();
    });
    return all ? kOk : kVerifyFailed;
  }
};

struct Trace {
  FlowSource source;
  std::vector<std::string> seeds;
  double step = 0.0;
  int max_steps = 200000;
  std::string direction = "forward";

  void add_to(Params& p) {
    source.add_to(p);
    p.add("seed", seeds, "seed point x,y (repeatable)");
    p.add("step", step, "arc-length step (default min(hx, hy) / 2)");
    p.add("max-steps", max_steps, "step limit per trace");
    p.add("direction", direction, "forward, backward or both");
  }

  int run(const Params& p) const {
    need(!seeds.empty(), "missing required field 'seed'");
    need(direction == "forward" || direction == "backward" || direction == "both",
         "field 'direction' must be forward, backward or both");
    need(max_steps > 0, "field 'max-steps' must be positive");
    std::vector<Vec2> points;
    for (const auto& s : seeds) points.push_back(parse_seed(s));
    json config = p.resolved();
    Solved solved;
    try {
      solved = source.load();
    } catch (const Error& e) {
      if (is_config_code(e.code())) throw;
      std::fprintf(stderr, "solver error: %s\n", e.what());
      return kSolverError;
    }
    TraceOptions opt;
    opt.step = step;
    opt.max_steps = max_steps;
    opt.direction = direction == "backward" ? -1 : 1;
    std::vector<Polyline> lines;
    try {
      for (Vec2 s : points) lines.push_back(direction == "both" ? trace_through(solved.flow, s, opt) : trace(solved.flow, s, opt));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    write_polylines(p.out() / "trace.csv", lines, "trace", config);
    for (std::size_t t = 0; t < lines.size(); ++t) {
      std::printf("trace %zu: %zu points, %s\n", t, lines[t].points.size(), std::string(to_string(lines[t].termination)).c_str());
    }
    return kOk;
  }
};

struct Reproduce {
  bool fast = false;

  void add_to(Params& p) { p.flag("fast", fast, "reduced resolution"); }

  int figure1(const Params& p) const {
    json config = p.resolved();
    Nonlinearity nl = Nonlinearity::allen_cahn();
    SaddleResult r = solve_saddle_quadrant(nl, 20.0, fast ? 161 : 321, 1e-10);
    Flow flow = flow_from_stream(r.u, nl);
    ScalarField full = reflect_x2(r.u);
    std::vector<Polyline> separatrices = level_contours(full, {0.0});
    std::vector<Polyline> fan;
    for (double t : {1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 11.0, 14.0}) {
      for (double side : {-1.0, 1.0}) fan.push_back(trace_through(flow, {side * t, t}));
    }
    StagnationReport st = stagnation_points(flow);
    fs::path out = p.out();
    write_polylines(out / "figure1_separatrices.csv", separatrices, "reproduce figure1", config);
    write_polylines(out / "figure1_streamlines.csv", fan, "reproduce figure1", config);
    write_json(out / "figure1_stagnation.json", envelope("reproduce figure1", config, to_json(st)));
    std::printf("figure1: %zu separatrix polylines, %zu streamlines, %zu stagnation points\n", separatrices.size(),
                fan.size(), st.points.size());
    return kOk;
  }

  int figure2(const Params& p) const {
    json config = p.resolved();
    Nonlinearity nl = Nonlinearity::arctan(4.0);
    int ny = fast ? 65 : 129;
    Type3Result r = solve_type3_strip(nl, 12.0, 6 * (ny - 1) + 1, ny, 1e-10);
    Flow flow = flow_from_stream(r.u, nl);
    std::vector<Polyline> fan;
    for (double x1 : {-8.0, 8.0}) {
      for (double x2 : {-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.7, 0.9}) fan.push_back(trace_through(flow, {x1, x2}));
    }
    std::vector<Polyline> separatrices = level_contours(r.u, {0.0});
    StagnationReport st = stagnation_points(flow);
    fs::path out = p.out();
    write_polylines(out / "figure2_streamlines.csv", fan, "reproduce figure2", config);
    write_polylines(out / "figure2_separatrices.csv", separatrices, "reproduce figure2", config);
    write_json(out / "figure2_stagnation.json", envelope("reproduce figure2", config, to_json(st)));
    std::printf("figure2: %zu streamlines, %zu stagnation points\n", fan.size(), st.points.size());
    return kOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady Euler flows: semilinear solvers, curvature diagnostics and streamlines"};
  app.require_subcommand(1);

  auto* c1 = app.add_subcommand("solve1d", "1D strip profile or heteroclinic profile");
  Params p1(c1);
  Solve1d solve1d;
  solve1d.add_to(p1);

  auto* cs = app.add_subcommand("solve", "2D Type III solvers");
  cs->require_subcommand(1);
  auto* cstrip = cs->add_subcommand("strip", "Type III strip flow");
  Params pstrip(cstrip);
  SolveParams strip;
  strip.add_to(pstrip, false);
  auto* chalf = cs->add_subcommand("halfplane", "half-plane saddle flow");
  Params phalf(chalf);
  SolveParams half;
  half.add_to(phalf, false);

  auto* ca = app.add_subcommand("analyze", "curvature diagnostics of a flow");
  Params pa(ca);
  Analyze analyze_cmd;
  analyze_cmd.add_to(pa);

  auto* cv = app.add_subcommand("verify", "acceptance checks");
  Params pv(cv);
  Verify verify;
  verify.add_to(pv);

  auto* ct = app.add_subcommand("trace", "streamlines from seed points");
  Params pt(ct);
  Trace trace_cmd;
  trace_cmd.add_to(pt);

  auto* cr = app.add_subcommand("reproduce", "figure data");
  cr->require_subcommand(1);
  auto* cf1 = cr->add_subcommand("figure1", "half-plane saddle flow streamlines");
  Params pf1(cf1);
  Reproduce fig1;
  fig1.add_to(pf1);
  auto* cf2 = cr->add_subcommand("figure2", "Type III strip flow streamlines");
  Params pf2(cf2);
  Reproduce fig2;
  fig2.add_to(pf2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*c1) {
      p1.resolve("solve1d");
      return solve1d.run(p1);
    }
    if (*cstrip) {
      pstrip.resolve("strip");
      return run_solve(pstrip, strip, true);
    }
    if (*chalf) {
      phalf.resolve("halfplane");
      return run_solve(phalf, half, false);
    }
    if (*ca) {
      pa.resolve("analyze");
      return analyze_cmd.run(pa);
    }
    if (*cv) {
      pv.resolve("verify");
      return verify.run(pv);
    }
    if (*ct) {
      pt.resolve("trace");
      return trace_cmd.run(pt);
    }
    if (*cf1) {
      pf1.resolve("figure1");
      return fig1.figure1(pf1);
    }
    if (*cf2) {
      pf2.resolve("figure2");
      return fig2.figure2(pf2);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    if (is_config_code(e.code())) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return kConfigError;
    }
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kSolverError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSolverError;
  }
  return kConfigError;
}
