#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "elliptic2d.hpp"
#include "errors.hpp"
#include "flows.hpp"
#include "grid.hpp"
#include "oned.hpp"
#include "streamlines.hpp"

namespace eulerlab {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "eulerlab/1";

/// %.17g, with nan and inf spelled out.
[[nodiscard]] inline std::string format17(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

[[nodiscard]] inline double parse_double(const std::string& text, const std::string& where) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, where + ": cannot parse number '" + text + "'");
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot open " + path.string() + " for writing");
  out << text;
}

[[nodiscard]] inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

[[nodiscard]] inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

/// {schema, command, config, result}
[[nodiscard]] inline json envelope(const std::string& command, const json& config, const json& result) {
  json j;
  j["schema"] = kSchema;
  j["command"] = command;
  j["config"] = config;
  j["result"] = result;
  return j;
}

// Grids and fields

[[nodiscard]] inline json to_json(const Grid& g) {
  return {{"kind", std::string(to_string(g.kind()))},
          {"nx", g.nx()},
          {"ny", g.ny()},
          {"x", {g.x_range().lo, g.x_range().hi}},
          {"y", {g.y_range().lo, g.y_range().hi}},
          {"periodic_x", g.periodic_x()},
          {"periodic_y", g.periodic_y()}};
}

[[nodiscard]] inline Grid grid_from_json(const json& j) {
  try {
    return Grid(j.at("nx").get<int>(), j.at("ny").get<int>(), {j.at("x").at(0).get<double>(), j.at("x").at(1).get<double>()},
                {j.at("y").at(0).get<double>(), j.at("y").at(1).get<double>()},
                domain_kind_from_string(j.at("kind").get<std::string>()), j.value("periodic_x", false),
                j.value("periodic_y", false));
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("grid metadata: ") + e.what());
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Rows of a CSV with the expected header, row-major over the grid.
inline std::vector<std::vector<double>> read_csv_rows(const std::filesystem::path& path,
                                                      const std::vector<std::string>& header, std::size_t rows) {
  std::istringstream in(read_text(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError, path.string() + ": empty file");
  require(split_csv_line(line) == header, ErrorCode::ParseError, path.string() + ": unexpected header '" + line + "'");
  std::vector<std::vector<double>> out;
  out.reserve(rows);
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    std::string where = path.string() + ":" + std::to_string(number);
    require(cells.size() == header.size(), ErrorCode::ParseError, where + ": expected " +
                                                                     std::to_string(header.size()) + " columns");
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_double(cells[c], where);
    out.push_back(std::move(row));
  }
  require(out.size() == rows, ErrorCode::ParseError,
          path.string() + ": expected " + std::to_string(rows) + " rows, found " + std::to_string(out.size()));
  return out;
}

}  // namespace detail

/// x,y,value; row-major.
[[nodiscard]] inline std::string field_csv(const ScalarField& f) {
  const Grid& g = f.grid();
  std::string s = "x,y,value\n";
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) s += format17(g.x(i)) + "," + format17(g.y(j)) + "," + format17(f(i, j)) + "\n";
  }
  return s;
}

/// x,y,vx,vy; row-major.
[[nodiscard]] inline std::string field_csv(const VectorField& w) {
  const Grid& g = w.grid();
  std::string s = "x,y,vx,vy\n";
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      std::size_t k = g.index(i, j);
      s += format17(g.x(i)) + "," + format17(g.y(j)) + "," + format17(w.u_values()[k]) + "," +
           format17(w.v_values()[k]) + "\n";
    }
  }
  return s;
}

/// Field CSV plus a JSON envelope with the grid.
inline void write_field(const std::filesystem::path& csv_path, const ScalarField& f, const json& config = json::object()) {
  write_text(csv_path, field_csv(f));
  json meta = envelope("field", config, {{"grid", to_json(f.grid())}, {"csv", csv_path.filename().string()}});
  write_json(std::filesystem::path(csv_path).replace_extension(".json"), meta);
}

[[nodiscard]] inline ScalarField read_field_csv(const std::filesystem::path& path, const Grid& g) {
  auto rows = detail::read_csv_rows(path, {"x", "y", "value"}, g.size());
  ScalarField f(g);
  for (std::size_t k = 0; k < rows.size(); ++k) f[k] = rows[k][2];
  return f;
}

[[nodiscard]] inline ScalarField read_field(const std::filesystem::path& json_path) {
  json meta = read_json(json_path);
  require(meta.value("schema", "") == kSchema, ErrorCode::ParseError, json_path.string() + ": unknown schema");
  Grid g = grid_from_json(meta.at("result").at("grid"));
  return read_field_csv(json_path.parent_path() / meta.at("result").at("csv").get<std::string>(), g);
}

// Profiles

[[nodiscard]] inline std::string profile_csv(const Profile& p) {
  std::string s = "x,value\n";
  for (int k = 0; k < p.n(); ++k) s += format17(p.x(k)) + "," + format17(p.values[k]) + "\n";
  return s;
}

[[nodiscard]] inline json to_json(const Profile& p) {
  return {{"interval", {p.interval.lo, p.interval.hi}},
          {"n", p.n()},
          {"slope_lower", p.boundary_derivatives[0]},
          {"slope_upper", p.boundary_derivatives[1]},
          {"residual", p.residual},
          {"update", p.update},
          {"iterations", p.iterations},
          {"epsilon", p.epsilon},
          {"shift", p.shift},
          {"start", std::string(to_string(p.start))}};
}

// Solver reports

[[nodiscard]] inline json to_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"final_residual", r.final_residual},
          {"final_update", r.final_update},
          {"sandwich_violations", r.sandwich_violations},
          {"monotone", r.monotone},
          {"shift", r.shift},
          {"start", std::string(to_string(r.start))},
          {"method", std::string(to_string(r.method))}};
}

// Flow bundles

[[nodiscard]] inline std::string flow_csv(const Flow& flow) {
  const Grid& g = flow.grid;
  std::string s = "x,y,vx,vy,P,omega\n";
  double nan = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      std::size_t k = g.index(i, j);
      s += format17(g.x(i)) + "," + format17(g.y(j)) + "," + format17(flow.velocity.u_values()[k]) + "," +
           format17(flow.velocity.v_values()[k]) + "," + format17(flow.pressure ? (*flow.pressure)[k] : nan) + "," +
           format17(flow.vorticity[k]) + "\n";
    }
  }
  return s;
}

[[nodiscard]] inline json flow_metadata(const Flow& flow) {
  json j;
  j["grid"] = to_json(flow.grid);
  j["provenance"] = {{"kind", flow.provenance.kind == Provenance::Kind::Analytic ? "Analytic" : "FromStream"},
                     {"tag", flow.provenance.tag}};
  j["wall_rows"] = flow.wall_rows;
  j["has_pressure"] = flow.pressure.has_value();
  j["has_stream"] = flow.stream.has_value();
  json norms;
  norms["divergence_max"] = interior_max_abs(divergence(flow.velocity));
  if (flow.pressure) {
    EulerResidual r = euler_residual(flow);
    norms["momentum_max"] = std::max(interior_max_abs(r.momentum.first()), interior_max_abs(r.momentum.second()));
  }
  j["residual_norms"] = norms;
  return j;
}

/// Writes <stem>.csv, <stem>.json and, when the stream function is known,
/// <stem>_stream.csv. Returns the JSON path.
inline std::filesystem::path write_flow_bundle(const std::filesystem::path& dir, const std::string& stem,
                                               const Flow& flow, const json& config = json::object(),
                                               const json& extra = json::object()) {
  write_text(dir / (stem + ".csv"), flow_csv(flow));
  json result = flow_metadata(flow);
  result["csv"] = stem + ".csv";
  if (flow.stream) {
    write_text(dir / (stem + "_stream.csv"), field_csv(*flow.stream));
    result["stream_csv"] = stem + "_stream.csv";
  }
  for (const auto& [key, value] : extra.items()) result[key] = value;
  std::filesystem::path path = dir / (stem + ".json");
  write_json(path, envelope("flow", config, result));
  return path;
}

[[nodiscard]] inline Flow read_flow_bundle(const std::filesystem::path& json_path) {
  json meta = read_json(json_path);
  require(meta.value("schema", "") == kSchema, ErrorCode::ParseError, json_path.string() + ": unknown schema");
  try {
    const json& r = meta.at("result");
    Grid g = grid_from_json(r.at("grid"));
    auto dir = json_path.parent_path();
    auto rows = detail::read_csv_rows(dir / r.at("csv").get<std::string>(), {"x", "y", "vx", "vy", "P", "omega"},
                                      g.size());
    Flow flow{g, VectorField(g), std::nullopt, ScalarField(g), {}, {}, std::nullopt, std::nullopt};
    bool has_pressure = r.at("has_pressure").get<bool>();
    if (has_pressure) flow.pressure = ScalarField(g);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      flow.velocity.u_values()[k] = rows[k][2];
      flow.velocity.v_values()[k] = rows[k][3];
      if (has_pressure) (*flow.pressure)[k] = rows[k][4];
      flow.vorticity[k] = rows[k][5];
    }
    const json& pv = r.at("provenance");
    flow.provenance = {pv.at("kind").get<std::string>() == "Analytic" ? Provenance::Kind::Analytic
                                                                      : Provenance::Kind::FromStream,
                       pv.at("tag").get<std::string>()};
    flow.wall_rows = r.at("wall_rows").get<std::vector<int>>();
    if (r.contains("stream_csv")) flow.stream = read_field_csv(dir / r.at("stream_csv").get<std::string>(), g);
    return flow;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, json_path.string() + ": " + e.what());
  }
}

// Diagnostics

[[nodiscard]] inline json to_json(const Classification& c) {
  json j{{"kind", c.name()}};
  if (c.kind == Classification::Kind::Arc) {
    j["beta"] = c.beta;
    j["theta0"] = c.theta0;
  }
  return j;
}

[[nodiscard]] inline std::string angle_set_csv(const AngleSet& a) {
  std::string s = "bin_center,mass,occupied\n";
  for (int b = 0; b < a.n_bins; ++b) {
    s += format17(a.bin_center(b)) + "," + format17(a.mass[b]) + "," + (a.occupied[b] ? "1" : "0") + "\n";
  }
  return s;
}

[[nodiscard]] inline std::string kappa_csv(const CurvatureProfile& p) {
  std::string s = "bin_center,mass,occupied\n";
  for (int b = 0; b < p.n_bins; ++b) {
    s += format17(p.bin_center(b)) + "," + format17(p.bin_mass[b]) + "," + (p.bin_mass[b] > 0.0 ? "1" : "0") + "\n";
  }
  return s;
}

[[nodiscard]] inline json to_json(const DiagnosticsReport& r) {
  json j;
  j["total_curvature"] = r.total_curvature;
  j["J_inf_signed"] = r.J_inf_signed;
  json trace = json::array();
  for (auto [R, value] : r.J_inf_trace) trace.push_back({{"R", R}, {"value", value}});
  j["J_inf_trace"] = trace;
  j["lower_bound_gap"] = r.lower_bound_gap;
  j["verdict"] = to_json(r.verdict);
  j["kappa_cv_upper"] = r.kappa_cv_upper;
  j["kappa_cv_lower"] = r.kappa_cv_lower;
  j["kappa_cv_all"] = r.kappa_cv_all;
  j["identity_residual_max"] = r.identity_residual_max;
  j["stagnation_floor"] = r.stagnation_floor;
  j["angle_bins"] = r.angles.n_bins;
  j["angle_occupied"] = r.angles.occupied;
  j["angle_mass"] = r.angles.mass;
  j["kappa_bins"] = r.kappa.n_bins;
  j["kappa_mass"] = r.kappa.bin_mass;
  if (r.walls) {
    json w;
    if (r.walls->upper_plus) w["upper_plus"] = *r.walls->upper_plus;
    if (r.walls->upper_minus) w["upper_minus"] = *r.walls->upper_minus;
    w["lower_plus"] = r.walls->lower_plus;
    w["lower_minus"] = r.walls->lower_minus;
    j["wall_limits"] = w;
  }
  return j;
}

// Polylines

/// trace_id,order,x,y
[[nodiscard]] inline std::string polylines_csv(const std::vector<Polyline>& lines) {
  std::string s = "trace_id,order,x,y\n";
  for (std::size_t t = 0; t < lines.size(); ++t) {
    for (std::size_t k = 0; k < lines[t].points.size(); ++k) {
      s += std::to_string(t) + "," + std::to_string(k) + "," + format17(lines[t].points[k][0]) + "," +
           format17(lines[t].points[k][1]) + "\n";
    }
  }
  return s;
}

[[nodiscard]] inline json polylines_manifest(const std::vector<Polyline>& lines) {
  json arr = json::array();
  for (std::size_t t = 0; t < lines.size(); ++t) {
    const Polyline& p = lines[t];
    arr.push_back({{"trace_id", t},
                   {"seed", {p.seed[0], p.seed[1]}},
                   {"points", p.points.size()},
                   {"closed", p.closed},
                   {"termination", std::string(to_string(p.termination))}});
  }
  return arr;
}

[[nodiscard]] inline json to_json(const StagnationReport& r) {
  json points = json::array();
  for (const auto& p : r.points) points.push_back({{"x", p.x}, {"y", p.y}, {"speed", p.speed}});
  json sets = json::array();
  for (const auto& s : r.degenerate) {
    sets.push_back({{"nodes", s.nodes.size()},
                    {"x_extent", {s.x_extent.lo, s.x_extent.hi}},
                    {"y_extent", {s.y_extent.lo, s.y_extent.hi}}});
  }
  return {{"floor", r.floor}, {"points", points}, {"degenerate", sets}};
}

}  // namespace eulerlab
