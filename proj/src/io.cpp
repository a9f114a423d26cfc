#include "habopt/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

#include "habopt/errors.hpp"

namespace habopt {

namespace {

constexpr const char* kOrder = "row-major-last-axis-fastest";

const nlohmann::json& member(const nlohmann::json& j, const char* key, const char* what) {
  const auto it = j.find(key);
  if (it == j.end())
    throw Error(std::string(what) + ": missing member '" + key + "'");
  return *it;
}

nlohmann::json diagnostics_json(const SteadySolution& sol) {
  return {{"mu", sol.mu},
          {"residual_norm", sol.residual_norm},
          {"iterations", sol.iterations},
          {"total_population", sol.total_population}};
}

}  // namespace

nlohmann::json field_to_json(const ScalarField& f) {
  return {{"dim", f.grid().dim()},
          {"cells", f.grid().cells_per_axis()},
          {"order", kOrder},
          {"values", f.values()}};
}

ScalarField field_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("field: expected a JSON object");
  const auto& dim = member(j, "dim", "field");
  const auto& cells = member(j, "cells", "field");
  const auto& order = member(j, "order", "field");
  const auto& values = member(j, "values", "field");
  if (!dim.is_number_integer()) throw Error("field: 'dim' must be an integer");
  if (!cells.is_array()) throw Error("field: 'cells' must be an array");
  if (!order.is_string() || order.get<std::string>() != kOrder)
    throw Error(std::string("field: 'order' must be '") + kOrder + "'");
  if (!values.is_array()) throw Error("field: 'values' must be an array");

  for (const auto& cell : cells)
    if (!cell.is_number_integer())
      throw Error("field: 'cells' entries must be integers");
  Grid grid = build_grid(dim.get<int>(), cells.get<std::vector<int>>());
  std::vector<double> data;
  data.reserve(values.size());
  for (const auto& v : values) {
    if (!v.is_number()) throw Error("field: 'values' entries must be numbers");
    data.push_back(v.get<double>());
  }
  if (static_cast<int>(data.size()) != grid.total_cells())
    throw Error("field: 'values' length does not match the grid");
  return {std::move(grid), std::move(data)};
}

nlohmann::json resource_to_json(const ResourceField& m) {
  nlohmann::json j = field_to_json(m.field());
  j["constraints"] = {{"kappa", m.constraints().kappa}, {"m0", m.constraints().m0}};
  return j;
}

ResourceField resource_from_json(const nlohmann::json& j) {
  ScalarField f = field_from_json(j);
  const auto& c = member(j, "constraints", "resource");
  const auto& kappa = member(c, "kappa", "resource constraints");
  const auto& m0 = member(c, "m0", "resource constraints");
  if (!kappa.is_number() || !m0.is_number())
    throw Error("resource: 'kappa' and 'm0' must be numbers");
  return {std::move(f), ConstraintSet(kappa.get<double>(), m0.get<double>())};
}

nlohmann::json steady_to_json(const SteadySolution& sol) {
  nlohmann::json j = field_to_json(sol.theta);
  j["diagnostics"] = diagnostics_json(sol);
  return j;
}

nlohmann::json gradient_to_json(const GradientBundle& g) {
  return {{"p", field_to_json(g.p)},
          {"grad", field_to_json(g.grad)},
          {"diagnostics", diagnostics_json(g.theta_ref)}};
}

nlohmann::json optim_run_to_json(const OptimRun& run) {
  return {{"f_history", run.f_history},
          {"final_f", run.final_f},
          {"bang_bang", run.bang_bang},
          {"iterations", run.iterations},
          {"termination", to_string(run.termination)},
          {"final_m", resource_to_json(run.final_m)}};
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file '" + path + "' for writing");
  out << content;
  if (!out) throw Error("failed writing file '" + path + "'");
}

nlohmann::json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("file '" + path + "' is not valid JSON");
  return j;
}

}  // namespace habopt
