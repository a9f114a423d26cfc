#pragma once

#include <string>

#include <json.hpp>

#include "habopt/optimize.hpp"

namespace habopt {

// ScalarField JSON: {"dim", "cells", "order": "row-major-last-axis-fastest",
// "values"}; ResourceField adds "constraints": {"kappa", "m0"}.
nlohmann::json field_to_json(const ScalarField& f);
ScalarField field_from_json(const nlohmann::json& j);
nlohmann::json resource_to_json(const ResourceField& m);
ResourceField resource_from_json(const nlohmann::json& j);

/// ScalarField JSON for theta plus a "diagnostics" member
/// {mu, residual_norm, iterations, total_population}.
nlohmann::json steady_to_json(const SteadySolution& sol);

/// {"p": ..., "grad": ..., "diagnostics": ...} with theta_ref's diagnostics.
nlohmann::json gradient_to_json(const GradientBundle& g);

/// f_history, final_f, bang_bang, iterations, termination, final_m inline.
nlohmann::json optim_run_to_json(const OptimRun& run);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
nlohmann::json read_json_file(const std::string& path);

}  // namespace habopt
