#pragma once

#include <string>

#include <json.hpp>

#include "sdot/costs.hpp"
#include "sdot/discrete.hpp"
#include "sdot/inference.hpp"
#include "sdot/measures.hpp"
#include "sdot/semidiscrete.hpp"

namespace sdot {

using nlohmann::json;

/// Measure descriptions:
///   {"type":"uniform_box","lo":[...],"hi":[...]}
///   {"type":"discrete","points":[[...],...],"weights":[...]}
///   {"type":"pushforward","base":{...},"map":"sqrt"}
/// The optional "quadrature" object {"cells":int,"nodes":int} tunes the
/// attached scheme of box-supported measures.
bool is_discrete_measure(const json& j);
DiscreteMeasure discrete_measure_from_json(const json& j);
ContinuousMeasure continuous_measure_from_json(const json& j);

/// {"cost":"power","exponent":2.0}
CostFunction cost_from_json(const json& j);

json potentials_to_json(const Potentials& z);
json solve_report_to_json(const SolveReport& report);

json transport_plan_to_json(const TransportPlan& sol);
json face_to_json(const DualFace& face);
DualFace face_from_json(const json& j);

json limit_law_to_json(const LimitLaw& law);
LimitLaw limit_law_from_json(const json& j);

std::string backend_name(Backend backend);
Backend backend_from_name(const std::string& name);

Vec vec_from_json(const json& j);
json vec_to_json(const Vec& v);
Mat mat_from_json(const json& j);
json mat_to_json(const Mat& m);

/// Cost matrix from CSV text: one row per line, comma-separated entries.
Mat cost_matrix_from_csv(const std::string& text);

json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace sdot
