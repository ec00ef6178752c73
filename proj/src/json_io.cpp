#include "sdot/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdot/errors.hpp"

namespace sdot {

Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("expected an array of numbers");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[int(i)] = j[i].get<double>();
    return v;
}

json vec_to_json(const Vec& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("expected a matrix (array of arrays)");
    const std::size_t cols = j[0].size();
    Mat m(j.size(), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != cols) throw ConfigError("ragged matrix rows");
        for (std::size_t k = 0; k < cols; ++k) m(int(i), int(k)) = j[i][k].get<double>();
    }
    return m;
}

json mat_to_json(const Mat& m) {
    json out = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        out.push_back(row);
    }
    return out;
}

bool is_discrete_measure(const json& j) {
    return j.is_object() && j.value("type", "") == "discrete";
}

DiscreteMeasure discrete_measure_from_json(const json& j) {
    if (!is_discrete_measure(j)) throw ConfigError("expected a discrete measure description");
    std::vector<Vec> points;
    for (const auto& pj : j.at("points")) points.push_back(vec_from_json(pj));
    return DiscreteMeasure::create(std::move(points), vec_from_json(j.at("weights")));
}

namespace {

QuadratureScheme scheme_from_json(const json& j) {
    QuadratureScheme scheme;
    if (j.contains("quadrature")) {
        const json& q = j.at("quadrature");
        scheme.cells_per_dim = q.value("cells", scheme.cells_per_dim);
        scheme.nodes_per_cell = q.value("nodes", scheme.nodes_per_cell);
    }
    return scheme;
}

} // namespace

ContinuousMeasure continuous_measure_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw ConfigError("expected a measure description with a type");
    const std::string type = j.at("type").get<std::string>();
    if (type == "uniform_box")
        return uniform_box(vec_from_json(j.at("lo")), vec_from_json(j.at("hi")),
                           scheme_from_json(j));
    if (type == "pushforward")
        return pushforward_1d(continuous_measure_from_json(j.at("base")),
                              j.at("map").get<std::string>());
    throw ConfigError("unknown continuous measure type '" + type + "'");
}

CostFunction cost_from_json(const json& j) {
    if (!j.is_object() || j.value("cost", "") != "power")
        throw ConfigError("expected {\"cost\":\"power\",\"exponent\":...}");
    return power_cost(j.at("exponent").get<double>());
}

std::string backend_name(Backend backend) {
    switch (backend) {
    case Backend::mc: return "mc";
    case Backend::quadrature: return "quadrature";
    case Backend::exact1d: return "exact1d";
    }
    return "?";
}

Backend backend_from_name(const std::string& name) {
    if (name == "mc") return Backend::mc;
    if (name == "quadrature") return Backend::quadrature;
    if (name == "exact1d") return Backend::exact1d;
    throw ConfigError("unknown backend '" + name + "'");
}

namespace {

std::string gauge_name(Gauge g) {
    switch (g) {
    case Gauge::sum_zero: return "sum_zero";
    case Gauge::first_zero: return "first_zero";
    case Gauge::raw: return "raw";
    }
    return "?";
}

} // namespace

json potentials_to_json(const Potentials& z) {
    return {{"values", vec_to_json(z.values)}, {"gauge", gauge_name(z.gauge)}};
}

json solve_report_to_json(const SolveReport& report) {
    json out{{"backend", backend_name(report.backend)},
             {"cost", report.cost},
             {"potentials", potentials_to_json(report.potentials)},
             {"cell_probs", vec_to_json(report.cell_probs)},
             {"grad_norm", report.grad_norm},
             {"iterations", report.iterations},
             {"integration_noise", report.integration_noise}};
    if (report.hessian) out["hessian"] = mat_to_json(*report.hessian);
    return out;
}

json transport_plan_to_json(const TransportPlan& sol) {
    return {{"value", sol.value},
            {"plan", mat_to_json(sol.plan)},
            {"dual_u", vec_to_json(sol.dual_u)},
            {"dual_v", vec_to_json(sol.dual_v)}};
}

json face_to_json(const DualFace& face) {
    json support = json::array();
    for (auto [i, j] : face.support) support.push_back(json::array({i, j}));
    return {{"cost_matrix", mat_to_json(face.cost)},
            {"p", vec_to_json(face.p)},
            {"q", vec_to_json(face.q)},
            {"value", face.value},
            {"support", support},
            {"gauge", "sum_u_zero"}};
}

DualFace face_from_json(const json& j) {
    DualFace face;
    face.cost = mat_from_json(j.at("cost_matrix"));
    face.p = vec_from_json(j.at("p"));
    face.q = vec_from_json(j.at("q"));
    face.value = j.at("value").get<double>();
    for (const auto& pair : j.at("support"))
        face.support.emplace_back(pair[0].get<int>(), pair[1].get<int>());
    return face;
}

json limit_law_to_json(const LimitLaw& law) {
    json out{{"scale_factor", law.scale_factor}, {"plug_in", law.plug_in}};
    switch (law.kind) {
    case LimitLaw::Kind::gaussian:
        out["kind"] = "gaussian";
        out["variance"] = law.variance;
        break;
    case LimitLaw::Kind::sup_of_gaussian:
        out["kind"] = "sup_of_gaussian";
        out["weights"] = vec_to_json(law.weights);
        out["face"] = face_to_json(*law.face);
        break;
    case LimitLaw::Kind::sup_abs_gaussian:
        out["kind"] = "sup_abs_gaussian";
        out["covariance"] = mat_to_json(law.covariance);
        break;
    }
    return out;
}

LimitLaw limit_law_from_json(const json& j) {
    LimitLaw law;
    law.scale_factor = j.value("scale_factor", 1.0);
    law.plug_in = j.value("plug_in", false);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") {
        law.kind = LimitLaw::Kind::gaussian;
        law.variance = j.at("variance").get<double>();
    } else if (kind == "sup_of_gaussian") {
        law.kind = LimitLaw::Kind::sup_of_gaussian;
        law.weights = vec_from_json(j.at("weights"));
        law.face = face_from_json(j.at("face"));
    } else if (kind == "sup_abs_gaussian") {
        law.kind = LimitLaw::Kind::sup_abs_gaussian;
        law.covariance = mat_from_json(j.at("covariance"));
    } else {
        throw ConfigError("unknown limit-law kind '" + kind + "'");
    }
    return law;
}

Mat cost_matrix_from_csv(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("cost_matrix_from_csv: empty input");
    Mat m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw ConfigError("ragged CSV rows");
        for (std::size_t k = 0; k < rows[i].size(); ++k) m(int(i), int(k)) = rows[i][k];
    }
    return m;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("JSON parse error in '" + path + "': " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace sdot
