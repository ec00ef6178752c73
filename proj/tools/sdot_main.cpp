// Command-line front end: a single semidiscrete solve, the discrete LP with
// its dual face, limit-law construction, limit-law simulation, and the full
// replication experiment.
//
// Exit codes: 0 success, 2 invalid config, 3 convergence failure,
// 4 acceptance-threshold breach in `experiment --check` mode.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sdot/errors.hpp"
#include "sdot/experiment.hpp"
#include "sdot/json_io.hpp"

namespace {

using namespace sdot;

constexpr int kExitOk = 0;
constexpr int kExitBadConfig = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitCheckFailed = 4;

void write_or_print(const json& j, const std::string& out_dir, const std::string& filename) {
    const std::string text = j.dump(2) + "\n";
    if (out_dir.empty())
        std::cout << text;
    else
        write_text_file((std::filesystem::path(out_dir) / filename).string(), text);
}

SolverConfig solver_config_from(const json& cfg, Backend backend, std::uint64_t seed) {
    SolverConfig scfg;
    scfg.backend = backend;
    scfg.seed = seed;
    if (cfg.contains("solver")) {
        const json& s = cfg.at("solver");
        scfg.mc_samples = s.value("mc_samples", scfg.mc_samples);
        scfg.segment_nodes = s.value("segment_nodes", scfg.segment_nodes);
        scfg.column_cells = s.value("column_cells", scfg.column_cells);
        scfg.grad_tol = s.value("grad_tol", scfg.grad_tol);
        scfg.max_iterations = s.value("max_iterations", scfg.max_iterations);
    }
    return scfg;
}

int run_solve(const json& cfg, Backend backend, std::uint64_t seed, const std::string& out_dir) {
    const DiscreteMeasure P = discrete_measure_from_json(cfg.at("p_measure"));
    const ContinuousMeasure Q = continuous_measure_from_json(cfg.at("q_measure"));
    const CostFunction c = cost_from_json(cfg.at("cost"));
    SemidiscreteProblem problem(P, Q, c, solver_config_from(cfg, backend, seed));
    const SolveReport report = problem.solve();
    write_or_print(solve_report_to_json(report), out_dir, "solve.json");
    return kExitOk;
}

int run_discrete(const json& cfg, const std::string& out_dir) {
    const Vec p = vec_from_json(cfg.at("p"));
    const Vec q = vec_from_json(cfg.at("q"));
    Mat cost;
    if (cfg.contains("cost_matrix_csv")) {
        std::ifstream in(cfg.at("cost_matrix_csv").get<std::string>());
        if (!in) throw IoError("cannot open cost matrix CSV");
        std::stringstream buffer;
        buffer << in.rdbuf();
        cost = cost_matrix_from_csv(buffer.str());
    } else {
        cost = mat_from_json(cfg.at("cost_matrix"));
    }
    const TransportPlan sol = solve_discrete(p, q, cost);
    json out = transport_plan_to_json(sol);
    out["face"] = face_to_json(extract_dual_face(sol));
    write_or_print(out, out_dir, "discrete.json");
    return kExitOk;
}

int run_infer(const json& cfg, Backend backend, std::uint64_t seed, const std::string& out_dir) {
    ExperimentConfig ecfg;
    ecfg.p_measure = cfg.at("p_measure");
    ecfg.q_measure = cfg.at("q_measure");
    ecfg.cost = cfg.at("cost");
    ecfg.n = 1;
    ecfg.replicates = 2;
    ecfg.master_seed = seed;
    ecfg.statistic = statistic_from_name(cfg.at("statistic").get<std::string>());
    ecfg.backend = backend;
    const TruthContext truth = build_truth(ecfg);
    const LimitLaw law = build_law(ecfg, truth);
    json out = limit_law_to_json(law);
    out["truth_value"] = truth.value;
    out["truth_potentials"] = vec_to_json(truth.potentials);
    write_or_print(out, out_dir, "law.json");
    return kExitOk;
}

int run_simulate(const json& cfg, std::uint64_t seed, long draws, const std::string& out_dir,
                 const std::string& format) {
    const LimitLaw law = limit_law_from_json(cfg.contains("law") ? cfg.at("law") : cfg);
    const std::vector<double> sample = simulate_limit(law, draws, seed);
    if (format == "csv") {
        std::ostringstream out;
        out.precision(17);
        out << "source,value\n";
        for (double v : sample) out << "law," << v << "\n";
        if (out_dir.empty())
            std::cout << out.str();
        else
            write_text_file((std::filesystem::path(out_dir) / "draws.csv").string(), out.str());
    } else {
        json out{{"draws", sample}};
        write_or_print(out, out_dir, "draws.json");
    }
    return kExitOk;
}

int run_experiment_cmd(const json& cfg_json, std::optional<std::uint64_t> seed_override,
                       std::optional<std::string> backend_override, bool check,
                       const std::string& out_dir, const std::string& format) {
    json patched = cfg_json;
    if (seed_override) patched["master_seed"] = *seed_override;
    if (backend_override) patched["backend"] = *backend_override;
    const ExperimentConfig cfg = ExperimentConfig::from_json(patched);
    const ExperimentReport report = run_experiment(cfg);
    if (out_dir.empty())
        std::cout << report_to_json(report).dump(2) << "\n";
    else
        emit_report(report, format, out_dir);
    if (report.too_many_failures) return kExitNoConvergence;
    if (check && !report.check_passed) return kExitCheckFailed;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semidiscrete optimal transport: solver, limit laws, replication experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format = "json", backend_name_arg = "quadrature";
    std::uint64_t seed = 0;
    bool seed_set = false, backend_set = false;
    long draws = 10000;
    bool check = false;

    auto add_common = [&](CLI::App* cmd, bool with_backend) {
        cmd->add_option("--config", config_path, "JSON config file")->required();
        cmd->add_option("--out", out_dir, "output directory (stdout when omitted)");
        cmd->add_option("--format", format, "json|csv|both")
            ->check(CLI::IsMember({"json", "csv", "both"}));
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
        if (with_backend)
            cmd->add_option("--backend", backend_name_arg, "mc|quadrature|exact1d")
                ->check(CLI::IsMember({"mc", "quadrature", "exact1d"}))
                ->each([&](const std::string&) { backend_set = true; });
    };

    CLI::App* solve = app.add_subcommand("solve", "one semidiscrete solve");
    add_common(solve, true);
    CLI::App* discrete = app.add_subcommand("discrete", "discrete LP and dual face");
    add_common(discrete, false);
    CLI::App* infer = app.add_subcommand("infer", "limit law from a solve");
    add_common(infer, true);
    CLI::App* simulate = app.add_subcommand("simulate", "draw from a limit law");
    add_common(simulate, false);
    simulate->add_option("--draws", draws, "number of draws");
    CLI::App* experiment = app.add_subcommand("experiment", "full replication run");
    add_common(experiment, true);
    experiment->add_flag("--check", check, "exit 4 when configured thresholds are breached");

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = sdot::load_json_file(config_path);
        if (solve->parsed())
            return run_solve(cfg, sdot::backend_from_name(backend_name_arg), seed, out_dir);
        if (discrete->parsed()) return run_discrete(cfg, out_dir);
        if (infer->parsed())
            return run_infer(cfg, sdot::backend_from_name(backend_name_arg), seed, out_dir);
        if (simulate->parsed()) return run_simulate(cfg, seed, draws, out_dir, format);
        if (experiment->parsed())
            return run_experiment_cmd(
                cfg, seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt,
                backend_set ? std::optional<std::string>(backend_name_arg) : std::nullopt, check,
                out_dir, format);
    } catch (const sdot::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const sdot::NoConvergence& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
