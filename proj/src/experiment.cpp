#include "sdot/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <future>
#include <sstream>
#include <thread>

#include "sdot/errors.hpp"
#include "sdot/stats.hpp"

namespace sdot {

Statistic statistic_from_name(const std::string& name) {
    if (name == "cost") return Statistic::cost;
    if (name == "wp") return Statistic::wp;
    if (name == "potentials") return Statistic::potentials;
    if (name == "sup_norm_potentials") return Statistic::sup_norm_potentials;
    throw ConfigError("unknown statistic '" + name + "'");
}

std::string statistic_name(Statistic s) {
    switch (s) {
    case Statistic::cost: return "cost";
    case Statistic::wp: return "wp";
    case Statistic::potentials: return "potentials";
    case Statistic::sup_norm_potentials: return "sup_norm_potentials";
    }
    return "?";
}

namespace {

// When the config does not pin a backend, 1D instances with a quantile and
// a strictly convex cost default to the exact oracle solver; it removes the
// integration noise from the replication loop.
Backend default_backend(const json& p_measure, const json& q_measure, const json& cost) {
    try {
        if (is_discrete_measure(q_measure)) return Backend::quadrature;
        const ContinuousMeasure Q = continuous_measure_from_json(q_measure);
        if (Q.dim != 1 || !Q.has_cdf()) return Backend::quadrature;
        if (!(cost_from_json(cost).exponent > 1.0)) return Backend::quadrature;
        if (!discrete_measure_from_json(p_measure).sorted_1d()) return Backend::quadrature;
        return Backend::exact1d;
    } catch (...) {
        return Backend::quadrature;
    }
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        cfg.p_measure = j.at("p_measure");
        cfg.q_measure = j.at("q_measure");
        cfg.cost = j.at("cost");
        cfg.n = j.at("n").get<long>();
        cfg.replicates = j.at("replicates").get<int>();
        cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
        cfg.statistic = statistic_from_name(j.at("statistic").get<std::string>());
        cfg.backend = j.contains("backend")
                          ? backend_from_name(j.at("backend").get<std::string>())
                          : default_backend(cfg.p_measure, cfg.q_measure, cfg.cost);
        cfg.law_draws = j.value("law_draws", 100000L);
        if (j.contains("check")) {
            const json& c = j.at("check");
            CheckThresholds t;
            if (c.contains("ks_max")) t.ks_max = c.at("ks_max").get<double>();
            if (c.contains("mean_target")) t.mean_target = c.at("mean_target").get<double>();
            if (c.contains("mean_abs_tol")) t.mean_abs_tol = c.at("mean_abs_tol").get<double>();
            if (c.contains("var_target")) t.var_target = c.at("var_target").get<double>();
            if (c.contains("var_rel_tol")) t.var_rel_tol = c.at("var_rel_tol").get<double>();
            cfg.check = t;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad experiment config: ") + e.what());
    }
    if (cfg.replicates < 2) throw ConfigError("replicates >= 2 required");
    if (cfg.n < 1) throw ConfigError("n >= 1 required");
    if (cfg.law_draws < 1) throw ConfigError("law_draws >= 1 required");
    return cfg;
}

json ExperimentConfig::to_json() const {
    json j{{"p_measure", p_measure},
           {"q_measure", q_measure},
           {"cost", cost},
           {"n", n},
           {"replicates", replicates},
           {"master_seed", master_seed},
           {"statistic", statistic_name(statistic)},
           {"backend", backend_name(backend)},
           {"law_draws", law_draws}};
    if (check) {
        json c = json::object();
        if (check->ks_max) c["ks_max"] = *check->ks_max;
        if (check->mean_target) c["mean_target"] = *check->mean_target;
        if (check->mean_abs_tol) c["mean_abs_tol"] = *check->mean_abs_tol;
        if (check->var_target) c["var_target"] = *check->var_target;
        if (check->var_rel_tol) c["var_rel_tol"] = *check->var_rel_tol;
        j["check"] = c;
    }
    return j;
}

namespace {

Mat pairwise_cost_matrix(const CostFunction& c, const DiscreteMeasure& P,
                         const DiscreteMeasure& Qd) {
    Mat cm(P.size(), Qd.size());
    for (int i = 0; i < P.size(); ++i)
        for (int j = 0; j < Qd.size(); ++j)
            cm(i, j) = c.eval(P.points[std::size_t(i)], Qd.points[std::size_t(j)]);
    return cm;
}

// Contrast used to reduce the vector potentials statistic to a scalar
// stream: last component minus first, in the sum-zero gauge.
Vec potentials_contrast(int m) {
    Vec w = Vec::Zero(m);
    w[0] = -1.0;
    w[m - 1] = 1.0;
    return w;
}

} // namespace

TruthContext build_truth(const ExperimentConfig& cfg) {
    TruthContext truth;
    truth.P = discrete_measure_from_json(cfg.p_measure);
    truth.cost = cost_from_json(cfg.cost);

    if (is_discrete_measure(cfg.q_measure)) {
        const DiscreteMeasure Qd = discrete_measure_from_json(cfg.q_measure);
        truth.q_weights = Qd.weights;
        truth.cost_matrix = pairwise_cost_matrix(truth.cost, truth.P, Qd);
        const TransportPlan plan = solve_discrete(truth.P.weights, Qd.weights, *truth.cost_matrix);
        truth.face = extract_dual_face(plan);
        truth.value = plan.value;
        truth.potentials = project_sum_zero(plan.dual_u);
        return truth;
    }

    truth.Q = continuous_measure_from_json(cfg.q_measure);
    SolverConfig scfg;
    scfg.backend = cfg.backend;
    scfg.seed = cfg.master_seed;
    truth.problem = std::make_shared<SemidiscreteProblem>(truth.P, *truth.Q, truth.cost, scfg);
    const SolveReport report = truth.problem->solve();
    truth.value = report.cost;
    truth.potentials = regauge(report.potentials, Gauge::sum_zero).values;
    truth.hessian = report.hessian;
    return truth;
}

LimitLaw build_law(const ExperimentConfig& cfg, const TruthContext& truth) {
    switch (cfg.statistic) {
    case Statistic::cost:
    case Statistic::wp: {
        LimitLaw cost_law = truth.face
                                ? cost_limit_law(*truth.face, truth.P.weights)
                                : cost_limit_law(truth.potentials, truth.P.weights, truth.cost,
                                                 *truth.Q);
        if (cfg.statistic == Statistic::cost) return cost_law;
        return wp_limit_law(cost_law, truth.cost.exponent, truth.value);
    }
    case Statistic::potentials: {
        if (!truth.hessian)
            throw ConfigError("potentials statistic needs a solve with a Hessian");
        const Mat cov = potentials_covariance(*truth.hessian, truth.P.weights);
        const Vec w = potentials_contrast(truth.P.size());
        LimitLaw law;
        law.kind = LimitLaw::Kind::gaussian;
        law.variance = w.dot(cov * w);
        return law;
    }
    case Statistic::sup_norm_potentials: {
        if (!truth.hessian)
            throw ConfigError("sup_norm_potentials statistic needs a solve with a Hessian");
        return sup_norm_potential_law(potentials_covariance(*truth.hessian, truth.P.weights));
    }
    }
    throw ConfigError("unreachable statistic");
}

std::optional<double> replicate_statistic(const ExperimentConfig& cfg, const TruthContext& truth,
                                          std::uint64_t replicate_seed) {
    const EmpiricalWeights wts = sample_discrete(truth.P, cfg.n, replicate_seed);
    for (long count : wts.counts)
        if (count == 0) return std::nullopt; // empirical weights left the open hyperoctant
    const Vec p_hat = wts.frequencies();
    const double root_n = std::sqrt(double(cfg.n));

    try {
        if (truth.face) {
            const TransportPlan sol = solve_discrete(p_hat, *truth.q_weights, *truth.cost_matrix);
            switch (cfg.statistic) {
            case Statistic::cost: return root_n * (sol.value - truth.value);
            case Statistic::wp: {
                const double e = truth.cost.exponent;
                return root_n * (std::pow(sol.value, 1.0 / e) - std::pow(truth.value, 1.0 / e));
            }
            default:
                throw ConfigError("potentials statistics need a unique dual (continuous Q)");
            }
        }

        const SolveReport sol = truth.problem->solve(p_hat, &truth.potentials);
        switch (cfg.statistic) {
        case Statistic::cost: return root_n * (sol.cost - truth.value);
        case Statistic::wp: {
            const double e = truth.cost.exponent;
            return root_n * (std::pow(sol.cost, 1.0 / e) - std::pow(truth.value, 1.0 / e));
        }
        case Statistic::potentials: {
            const Vec delta = regauge(sol.potentials, Gauge::sum_zero).values - truth.potentials;
            return root_n * potentials_contrast(truth.P.size()).dot(delta);
        }
        case Statistic::sup_norm_potentials: {
            const Vec delta = regauge(sol.potentials, Gauge::sum_zero).values - truth.potentials;
            return root_n * delta.cwiseAbs().maxCoeff();
        }
        }
    } catch (const NoConvergence&) {
        return std::nullopt;
    }
    return std::nullopt;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const TruthContext truth = build_truth(cfg);

    ExperimentReport report;
    report.config = cfg.to_json();
    report.truth_value = truth.value;
    report.truth_potentials = truth.potentials;
    report.law = build_law(cfg, truth);

    // Replicates run concurrently in index chunks; each one is a pure
    // function of its own derived seed, and the results are assembled in
    // replicate order, so the report does not depend on the scheduling.
    std::vector<std::optional<double>> per_replicate(std::size_t(cfg.replicates));
    {
        const int workers =
            std::max(1, std::min(int(std::thread::hardware_concurrency()), cfg.replicates));
        std::vector<std::future<void>> futures;
        futures.reserve(std::size_t(workers));
        for (int w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&, w] {
                for (int r = w; r < cfg.replicates; r += workers) {
                    const std::uint64_t seed =
                        derive_seed(cfg.master_seed, {streams::replicate, std::uint64_t(r)});
                    per_replicate[std::size_t(r)] = replicate_statistic(cfg, truth, seed);
                }
            }));
        }
        for (auto& f : futures) f.get();
    }
    report.replicate_stats.reserve(std::size_t(cfg.replicates));
    for (const auto& stat : per_replicate) {
        if (stat)
            report.replicate_stats.push_back(*stat);
        else
            ++report.failed_replicates;
    }
    report.too_many_failures = report.failed_replicates * 100 > cfg.replicates;

    report.law_sample = simulate_limit(report.law, cfg.law_draws,
                                       derive_seed(cfg.master_seed, {streams::law_sample}));

    report.quantile_levels = {0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99};
    if (report.replicate_stats.size() >= 2) {
        report.ks = ks_statistic(report.replicate_stats, report.law_sample);
        report.ks_threshold_5pct =
            ks_critical_5pct(report.replicate_stats.size(), report.law_sample.size());
        report.mean_emp = sample_mean(report.replicate_stats);
        report.var_emp = sample_variance(report.replicate_stats);
        report.mean_law = sample_mean(report.law_sample);
        report.var_law = sample_variance(report.law_sample);
        for (double level : report.quantile_levels) {
            report.quantiles_emp.push_back(sample_quantile(report.replicate_stats, level));
            report.quantiles_law.push_back(sample_quantile(report.law_sample, level));
        }
    }

    if (cfg.check) {
        const CheckThresholds& t = *cfg.check;
        bool ok = !report.too_many_failures;
        if (t.ks_max) ok = ok && report.ks <= *t.ks_max;
        if (t.mean_target && t.mean_abs_tol)
            ok = ok && std::abs(report.mean_emp - *t.mean_target) <= *t.mean_abs_tol;
        if (t.var_target && t.var_rel_tol)
            ok = ok && std::abs(report.var_emp - *t.var_target) <= *t.var_rel_tol * *t.var_target;
        report.check_passed = ok;
    }
    return report;
}

json report_to_json(const ExperimentReport& report) {
    json metrics{{"ks", report.ks},
                 {"ks_threshold_5pct", report.ks_threshold_5pct},
                 {"mean_empirical", report.mean_emp},
                 {"mean_law", report.mean_law},
                 {"var_empirical", report.var_emp},
                 {"var_law", report.var_law},
                 {"failed_replicates", report.failed_replicates},
                 {"too_many_failures", report.too_many_failures},
                 {"check_passed", report.check_passed}};
    json quantiles{{"levels", report.quantile_levels},
                   {"empirical", report.quantiles_emp},
                   {"law", report.quantiles_law}};
    return json{{"config", report.config},
                {"truth", {{"value", report.truth_value},
                           {"potentials", vec_to_json(report.truth_potentials)}}},
                {"law", limit_law_to_json(report.law)},
                {"metrics", metrics},
                {"quantiles", quantiles}};
}

std::string report_to_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "source,value\n";
    for (double v : report.replicate_stats) out << "replicate," << v << "\n";
    for (double v : report.law_sample) out << "law," << v << "\n";
    return out.str();
}

void emit_report(const ExperimentReport& report, const std::string& format,
                 const std::string& out_dir) {
    const std::filesystem::path dir(out_dir);
    if (format == "json" || format == "both") {
        write_text_file((dir / "report.json").string(), report_to_json(report).dump(2) + "\n");
    }
    if (format == "csv" || format == "both") {
        write_text_file((dir / "samples.csv").string(), report_to_csv(report));
    }
    if (format != "json" && format != "csv" && format != "both")
        throw ConfigError("emit_report: unknown format '" + format + "'");
}

} // namespace sdot
