#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdot/discrete.hpp"
#include "sdot/inference.hpp"
#include "sdot/json_io.hpp"
#include "sdot/semidiscrete.hpp"

namespace sdot {

enum class Statistic { cost, wp, potentials, sup_norm_potentials };

Statistic statistic_from_name(const std::string& name);
std::string statistic_name(Statistic s);

/// Optional pass/fail thresholds applied in `experiment --check` mode.
struct CheckThresholds {
    std::optional<double> ks_max;
    std::optional<double> mean_target, mean_abs_tol;
    std::optional<double> var_target, var_rel_tol;
};

struct ExperimentConfig {
    json p_measure, q_measure, cost;
    long n = 0;
    int replicates = 0;
    std::uint64_t master_seed = 0;
    Statistic statistic = Statistic::cost;
    Backend backend = Backend::quadrature;
    long law_draws = 100000;
    std::optional<CheckThresholds> check;

    static ExperimentConfig from_json(const json& j); // throws ConfigError
    json to_json() const;
};

/// Everything computed once from the truth measures: the solved problem, the
/// centering value/potentials, and whichever of (Hessian, dual face) the
/// configuration provides. The per-replicate path touches nothing else.
struct TruthContext {
    DiscreteMeasure P;
    CostFunction cost;

    // Continuous-Q problems
    std::shared_ptr<SemidiscreteProblem> problem;
    std::optional<ContinuousMeasure> Q;

    // Discrete-Q problems
    std::optional<Vec> q_weights;
    std::optional<Mat> cost_matrix;
    std::optional<DualFace> face;

    double value = 0.0;
    Vec potentials; // sum-zero gauge
    std::optional<Mat> hessian;
};

TruthContext build_truth(const ExperimentConfig& cfg);

/// Theoretical limit law for the configured statistic.
LimitLaw build_law(const ExperimentConfig& cfg, const TruthContext& truth);

/// One replicate: draw empirical weights from the given seed, re-solve, and
/// return the sqrt(n)-scaled fluctuation of the configured statistic (the
/// truth enters only as the centering). Returns nothing when the replicate
/// fails (a zero category count or a failed solve).
std::optional<double> replicate_statistic(const ExperimentConfig& cfg, const TruthContext& truth,
                                          std::uint64_t replicate_seed);

struct ExperimentReport {
    json config;
    double truth_value = 0.0;
    Vec truth_potentials;
    LimitLaw law;

    std::vector<double> replicate_stats; // successful replicates, in order
    std::vector<double> law_sample;
    int failed_replicates = 0;

    double ks = 0.0;
    double ks_threshold_5pct = 0.0;
    double mean_emp = 0.0, var_emp = 0.0;
    double mean_law = 0.0, var_law = 0.0;
    std::vector<double> quantile_levels, quantiles_emp, quantiles_law;

    bool too_many_failures = false; // > 1% failed replicates
    bool check_passed = true;       // thresholds, when configured
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

json report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);

/// Write report.json and/or samples.csv under out_dir.
void emit_report(const ExperimentReport& report, const std::string& format,
                 const std::string& out_dir);

} // namespace sdot
