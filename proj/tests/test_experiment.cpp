#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdot/errors.hpp"
#include "sdot/experiment.hpp"
#include "sdot/stats.hpp"

using namespace sdot;

namespace {

json ref_config(const std::string& statistic, int replicates = 60, long n = 2000) {
    return json{{"p_measure",
                 {{"type", "discrete"},
                  {"points", json::array({json::array({0.0}), json::array({1.0})})},
                  {"weights", json::array({0.25, 0.75})}}},
                {"q_measure", {{"type", "uniform_box"}, {"lo", {0.0}}, {"hi", {1.0}}}},
                {"cost", {{"cost", "power"}, {"exponent", 2.0}}},
                {"n", n},
                {"replicates", replicates},
                {"master_seed", 42},
                {"statistic", statistic},
                {"backend", "exact1d"},
                {"law_draws", 4000}};
}

} // namespace

TEST_CASE("ks_statistic: identical, shuffled, and separated samples") {
    std::vector<double> a(10000), b;
    Rng rng(derive_seed(200, {streams::property}));
    for (double& v : a) v = rng.normal();
    CHECK(ks_statistic(a, a) == doctest::Approx(0.0));

    b = a;
    std::reverse(b.begin(), b.end());
    CHECK(ks_statistic(a, b) == doctest::Approx(0.0));

    for (double& v : b) v = rng.normal() + 1.0;
    // population sup-distance for N(0,1) vs N(1,1) is about 0.383
    CHECK(ks_statistic(a, b) > 0.3);
}

TEST_CASE("experiment config validation") {
    CHECK_THROWS_AS(ExperimentConfig::from_json(json::object()), ConfigError);
    json bad = ref_config("cost");
    bad["replicates"] = 1;
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);
    bad = ref_config("cost");
    bad["n"] = 0;
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);
    bad = ref_config("cost");
    bad["statistic"] = "nonsense";
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);
}

TEST_CASE("cost experiment on the 1D reference: sane metrics, deterministic reports") {
    const ExperimentConfig cfg = ExperimentConfig::from_json(ref_config("cost"));
    const ExperimentReport report = run_experiment(cfg);

    CHECK(report.truth_value == doctest::Approx(7.0 / 48.0).epsilon(1e-12));
    CHECK(report.failed_replicates == 0);
    CHECK(report.replicate_stats.size() == 60);
    CHECK(report.ks >= 0.0);
    CHECK(report.ks <= 1.0);
    CHECK(report.ks < 0.35); // loose at 60 replicates
    for (std::size_t i = 1; i < report.quantiles_emp.size(); ++i) {
        CHECK(report.quantiles_emp[i] >= report.quantiles_emp[i - 1]);
        CHECK(report.quantiles_law[i] >= report.quantiles_law[i - 1]);
    }

    const ExperimentReport again = run_experiment(cfg);
    CHECK(report_to_json(report).dump() == report_to_json(again).dump());
    CHECK(report_to_csv(report) == report_to_csv(again));
}

TEST_CASE("csv layout: header plus one row per replicate and law draw") {
    const ExperimentConfig cfg = ExperimentConfig::from_json(ref_config("cost", 20, 500));
    const ExperimentReport report = run_experiment(cfg);
    const std::string csv = report_to_csv(report);
    const long rows = std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == 1 + 20 + 4000);
    CHECK(csv.rfind("source,value\n", 0) == 0);
}

TEST_CASE("emit/report roundtrip and io failure") {
    const ExperimentConfig cfg = ExperimentConfig::from_json(ref_config("cost", 20, 500));
    const ExperimentReport report = run_experiment(cfg);

    const std::string dir = (std::filesystem::temp_directory_path() / "sdot_emit_test").string();
    std::filesystem::remove_all(dir);
    emit_report(report, "both", dir);
    const json parsed = load_json_file(dir + "/report.json");
    CHECK(parsed.at("metrics").at("ks").get<double>() == doctest::Approx(report.ks));
    CHECK(parsed.at("config").dump() == report.config.dump());
    std::ifstream csv(dir + "/samples.csv");
    CHECK(csv.good());
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(emit_report(report, "json", "/dev/null/nested"), IoError);
}

TEST_CASE("seed isolation: a replicate depends only on its own derived seed") {
    const ExperimentConfig cfg = ExperimentConfig::from_json(ref_config("cost", 10, 500));
    const TruthContext truth = build_truth(cfg);

    std::vector<double> stats;
    for (int r = 0; r < 10; ++r) {
        const auto s = replicate_statistic(
            cfg, truth, derive_seed(cfg.master_seed, {streams::replicate, std::uint64_t(r)}));
        REQUIRE(s.has_value());
        stats.push_back(*s);
    }
    // change replicate 3's seed: its statistic moves, the others are
    // untouched because each one is a pure function of its own seed
    const auto changed = replicate_statistic(cfg, truth, derive_seed(999, {streams::replicate, 3}));
    REQUIRE(changed.has_value());
    CHECK(*changed != stats[3]);
    for (int r = 0; r < 10; ++r) {
        const auto same = replicate_statistic(
            cfg, truth, derive_seed(cfg.master_seed, {streams::replicate, std::uint64_t(r)}));
        CHECK(*same == stats[std::size_t(r)]);
    }
}

TEST_CASE("replicate statistics never read the theoretical law") {
    // replicate_statistic takes only the truth context; reports built with
    // different law sample sizes must carry identical replicate streams.
    json a = ref_config("cost", 15, 500);
    json b = a;
    b["law_draws"] = 800;
    const ExperimentReport ra = run_experiment(ExperimentConfig::from_json(a));
    const ExperimentReport rb = run_experiment(ExperimentConfig::from_json(b));
    REQUIRE(ra.replicate_stats.size() == rb.replicate_stats.size());
    for (std::size_t i = 0; i < ra.replicate_stats.size(); ++i)
        CHECK(ra.replicate_stats[i] == rb.replicate_stats[i]);
    CHECK(ra.law_sample.size() == 4000);
    CHECK(rb.law_sample.size() == 800);
}

TEST_CASE("potentials experiment: variance lands near the asymptotic value") {
    const ExperimentConfig cfg = ExperimentConfig::from_json(ref_config("potentials", 400, 4000));
    const ExperimentReport report = run_experiment(cfg);
    // Var of the z2 - z1 contrast: 3/4; 400 replicates put the sample
    // variance within ~20% with this fixed seed.
    CHECK(report.var_emp == doctest::Approx(0.75).epsilon(0.2));
    CHECK(report.law.kind == LimitLaw::Kind::gaussian);
    CHECK(report.law.gaussian_variance() == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("discrete-Q experiment uses the LP and the sup law") {
    json cfg_json = ref_config("cost", 200, 4000);
    cfg_json["q_measure"] = {{"type", "discrete"},
                             {"points", json::array({json::array({0.0}), json::array({1.0})})},
                             {"weights", json::array({0.5, 0.5})}};
    cfg_json["p_measure"]["weights"] = json::array({0.5, 0.5});
    const ExperimentConfig cfg = ExperimentConfig::from_json(cfg_json);
    const ExperimentReport report = run_experiment(cfg);
    CHECK(report.truth_value == doctest::Approx(0.0));
    CHECK(report.law.kind == LimitLaw::Kind::sup_of_gaussian);
    // the sup statistic is nonnegative here
    for (double v : report.replicate_stats) CHECK(v >= -1e-9);
    CHECK(report.ks < 0.15);
}

TEST_CASE("measures, costs, and laws parse from JSON") {
    const json pf = {{"type", "pushforward"},
                     {"base", {{"type", "uniform_box"}, {"lo", {0.0}}, {"hi", {1.0}}}},
                     {"map", "sqrt"}};
    const ContinuousMeasure Q = continuous_measure_from_json(pf);
    CHECK(Q.cdf(0.5) == doctest::Approx(0.25));

    CHECK_THROWS_AS(continuous_measure_from_json(json{{"type", "mystery"}}), ConfigError);
    CHECK_THROWS_AS(cost_from_json(json{{"cost", "bespoke"}}), ConfigError);
    CHECK(cost_from_json(json{{"cost", "power"}, {"exponent", 3.0}}).exponent == 3.0);

    const Mat cm = cost_matrix_from_csv("0,1\n1,0\n");
    CHECK(cm(0, 1) == doctest::Approx(1.0));
    CHECK(cm(1, 1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(cost_matrix_from_csv("0,1\n1\n"), ConfigError);

    LimitLaw law;
    law.kind = LimitLaw::Kind::gaussian;
    law.variance = 0.25;
    law.scale_factor = 1.5;
    law.plug_in = true;
    const LimitLaw back = limit_law_from_json(limit_law_to_json(law));
    CHECK(back.variance == doctest::Approx(0.25));
    CHECK(back.scale_factor == doctest::Approx(1.5));
    CHECK(back.plug_in);
    const auto a = simulate_limit(law, 20, 3);
    const auto b = simulate_limit(back, 20, 3);
    for (int i = 0; i < 20; ++i) CHECK(a[std::size_t(i)] == b[std::size_t(i)]);
}

TEST_CASE("sup-of-gaussian law survives a JSON roundtrip") {
    json cfg_json = ref_config("cost", 10, 100);
    cfg_json["q_measure"] = {{"type", "discrete"},
                             {"points", json::array({json::array({0.0}), json::array({1.0})})},
                             {"weights", json::array({0.5, 0.5})}};
    cfg_json["p_measure"]["weights"] = json::array({0.5, 0.5});
    const ExperimentConfig cfg = ExperimentConfig::from_json(cfg_json);
    const TruthContext truth = build_truth(cfg);
    const LimitLaw law = build_law(cfg, truth);
    const LimitLaw back = limit_law_from_json(limit_law_to_json(law));
    const auto a = simulate_limit(law, 50, 4);
    const auto b = simulate_limit(back, 50, 4);
    for (int i = 0; i < 50; ++i) CHECK(a[std::size_t(i)] == b[std::size_t(i)]);
}

TEST_CASE("a run where every replicate fails is reported, not crashed") {
    // n = 1 leaves one category empty in every replicate, so the empirical
    // weights never stay inside the open hyperoctant.
    const ExperimentConfig cfg = ExperimentConfig::from_json(ref_config("cost", 10, 1));
    const ExperimentReport report = run_experiment(cfg);
    CHECK(report.failed_replicates == 10);
    CHECK(report.too_many_failures);
    CHECK(report.replicate_stats.empty());
}

TEST_CASE("check thresholds gate the report") {
    json cfg_json = ref_config("cost", 80, 1000);
    cfg_json["check"] = {{"ks_max", 0.9}};
    ExperimentReport report = run_experiment(ExperimentConfig::from_json(cfg_json));
    CHECK(report.check_passed);

    cfg_json["check"] = {{"ks_max", 1e-6}};
    report = run_experiment(ExperimentConfig::from_json(cfg_json));
    CHECK_FALSE(report.check_passed);
}
