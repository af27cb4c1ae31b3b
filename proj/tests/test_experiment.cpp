#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "garble/experiment.hpp"

using garble::CovariateSpec;
using garble::default_gamma_grid;
using garble::ExperimentConfig;
using garble::ExperimentRow;
using garble::GarblingConfig;
using garble::Link;
using garble::r_squared_against;
using garble::RegressionModel;
using garble::run_convergence;
using garble::run_logistic_figure;
using garble::run_recovery_attack;
using garble::run_small_sample;
using garble::run_tradeoff_sweep;
using garble::Vector;

namespace {

ExperimentConfig univariate_config(double beta, double gamma, double lambda, std::size_t n,
                                   std::uint64_t seed) {
    ExperimentConfig c;
    c.model = {0.0, {beta}, Link::Identity};
    c.garbling = GarblingConfig::univariate(gamma, lambda);
    c.covariates = CovariateSpec::standard_normal(1, n);
    c.n = n;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("convergence ladder approaches the biased slope") {
    auto rows = run_convergence(univariate_config(3.0, 0.3, 1.0, 1000000, 42));
    REQUIRE(rows.size() >= 5);
    const ExperimentRow& last = rows.back();
    REQUIRE(last.n == 1000000);
    // final empirical estimation error within 1% of beta*gamma = 0.9
    REQUIRE(std::abs(*last.d_empirical - 0.9) / 0.9 < 0.01);
    // the gap to the plim shrinks along the ladder
    const double first_gap = std::abs(*rows.front().d_empirical - *rows.front().d_closed);
    const double last_gap = std::abs(*last.d_empirical - *last.d_closed);
    REQUIRE(last_gap < first_gap);
}

TEST_CASE("convergence with gamma = 0 sees no bias at any n") {
    auto rows = run_convergence(univariate_config(3.0, 0.0, 1.0, 64000, 7));
    for (const auto& row : rows) {
        REQUIRE(*row.d_closed == 0.0);
        // beta_hat - beta is pure sampling noise; gamma=0 means zero residual
        // noise, so the fit is exact up to floating point.
        REQUIRE(std::abs(*row.d_empirical) < 1e-9);
    }
}

TEST_CASE("experiments are bit-identical across runs with the same seed") {
    const auto a = run_convergence(univariate_config(3.0, 0.3, 1.0, 32000, 99));
    const auto b = run_convergence(univariate_config(3.0, 0.3, 1.0, 32000, 99));
    REQUIRE(a == b);

    ExperimentConfig sweep = univariate_config(2.0, 0.5, 1.0, 20000, 1234);
    sweep.gamma_grid = Vector{0.0, 0.25, 0.5};
    REQUIRE(run_tradeoff_sweep(sweep) == run_tradeoff_sweep(sweep));
}

TEST_CASE("tradeoff sweep matches the closed forms at n = 10^6") {
    ExperimentConfig cfg = univariate_config(2.0, 0.5, 1.0, 1000000, 2025);
    cfg.gamma_grid = Vector{0.0, 0.5};
    const auto rows = run_tradeoff_sweep(cfg);
    REQUIRE(rows.size() == 2);

    // gamma = 0 row: every error column vanishes
    REQUIRE(*rows[0].sigma2_closed == 0.0);
    REQUIRE(*rows[0].sigma2_empirical == 0.0);
    REQUIRE(std::abs(*rows[0].d_empirical) < 1e-9);

    // gamma = 0.5 row: sigma2 = (2*0.5)^2 (1 + 1) = 2
    REQUIRE(*rows[1].sigma2_closed == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(std::abs(*rows[1].sigma2_empirical - 2.0) / 2.0 < 0.02);
    REQUIRE(std::abs(*rows[1].d_empirical - 1.0) / 1.0 < 0.01);
}

TEST_CASE("bivariate sweep reproduces the correlated-regressor closed form") {
    ExperimentConfig cfg;
    cfg.model = {0.0, {1.0, 2.0}, Link::Identity};
    cfg.garbling = GarblingConfig::none(2);
    cfg.garbling.lambda = 1.0;
    cfg.covariates.mean = {0.0, 0.0};
    cfg.covariates.covariance = garble::Matrix(2, 2);
    cfg.covariates.covariance(0, 0) = 1.0;
    cfg.covariates.covariance(0, 1) = -0.5;
    cfg.covariates.covariance(1, 0) = -0.5;
    cfg.covariates.covariance(1, 1) = 1.0;
    cfg.covariates.n = 1;
    cfg.n = 1000000;
    cfg.seed = 60601;
    cfg.gamma_grid = Vector{0.5};

    const auto rows = run_tradeoff_sweep(cfg);
    REQUIRE(rows.size() == 1);
    REQUIRE(*rows[0].sigma2_closed == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(std::abs(*rows[0].sigma2_empirical - 2.0) / 2.0 < 0.02);

    cfg.garbling.noise_mode = garble::NoiseMode::SharedAcrossRegressors;
    const auto shared = run_tradeoff_sweep(cfg);
    REQUIRE(*shared[0].sigma2_closed == Catch::Approx(3.0).margin(1e-12));
    REQUIRE(std::abs(*shared[0].sigma2_empirical - 3.0) / 3.0 < 0.02);
}

TEST_CASE("sweep sigma2 is quadratic in gamma (R^2 > 0.99)") {
    ExperimentConfig cfg = univariate_config(2.0, 0.0, 1.0, 100000, 31337);
    cfg.gamma_grid = default_gamma_grid();
    const auto rows = run_tradeoff_sweep(cfg);
    std::vector<double> emp, closed;
    for (const auto& row : rows) {
        emp.push_back(*row.sigma2_empirical);
        closed.push_back(*row.sigma2_closed);
    }
    REQUIRE(r_squared_against(emp, closed) > 0.99);
}

TEST_CASE("logistic figure keeps probability-scale error far below log-odds error") {
    ExperimentConfig cfg;
    cfg.model = {2.0, {3.0}, Link::Logistic};
    cfg.garbling = GarblingConfig::univariate(0.0, 1.0);
    cfg.covariates = CovariateSpec::univariate(8.3, 1);
    cfg.n = 100000;
    cfg.seed = 8073;
    cfg.gamma_grid = Vector{0.0, 0.25, 0.5, 0.75, 1.0};

    const auto rows = run_logistic_figure(cfg);
    REQUIRE(rows.size() == 5);
    // gamma = 0 row: both scales are exactly zero
    REQUIRE(*rows[0].sigma2_empirical == 0.0);
    REQUIRE(*rows[0].sigma2_probability_scale == 0.0);

    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].sigma2_probability_scale.has_value());
        REQUIRE(*rows[i].sigma2_probability_scale < 0.05 * *rows[i].sigma2_empirical);
        // log-odds scale follows the closed form
        REQUIRE(std::abs(*rows[i].sigma2_empirical - *rows[i].sigma2_closed) /
                    *rows[i].sigma2_closed <
                0.03);
    }
}

TEST_CASE("logistic figure refuses identity-link models") {
    ExperimentConfig cfg = univariate_config(3.0, 0.3, 1.0, 1000, 5);
    cfg.gamma_grid = Vector{0.5};
    REQUIRE_THROWS_AS(run_logistic_figure(cfg), garble::ConfigError);
}

TEST_CASE("sweep without a grid is refused") {
    REQUIRE_THROWS_AS(run_tradeoff_sweep(univariate_config(2.0, 0.5, 1.0, 100, 1)),
                      garble::ConfigError);
}

TEST_CASE("recovery attack report covers the three attackers") {
    ExperimentConfig cfg = univariate_config(3.0, 0.3, 1.0, 1000000, 4242);
    cfg.garbling.output_lambda = 0.5;
    const auto report = run_recovery_attack(cfg);
    REQUIRE(report.scenarios.size() == 4);

    const auto& knows = report.scenarios[0];
    REQUIRE(knows.attacker == "knows-lambda");
    REQUIRE(std::abs(knows.recovered_beta - 3.0) / 3.0 < 0.01);
    // the other sign root lands at beta_hat + sigma/lambda ~ 4.8
    REQUIRE(knows.recovered_beta_other_root > knows.recovered_beta);

    const auto& mis = report.scenarios[1];
    REQUIRE(mis.attacker == "mis-specified-lambda");
    REQUIRE(mis.assumed_lambda == 2.0);
    // converges to beta + beta*gamma/2 = 3.45
    REQUIRE(std::abs(mis.recovered_beta - 3.45) / 3.45 < 0.02);

    const auto& only = report.scenarios[2];
    REQUIRE(only.attacker == "knows-lambda-only");
    const auto& pair = report.scenarios[3];
    REQUIRE(pair.attacker == "knows-lambda-pair");
    REQUIRE(std::abs(pair.recovered_beta - 3.0) / 3.0 < 0.01);
    // output noise misleads the lambda-only attacker
    REQUIRE(only.error_rel > pair.error_rel);

    // rows adapter carries the recovered values
    const auto rows = report.rows();
    REQUIRE(rows.size() == 4);
    REQUIRE(*rows[0].recovered_beta == knows.recovered_beta);
}

TEST_CASE("recovery attack requires positive lambda") {
    ExperimentConfig cfg = univariate_config(3.0, 0.3, 0.0, 1000, 1);
    REQUIRE_THROWS_AS(run_recovery_attack(cfg), garble::UndefinedAttackError);
}

TEST_CASE("small-sample experiment matches the analytic MSE") {
    ExperimentConfig cfg = univariate_config(1.0, 0.5, 1.0, 10, 777);
    cfg.replicates = 20000;
    const auto report = run_small_sample(cfg);
    REQUIRE(report.reference_is_analytic);
    REQUIRE(report.mse_reference == Catch::Approx(0.28125).margin(1e-12));
    REQUIRE(std::abs(report.mse_empirical - 0.28125) / 0.28125 < 0.03);
}

TEST_CASE("small-sample MSE with lambda = 0 hits the floor") {
    ExperimentConfig cfg = univariate_config(1.0, 0.5, 0.0, 10, 778);
    cfg.replicates = 20000;
    const auto report = run_small_sample(cfg);
    REQUIRE(std::abs(report.mse_empirical - 0.25) / 0.25 < 0.03);
    REQUIRE(report.asymptote == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("small-sample MSE decreases toward the asymptote along an n ladder") {
    double prev = 1e9;
    for (std::size_t n : {10UL, 30UL, 100UL}) {
        ExperimentConfig cfg = univariate_config(1.0, 0.5, 1.0, n, 779);
        cfg.replicates = 10000;
        const auto report = run_small_sample(cfg);
        REQUIRE(report.mse_empirical < prev);
        prev = report.mse_empirical;
        REQUIRE(report.mse_empirical > report.asymptote);
    }
}

TEST_CASE("small-sample experiment enforces the replicate floor") {
    ExperimentConfig cfg = univariate_config(1.0, 0.5, 1.0, 10, 5);
    cfg.replicates = 100;
    REQUIRE_THROWS_AS(run_small_sample(cfg), garble::ConfigError);
}

TEST_CASE("r_squared_against is 1 for identical series") {
    REQUIRE(r_squared_against({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 1.0);
    REQUIRE(r_squared_against({1.0, 2.0, 4.0}, {1.0, 2.0, 3.0}) < 1.0);
}
