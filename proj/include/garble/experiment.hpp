#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "garble/errors.hpp"
#include "garble/estimators.hpp"
#include "garble/garbler.hpp"
#include "garble/model.hpp"
#include "garble/rng.hpp"
#include "garble/tradeoff.hpp"

namespace garble {

// A seeded Monte Carlo experiment. Replicate/grid-point streams are derived
// from (seed, index) with a splittable counter scheme, so serial and parallel
// execution produce identical results.
struct ExperimentConfig {
    RegressionModel model;
    GarblingConfig garbling;
    CovariateSpec covariates;
    std::size_t n = 100000;
    std::size_t replicates = 1;
    std::optional<Vector> gamma_grid;
    std::uint64_t seed = 42;

    void validate() const {
        model.validate();
        garbling.validate(model.k());
        if (covariates.k() != model.k())
            throw DimensionError(model.k(), covariates.k(), "covariate dimension");
        if (replicates < 1) throw ConfigError("replicates must be >= 1");
        if (gamma_grid)
            for (double g : *gamma_grid)
                if (!std::isfinite(g)) throw ConfigError("gamma grid entry is not finite");
    }
};

// One table row: closed forms next to their Monte Carlo counterparts. For
// K > 1 the scalar gamma/d columns carry the uniform grid value and the L2
// norm of the per-coordinate error vectors; for K = 1 they are signed
// scalars. Small-sample rows reuse the d columns for the (analytic, Monte
// Carlo) MSE pair.
struct ExperimentRow {
    double gamma = 0.0;
    double lambda = 0.0;
    std::size_t n = 0;
    std::optional<double> d_closed;
    std::optional<double> d_empirical;
    std::optional<double> sigma2_closed;
    std::optional<double> sigma2_empirical;
    std::optional<double> sigma2_probability_scale;
    std::optional<double> recovered_beta;
    std::uint64_t seed = 0;

    bool operator==(const ExperimentRow&) const = default;
};

// The default sweep grid: gamma in [0, 1] in steps of 0.05.
inline Vector default_gamma_grid() {
    Vector g(21);
    for (int i = 0; i <= 20; ++i) g[i] = static_cast<double>(i) * 0.05;
    return g;
}

namespace detail {

struct GarbledSample {
    Dataset data;               // X plus garbled service outputs
    double sigma2_index = 0.0;  // mean squared clean-vs-garbled gap, index scale
    double sigma2_probability = 0.0;  // same on the probability scale (logistic)
};

// Draws n covariate rows and queries the garbled service on each, pairing the
// clean and garbled prediction on the same row and the same noise draw.
inline GarbledSample draw_garbled_sample(const RegressionModel& model, const GarblingConfig& cfg,
                                         CovariateSpec spec, std::size_t n, Rng xs, Rng noise) {
    spec.n = n;
    GarbledSample s;
    s.data.inputs = sample_covariates(spec, xs).inputs;
    Vector y(n);
    double acc_idx = 0.0, acc_prob = 0.0;
    Vector x(model.k());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < model.k(); ++j) x[j] = s.data.inputs(i, j);
        const double idx_clean = linear_index(model, x);
        const double idx_garbled = garbled_linear_index(model, x, cfg, noise);
        const double d = idx_garbled - idx_clean;
        acc_idx += d * d;
        if (model.link == Link::Logistic) {
            const double dp = logistic(idx_garbled) - logistic(idx_clean);
            acc_prob += dp * dp;
        }
        y[i] = apply_link(model, idx_garbled);
    }
    s.data.outputs = std::move(y);
    s.sigma2_index = acc_idx / static_cast<double>(n);
    s.sigma2_probability = acc_prob / static_cast<double>(n);
    return s;
}

inline FitResult fit_for_link(const RegressionModel& model, const Dataset& d) {
    return model.link == Link::Logistic ? logit_fit(d) : ols_fit(d);
}

inline double l2(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Scalar d columns: signed for K=1, L2 norm otherwise.
inline double scalar_error(const Vector& v) { return v.size() == 1 ? v[0] : l2(v); }

inline double scalar_gamma(const Vector& gammas) {
    if (gammas.size() == 1) return gammas[0];
    bool uniform = true;
    for (double g : gammas)
        if (g != gammas[0]) uniform = false;
    return uniform ? gammas[0] : l2(gammas);
}

inline ExperimentRow measure_config(const ExperimentConfig& config, const GarblingConfig& garbling,
                                    std::size_t n, std::uint64_t stream_base) {
    const GarbledSample sample =
        draw_garbled_sample(config.model, garbling, config.covariates, n,
                            Rng(config.seed, stream_base), Rng(config.seed, stream_base + 1));
    const FitResult fit = fit_for_link(config.model, sample.data);

    ExperimentRow row;
    row.gamma = scalar_gamma(garbling.gammas);
    row.lambda = garbling.lambda;
    row.n = n;
    row.seed = config.seed;
    row.d_closed = scalar_error(estimation_error_closed(config.model, garbling));
    Vector emp(config.model.k());
    for (std::size_t j = 0; j < emp.size(); ++j)
        emp[j] = fit.slopes_hat[j] - config.model.slopes[j];
    row.d_empirical = scalar_error(emp);
    row.sigma2_closed = prediction_error_closed(config.model, garbling, config.covariates);
    row.sigma2_empirical = sample.sigma2_index;
    if (config.model.link == Link::Logistic)
        row.sigma2_probability_scale = sample.sigma2_probability;
    return row;
}

}  // namespace detail

// Fits the garbled service at a doubling ladder of sample sizes up to
// config.n; the gap |d_empirical - d_closed| = |beta_hat - (1+gamma)beta|
// shrinks as n grows. Ladder step j uses streams (seed, 2j) and (seed, 2j+1).
inline std::vector<ExperimentRow> run_convergence(const ExperimentConfig& config) {
    config.validate();
    std::vector<std::size_t> ladder;
    for (std::size_t n = config.n; n >= 2000; n /= 2) ladder.push_back(n);
    if (ladder.empty()) ladder.push_back(config.n);
    std::reverse(ladder.begin(), ladder.end());

    std::vector<ExperimentRow> rows;
    rows.reserve(ladder.size());
    for (std::size_t j = 0; j < ladder.size(); ++j)
        rows.push_back(detail::measure_config(config, config.garbling, ladder[j], 2 * j));
    return rows;
}

// One row per grid gamma, applied uniformly across coordinates: closed-form
// D and sigma^2 next to their empirical counterparts at n = config.n.
inline std::vector<ExperimentRow> run_tradeoff_sweep(const ExperimentConfig& config) {
    config.validate();
    if (!config.gamma_grid) throw ConfigError("run_tradeoff_sweep needs a gamma grid");
    std::vector<ExperimentRow> rows;
    rows.reserve(config.gamma_grid->size());
    for (std::size_t g = 0; g < config.gamma_grid->size(); ++g) {
        GarblingConfig garbling = config.garbling;
        garbling.gammas.assign(config.model.k(), (*config.gamma_grid)[g]);
        rows.push_back(detail::measure_config(config, garbling, config.n, 2 * g));
    }
    return rows;
}

// The logistic sweep: per gamma, the empirical sigma^2 on the log-odds scale
// (which follows the quadratic closed form) next to the mean squared gap of
// the returned probabilities (which stays far below it).
inline std::vector<ExperimentRow> run_logistic_figure(const ExperimentConfig& config) {
    if (config.model.link != Link::Logistic)
        throw ConfigError("run_logistic_figure needs a logistic-link model");
    return run_tradeoff_sweep(config);
}

// --- recovery attack -------------------------------------------------------

struct RecoveryScenario {
    std::string attacker;
    double assumed_lambda = 0.0;
    std::optional<double> assumed_output_lambda;
    FitResult fit;
    double recovered_beta = 0.0;             // beta_hat - sqrt(.)/lambda root
    double recovered_beta_other_root = 0.0;  // beta_hat + sqrt(.)/lambda root
    double true_beta = 0.0;
    double error_abs = 0.0;
    double error_rel = 0.0;
};

struct RecoveryReport {
    std::vector<RecoveryScenario> scenarios;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double gamma = 0.0;
    double lambda = 0.0;

    std::vector<ExperimentRow> rows() const {
        std::vector<ExperimentRow> out;
        out.reserve(scenarios.size());
        for (const auto& s : scenarios) {
            ExperimentRow row;
            row.gamma = gamma;
            row.lambda = s.assumed_lambda;
            row.n = n;
            row.seed = seed;
            row.d_closed = s.true_beta * gamma;
            row.d_empirical = s.fit.slopes_hat[0] - s.true_beta;
            row.recovered_beta = s.recovered_beta;
            out.push_back(row);
        }
        return out;
    }
};

// Simulates the identification attacks at n = config.n:
//   (a) the attacker knows lambda (output noise off),
//   (b) the attacker assumes lambda' = 2*lambda (output noise off),
//   and, when config.garbling.output_lambda > 0,
//   (c1) the attacker knows lambda only,
//   (c2) the attacker knows both lambda and output_lambda.
// Both square-root sign candidates are reported per scenario.
inline RecoveryReport run_recovery_attack(const ExperimentConfig& config) {
    config.validate();
    if (config.model.k() != 1)
        throw DimensionError(1, config.model.k(), "K (recovery attack is univariate)");
    const double lambda = config.garbling.lambda;
    if (!(lambda > 0.0))
        throw UndefinedAttackError("recovery experiment needs lambda > 0");

    const double beta = config.model.slopes[0];
    RecoveryReport report;
    report.n = config.n;
    report.seed = config.seed;
    report.gamma = config.garbling.gammas[0];
    report.lambda = lambda;

    auto add = [&](std::string name, const FitResult& fit, double assumed_lambda,
                   std::optional<double> assumed_l2) {
        RecoveryScenario s;
        s.attacker = std::move(name);
        s.assumed_lambda = assumed_lambda;
        s.assumed_output_lambda = assumed_l2;
        s.fit = fit;
        const double l2 = assumed_l2.value_or(0.0);
        s.recovered_beta = recover_beta_known_lambda_pair(fit, assumed_lambda, l2);
        s.recovered_beta_other_root = recover_beta_other_root(fit, assumed_lambda, l2);
        s.true_beta = beta;
        s.error_abs = std::abs(s.recovered_beta - beta);
        s.error_rel = s.error_abs / std::abs(beta);
        report.scenarios.push_back(std::move(s));
    };

    GarblingConfig plain = config.garbling;
    plain.output_lambda = 0.0;
    const detail::GarbledSample base = detail::draw_garbled_sample(
        config.model, plain, config.covariates, config.n, Rng(config.seed, 0), Rng(config.seed, 1));
    const FitResult fit_base = detail::fit_for_link(config.model, base.data);
    add("knows-lambda", fit_base, lambda, std::nullopt);
    add("mis-specified-lambda", fit_base, 2.0 * lambda, std::nullopt);

    if (config.garbling.output_lambda > 0.0) {
        const detail::GarbledSample noisy = detail::draw_garbled_sample(
            config.model, config.garbling, config.covariates, config.n, Rng(config.seed, 2),
            Rng(config.seed, 3));
        const FitResult fit_noisy = detail::fit_for_link(config.model, noisy.data);
        add("knows-lambda-only", fit_noisy, lambda, std::nullopt);
        add("knows-lambda-pair", fit_noisy, lambda, config.garbling.output_lambda);
    }
    return report;
}

// --- small-sample MSE ------------------------------------------------------

struct SmallSampleReport {
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    double gamma = 0.0;
    double lambda = 0.0;
    double mse_empirical = 0.0;
    double mse_reference = 0.0;  // Analytic for standard-normal covariates, else MonteCarlo
    bool reference_is_analytic = false;
    double asymptote = 0.0;  // (beta*gamma)^2

    std::vector<ExperimentRow> rows() const {
        ExperimentRow row;
        row.gamma = gamma;
        row.lambda = lambda;
        row.n = n;
        row.seed = seed;
        row.d_closed = mse_reference;
        row.d_empirical = mse_empirical;
        return {row};
    }
};

// Monte Carlo MSE of the no-intercept slope estimate over config.replicates
// independent datasets of size config.n, against the closed small-sample
// formula. Replicate r derives its stream from (seed, r).
inline SmallSampleReport run_small_sample(const ExperimentConfig& config) {
    config.validate();
    if (config.model.k() != 1)
        throw DimensionError(1, config.model.k(), "K (small-sample experiment is univariate)");
    if (config.replicates < 10000)
        throw ConfigError("small-sample experiment needs at least 10^4 replicates");

    const double beta = config.model.slopes[0];
    double acc = 0.0;
    for (std::size_t r = 0; r < config.replicates; ++r) {
        Rng stream(config.seed, r);
        const detail::GarbledSample s = detail::draw_garbled_sample(
            config.model, config.garbling, config.covariates, config.n, stream, stream.split(~r));
        const FitResult fit = ols_fit(s.data, /*include_intercept=*/false);
        const double d = beta - fit.slopes_hat[0];
        acc += d * d;
    }

    SmallSampleReport report;
    report.n = config.n;
    report.replicates = config.replicates;
    report.seed = config.seed;
    report.gamma = config.garbling.gammas[0];
    report.lambda = config.garbling.lambda;
    report.mse_empirical = acc / static_cast<double>(config.replicates);
    report.asymptote = beta * config.garbling.gammas[0] * beta * config.garbling.gammas[0];
    try {
        report.mse_reference = small_sample_mse(config.model, config.garbling, config.n,
                                                config.covariates, MseMethod::Analytic);
        report.reference_is_analytic = true;
    } catch (const UnsupportedSpecError&) {
        report.mse_reference = small_sample_mse(config.model, config.garbling, config.n,
                                                config.covariates, MseMethod::MonteCarlo,
                                                detail::splitmix64(config.seed));
        report.reference_is_analytic = false;
    }
    return report;
}

// R^2 of empirical values against reference values (1 - SS_res / SS_tot).
inline double r_squared_against(const std::vector<double>& empirical,
                                const std::vector<double>& reference) {
    if (empirical.size() != reference.size())
        throw DimensionError(reference.size(), empirical.size(), "series length");
    if (empirical.empty()) throw InsufficientDataError(0, 1);
    double mean = 0.0;
    for (double v : empirical) mean += v;
    mean /= static_cast<double>(empirical.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < empirical.size(); ++i) {
        ss_res += (empirical[i] - reference[i]) * (empirical[i] - reference[i]);
        ss_tot += (empirical[i] - mean) * (empirical[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

}  // namespace garble
