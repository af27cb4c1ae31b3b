// Command-line front end: closed-form tradeoff tables, seeded Monte Carlo
// experiments, the prediction service, the attacker client, and the
// verification suite.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "garble/acceptance.hpp"
#include "garble/garble.hpp"

namespace {

struct CommonFlags {
    std::uint64_t seed = 42;
    std::string out;  // empty -> stdout
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--seed", flags.seed, "RNG seed");
    cmd->add_option("--out", flags.out, "output file (default stdout)");
    cmd->add_option("--format", flags.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

struct ModelFlags {
    double alpha = 0.0;
    std::vector<double> beta;
    std::string link = "identity";

    garble::RegressionModel build() const {
        garble::RegressionModel m;
        m.intercept = alpha;
        m.slopes = beta;
        m.link = link == "logistic" ? garble::Link::Logistic : garble::Link::Identity;
        m.validate();
        return m;
    }
};

void add_model(CLI::App* cmd, ModelFlags& flags, bool beta_required = true) {
    cmd->add_option("--alpha", flags.alpha, "model intercept");
    auto* beta = cmd->add_option("--beta", flags.beta, "model slopes (one per regressor)");
    if (beta_required) beta->required();
    cmd->add_option("--link", flags.link, "model link")
        ->check(CLI::IsMember({"identity", "logistic"}));
}

struct GarblingFlags {
    std::vector<double> gamma;
    double lambda = 1.0;
    double output_lambda = 0.0;
    std::string noise_mode = "independent";

    garble::GarblingConfig build(std::size_t k) const {
        garble::GarblingConfig c;
        c.gammas = gamma.empty() ? garble::Vector(k, 0.0) : gamma;
        if (c.gammas.size() == 1 && k > 1) c.gammas.assign(k, c.gammas[0]);
        c.lambda = lambda;
        c.output_lambda = output_lambda;
        c.noise_mode = noise_mode == "shared" ? garble::NoiseMode::SharedAcrossRegressors
                                              : garble::NoiseMode::IndependentPerRegressor;
        c.validate(k);
        return c;
    }
};

void add_garbling(CLI::App* cmd, GarblingFlags& flags) {
    cmd->add_option("--gamma", flags.gamma, "garbling multipliers (single value broadcasts)");
    cmd->add_option("--lambda", flags.lambda, "input-noise standard deviation");
    cmd->add_option("--output-lambda", flags.output_lambda, "output-noise standard deviation");
    cmd->add_option("--noise-mode", flags.noise_mode, "noise sharing across regressors")
        ->check(CLI::IsMember({"independent", "shared"}));
}

struct CovariateFlags {
    std::vector<double> mean;
    std::vector<double> var_x;
    double cov = 0.0;

    garble::CovariateSpec build(std::size_t k) const {
        garble::CovariateSpec s;
        s.mean = mean.empty() ? garble::Vector(k, 0.0) : mean;
        if (s.mean.size() != k) throw garble::DimensionError(k, s.mean.size(), "mean length");
        garble::Vector variances = var_x.empty() ? garble::Vector(k, 1.0) : var_x;
        if (variances.size() == 1 && k > 1) variances.assign(k, variances[0]);
        if (variances.size() != k) throw garble::DimensionError(k, variances.size(), "var-x length");
        s.covariance = garble::Matrix(k, k);
        for (std::size_t i = 0; i < k; ++i) s.covariance(i, i) = variances[i];
        if (cov != 0.0) {
            if (k != 2)
                throw garble::ConfigError("--cov sets the off-diagonal for K=2 only; use a config "
                                          "file for larger K");
            s.covariance(0, 1) = cov;
            s.covariance(1, 0) = cov;
        }
        s.n = 1;
        return s;
    }
};

void add_covariates(CLI::App* cmd, CovariateFlags& flags) {
    cmd->add_option("--mean", flags.mean, "covariate means (default zeros)");
    cmd->add_option("--var-x", flags.var_x, "covariate variances (default ones)");
    cmd->add_option("--cov", flags.cov, "covariance between the two regressors (K=2)");
}

void emit_rows(const std::vector<garble::ExperimentRow>& rows, const CommonFlags& flags) {
    if (flags.format == "json")
        garble::write_output(flags.out, garble::to_json(rows).dump(2) + "\n");
    else
        garble::write_output(flags.out, garble::to_csv(rows));
}

int run_tradeoff_cmd(const ModelFlags& model_flags, const GarblingFlags& garbling_flags,
                     const CovariateFlags& covariate_flags, const CommonFlags& flags) {
    const garble::RegressionModel model = model_flags.build();
    const garble::CovariateSpec spec = covariate_flags.build(model.k());

    std::vector<garble::ExperimentRow> rows;
    auto closed_row = [&](const garble::GarblingConfig& cfg) {
        const garble::TradeoffPoint p = garble::tradeoff_point(model, cfg, spec);
        garble::ExperimentRow row;
        row.gamma = cfg.gammas.size() == 1 ? cfg.gammas[0] : garble::detail::scalar_gamma(cfg.gammas);
        row.lambda = cfg.lambda;
        row.n = 0;
        row.seed = flags.seed;
        row.d_closed = garble::detail::scalar_error(p.estimation_error);
        row.sigma2_closed = p.prediction_error_sq;
        return row;
    };

    if (model.k() == 1) {
        // each --gamma value is one grid point
        std::vector<double> grid = garbling_flags.gamma.empty()
                                       ? std::vector<double>{0.0}
                                       : garbling_flags.gamma;
        for (double g : grid) {
            garble::GarblingConfig cfg = garble::GarblingConfig::univariate(
                g, garbling_flags.lambda, garbling_flags.output_lambda);
            rows.push_back(closed_row(cfg));
        }
    } else {
        rows.push_back(closed_row(garbling_flags.build(model.k())));
    }
    emit_rows(rows, flags);
    return 0;
}

int run_simulate_cmd(const std::string& experiment, const ModelFlags& model_flags,
                     const GarblingFlags& garbling_flags, const CovariateFlags& covariate_flags,
                     std::size_t n, std::size_t replicates, const std::vector<double>& gamma_grid,
                     const CommonFlags& flags) {
    garble::ExperimentConfig cfg;
    cfg.model = model_flags.build();
    cfg.garbling = garbling_flags.build(cfg.model.k());
    cfg.covariates = covariate_flags.build(cfg.model.k());
    cfg.n = n;
    cfg.replicates = replicates;
    cfg.seed = flags.seed;
    if (!gamma_grid.empty())
        cfg.gamma_grid = gamma_grid;
    else if (experiment == "tradeoff" || experiment == "logistic-figure")
        cfg.gamma_grid = garble::default_gamma_grid();

    if (experiment == "convergence") {
        emit_rows(garble::run_convergence(cfg), flags);
    } else if (experiment == "tradeoff") {
        emit_rows(garble::run_tradeoff_sweep(cfg), flags);
    } else if (experiment == "logistic-figure") {
        emit_rows(garble::run_logistic_figure(cfg), flags);
    } else if (experiment == "small-sample") {
        const garble::SmallSampleReport report = garble::run_small_sample(cfg);
        if (flags.format == "json")
            garble::write_output(flags.out, garble::to_json(report).dump(2) + "\n");
        else
            garble::write_output(flags.out, garble::to_csv(report.rows()));
    } else {  // recovery
        const garble::RecoveryReport report = garble::run_recovery_attack(cfg);
        if (flags.format == "json")
            garble::write_output(flags.out, garble::to_json(report).dump(2) + "\n");
        else
            garble::write_output(flags.out, garble::to_csv(report.rows()));
    }
    return 0;
}

int run_serve_cmd(const std::string& config_path) {
    const garble::ServiceConfig cfg = garble::load_service_config(config_path);
    garble::PredictionService service(cfg);
    service.start();
    std::cout << "garble service listening on " << service.base_url() << std::endl;
    // Foreground service: runs until interrupted.
    for (;;) std::this_thread::sleep_for(std::chrono::seconds(3600));
}

int run_steal_cmd(const std::string& endpoint, std::size_t n, const std::string& estimator,
                  std::optional<double> known_lambda, std::optional<double> known_output_lambda,
                  std::size_t batch, const CovariateFlags& covariate_flags, std::size_t k,
                  const CommonFlags& flags) {
    garble::StealOptions opt;
    opt.endpoint = endpoint;
    opt.n = n;
    opt.covariates = covariate_flags.build(k);
    opt.estimator = estimator == "logit" ? garble::Estimator::LogitOLS : garble::Estimator::OLS;
    opt.known_lambda = known_lambda;
    opt.known_output_lambda = known_output_lambda;
    opt.seed = flags.seed;
    opt.batch = batch;
    const garble::StealReport report = garble::steal(opt);
    garble::write_output(flags.out, garble::to_json(report).dump(2) + "\n");
    return 0;
}

int run_verify_cmd(const CommonFlags& flags) {
    const auto results = garble::run_all_criteria(flags.seed);
    garble::write_output(flags.out, garble::render_report(results, flags.seed));
    for (const auto& r : results)
        if (!r.pass) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"garbled prediction service laboratory: input-garbling defenses against "
                 "parameter-stealing attacks on regression services"};
    app.require_subcommand(1);

    // --- tradeoff ---
    auto* tradeoff = app.add_subcommand("tradeoff", "closed-form (gamma, lambda) -> (D, sigma^2) sweep");
    CommonFlags tradeoff_common;
    ModelFlags tradeoff_model;
    GarblingFlags tradeoff_garbling;
    CovariateFlags tradeoff_cov;
    add_common(tradeoff, tradeoff_common);
    add_model(tradeoff, tradeoff_model);
    add_garbling(tradeoff, tradeoff_garbling);
    add_covariates(tradeoff, tradeoff_cov);

    // --- simulate ---
    auto* simulate = app.add_subcommand("simulate", "seeded Monte Carlo experiments");
    CommonFlags sim_common;
    ModelFlags sim_model;
    GarblingFlags sim_garbling;
    CovariateFlags sim_cov;
    std::string experiment;
    std::size_t sim_n = 100000;
    std::size_t sim_replicates = 20000;
    std::vector<double> sim_grid;
    simulate->add_option("--experiment", experiment, "which experiment to run")
        ->required()
        ->check(CLI::IsMember({"convergence", "tradeoff", "logistic-figure", "small-sample",
                               "recovery"}));
    simulate->add_option("--n", sim_n, "sample size");
    simulate->add_option("--replicates", sim_replicates, "replicates (small-sample)");
    simulate->add_option("--gamma-grid", sim_grid, "sweep grid (default 0..1 step 0.05)");
    add_common(simulate, sim_common);
    add_model(simulate, sim_model);
    add_garbling(simulate, sim_garbling);
    add_covariates(simulate, sim_cov);

    // --- serve ---
    auto* serve_cmd = app.add_subcommand("serve", "run the garbled prediction service");
    std::string config_path;
    serve_cmd->add_option("--config", config_path, "service config JSON file")->required();

    // --- steal ---
    auto* steal_cmd = app.add_subcommand("steal", "model-stealing client (reports JSON)");
    CommonFlags steal_common;
    CovariateFlags steal_cov;
    std::string endpoint;
    std::string estimator = "ols";
    std::size_t steal_n = 100000;
    std::size_t steal_batch = 10000;
    std::size_t steal_k = 1;
    double known_lambda_value = 0.0, known_output_lambda_value = 0.0;
    steal_cmd->add_option("--endpoint", endpoint, "service base URL")->required();
    steal_cmd->add_option("--n", steal_n, "number of queries");
    steal_cmd->add_option("--estimator", estimator, "estimating function")
        ->check(CLI::IsMember({"ols", "logit"}));
    auto* kl = steal_cmd->add_option("--known-lambda", known_lambda_value,
                                     "lambda the attacker claims to know");
    auto* kol = steal_cmd->add_option("--known-output-lambda", known_output_lambda_value,
                                      "output lambda the attacker claims to know");
    steal_cmd->add_option("--batch", steal_batch, "rows per request (1 = sequential queries)");
    steal_cmd->add_option("--k", steal_k, "number of regressors to sample");
    add_common(steal_cmd, steal_common);
    add_covariates(steal_cmd, steal_cov);

    // --- verify ---
    auto* verify = app.add_subcommand("verify", "run the full acceptance suite");
    CommonFlags verify_common;
    add_common(verify, verify_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (tradeoff->parsed())
            return run_tradeoff_cmd(tradeoff_model, tradeoff_garbling, tradeoff_cov, tradeoff_common);
        if (simulate->parsed())
            return run_simulate_cmd(experiment, sim_model, sim_garbling, sim_cov, sim_n,
                                    sim_replicates, sim_grid, sim_common);
        if (serve_cmd->parsed()) return run_serve_cmd(config_path);
        if (steal_cmd->parsed())
            return run_steal_cmd(endpoint, steal_n, estimator,
                                 kl->count() ? std::optional<double>(known_lambda_value)
                                             : std::nullopt,
                                 kol->count() ? std::optional<double>(known_output_lambda_value)
                                              : std::nullopt,
                                 steal_batch, steal_cov, steal_k, steal_common);
        if (verify->parsed()) return run_verify_cmd(verify_common);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 2;
}
