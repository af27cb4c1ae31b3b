#pragma once

#include <cmath>
#include <cstddef>

#include "garble/errors.hpp"
#include "garble/garbler.hpp"
#include "garble/model.hpp"
#include "garble/rng.hpp"

namespace garble {

// One point on the defender's menu: a (gamma, lambda) choice together with
// its asymptotic estimation error per coordinate and the prediction error it
// costs. estimation_error_relative is gamma by construction (the relative
// error in the attacker's estimate is linear in gamma only).
struct TradeoffPoint {
    Vector gamma;
    double lambda = 0.0;
    Vector estimation_error;             // beta_i * gamma_i
    Vector estimation_error_relative;    // == gamma, exactly
    double prediction_error_sq = 0.0;    // sigma^2 on the linear-index scale
};

// Asymptotic bias vector of the attacker's least-squares slopes:
// plim(beta_hat_i) - beta_i = beta_i * gamma_i.
inline Vector estimation_error_closed(const RegressionModel& model, const GarblingConfig& config) {
    if (config.k() != model.k()) throw DimensionError(model.k(), config.k(), "gamma length");
    Vector d(model.k());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = model.slopes[i] * config.gammas[i];
    return d;
}

namespace tradeoff_detail {

// sigma^2 with dimensions and PSD-ness already checked.
inline double sigma2_unchecked(const Vector& big_gamma, const Matrix& covariance, double lambda,
                               NoiseMode mode) {
    const double systematic = quadratic_form(big_gamma, covariance);
    double s = 0.0;
    if (mode == NoiseMode::SharedAcrossRegressors) {
        for (double gi : big_gamma) s += gi;
        s *= s;
    } else {
        for (double gi : big_gamma) s += gi * gi;
    }
    return systematic + lambda * lambda * s;
}

}  // namespace tradeoff_detail

// Closed-form sigma^2 on the linear-index scale. With Gamma_i = beta_i*gamma_i:
//   independent noise:  Gamma^T Sigma_x Gamma + lambda^2 * sum_i Gamma_i^2
//   shared noise:       Gamma^T Sigma_x Gamma + lambda^2 * (sum_i Gamma_i)^2
// K=1 reduces to (beta*gamma)^2 (Var(x) + lambda^2) in both modes. For the
// logistic link this is the log-odds-scale error.
inline double prediction_error_closed(const RegressionModel& model, const GarblingConfig& config,
                                      const CovariateSpec& spec) {
    if (config.k() != model.k()) throw DimensionError(model.k(), config.k(), "gamma length");
    if (spec.k() != model.k()) throw DimensionError(model.k(), spec.k(), "covariate dimension");
    cholesky_psd(spec.covariance, 1e-10);  // rejects non-PSD covariances
    return tradeoff_detail::sigma2_unchecked(estimation_error_closed(model, config),
                                             spec.covariance, config.lambda, config.noise_mode);
}

inline TradeoffPoint tradeoff_point(const RegressionModel& model, const GarblingConfig& config,
                                    const CovariateSpec& spec) {
    TradeoffPoint p;
    p.gamma = config.gammas;
    p.lambda = config.lambda;
    p.estimation_error = estimation_error_closed(model, config);
    p.estimation_error_relative = config.gammas;
    p.prediction_error_sq = prediction_error_closed(model, config, spec);
    return p;
}

enum class MseMethod { Analytic, MonteCarlo };

// Finite-sample mean squared error of the attacker's slope estimate under a
// no-intercept fit:
//   E[(beta - beta_hat)^2] = (beta*gamma)^2 + (beta*gamma*lambda)^2 * T,
//   T = E[(sum_i x_i^2)^-1].
// Analytic requires standard-normal covariates, where sum x_i^2 is
// chi-square(n) and T = 1/(n-2). MonteCarlo estimates T by resampling
// covariate draws; pass include_intercept=true there to get the centered-sum
// variant instead (T = E[1/sum (x_i - xbar)^2]).
inline double small_sample_mse(const RegressionModel& model, const GarblingConfig& config,
                               std::size_t n, const CovariateSpec& spec, MseMethod method,
                               std::uint64_t seed = 0x5EEDu, std::size_t resamples = 10000,
                               bool include_intercept = false) {
    if (model.k() != 1) throw DimensionError(1, model.k(), "K (small-sample result is univariate)");
    if (config.k() != 1) throw DimensionError(1, config.k(), "gamma length");
    if (method == MseMethod::Analytic && n <= 2)
        throw UndefinedMomentError("E[(sum x_i^2)^-1] is undefined for n <= 2");
    if (n < 4) throw InsufficientDataError(n, 4);

    const double bg = model.slopes[0] * config.gammas[0];
    const double bgl = bg * config.lambda;

    double t;
    if (method == MseMethod::Analytic) {
        if (include_intercept)
            throw UnsupportedSpecError(
                "Analytic small-sample MSE covers the no-intercept fit only; use MonteCarlo");
        if (!spec.is_standard_normal())
            throw UnsupportedSpecError(
                "Analytic small-sample MSE needs standard-normal covariates (mean 0, variance 1)");
        t = 1.0 / static_cast<double>(n - 2);
    } else {
        if (resamples < 1) throw ConfigError("MonteCarlo needs at least one resample");
        Rng rng(seed, 0xA11CE);
        CovariateSpec draw = spec;
        draw.n = n;
        double acc = 0.0;
        for (std::size_t r = 0; r < resamples; ++r) {
            const Dataset d = sample_covariates(draw, rng);
            double ss = 0.0;
            if (include_intercept) {
                double mean = 0.0;
                for (std::size_t i = 0; i < n; ++i) mean += d.inputs(i, 0);
                mean /= static_cast<double>(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const double c = d.inputs(i, 0) - mean;
                    ss += c * c;
                }
            } else {
                for (std::size_t i = 0; i < n; ++i) ss += d.inputs(i, 0) * d.inputs(i, 0);
            }
            acc += 1.0 / ss;
        }
        t = acc / static_cast<double>(resamples);
    }
    return bg * bg + bgl * bgl * t;
}

// Picks the sign of each gamma_i (magnitudes fixed) that minimizes the
// closed-form sigma^2, enumerating all 2^K assignments. |relative estimation
// error| is unchanged by construction. Ties break toward all-positive, then
// by enumeration order with + preferred in earlier coordinates.
inline GarblingConfig choose_gamma_signs(const RegressionModel& model, const Vector& gamma_magnitudes,
                                         const CovariateSpec& spec, double lambda, NoiseMode mode) {
    const std::size_t k = gamma_magnitudes.size();
    if (k != model.k()) throw DimensionError(model.k(), k, "gamma length");
    if (k < 2) throw DimensionError(2, k, "K (sign selection needs at least two regressors)");
    if (k > 20) throw SizeError("sign selection enumerates 2^K assignments; K > 20 is not supported");
    for (double g : gamma_magnitudes)
        if (!(g >= 0.0)) throw ConfigError("gamma magnitudes must be nonnegative");
    if (spec.k() != k) throw DimensionError(k, spec.k(), "covariate dimension");
    cholesky_psd(spec.covariance, 1e-10);  // validate once, not per assignment

    GarblingConfig best;
    best.lambda = lambda;
    best.noise_mode = mode;
    double best_sigma2 = 0.0;
    bool have_best = false;

    Vector big_gamma(k);
    GarblingConfig candidate;
    candidate.lambda = lambda;
    candidate.noise_mode = mode;
    candidate.gammas.resize(k);
    // mask bit j set => flip the sign of gamma_j; mask 0 is the all-positive
    // assignment, visited first so ties resolve toward it.
    for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
        for (std::size_t j = 0; j < k; ++j) {
            candidate.gammas[j] = (mask >> j) & 1 ? -gamma_magnitudes[j] : gamma_magnitudes[j];
            big_gamma[j] = model.slopes[j] * candidate.gammas[j];
        }
        const double sigma2 =
            tradeoff_detail::sigma2_unchecked(big_gamma, spec.covariance, lambda, mode);
        if (!have_best || sigma2 < best_sigma2) {
            best = candidate;
            best_sigma2 = sigma2;
            have_best = true;
        }
    }
    return best;
}

}  // namespace garble
