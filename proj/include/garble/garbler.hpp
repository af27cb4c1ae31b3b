#pragma once

#include <cmath>
#include <cstddef>

#include "garble/errors.hpp"
#include "garble/model.hpp"
#include "garble/rng.hpp"

namespace garble {

// Whether each garbled regressor gets its own standard-normal draw or one
// draw is reused across all of them. Both appear in the multivariate
// analysis; the closed forms differ only in the lambda^2 noise term.
enum class NoiseMode { IndependentPerRegressor, SharedAcrossRegressors };

// The defender's lever: g(x)_i = x_i + gamma_i * (x_i + lambda * eps_i)
//                              = (1 + gamma_i) x_i + gamma_i * lambda * eps_i.
// lambda is a STANDARD DEVIATION. output_lambda, when positive, adds
// N(0, output_lambda^2) on the linear-index scale after garbling.
struct GarblingConfig {
    Vector gammas;
    double lambda = 0.0;
    double output_lambda = 0.0;
    NoiseMode noise_mode = NoiseMode::IndependentPerRegressor;

    std::size_t k() const { return gammas.size(); }

    static GarblingConfig univariate(double gamma, double lambda, double output_lambda = 0.0) {
        GarblingConfig c;
        c.gammas = Vector(1, gamma);
        c.lambda = lambda;
        c.output_lambda = output_lambda;
        return c;
    }

    static GarblingConfig none(std::size_t k) {
        GarblingConfig c;
        c.gammas = Vector(k, 0.0);
        return c;
    }

    void validate(std::size_t model_k) const {
        if (gammas.size() != model_k) throw DimensionError(model_k, gammas.size(), "gamma length");
        if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
        if (!(output_lambda >= 0.0)) throw ConfigError("output_lambda must be >= 0");
        for (double g : gammas)
            if (!std::isfinite(g)) throw ConfigError("gamma is not finite");
    }
};

// Applies the garbling function to one query. Always consumes K draws in
// independent mode and exactly one in shared mode, regardless of gamma, so
// stream positions stay aligned across parties replaying the same seed.
template <RandomStream R>
Vector garble(const Vector& x, const GarblingConfig& config, R& rng) {
    if (x.size() != config.k()) throw DimensionError(config.k(), x.size(), "K");
    Vector g(x.size());
    if (config.noise_mode == NoiseMode::SharedAcrossRegressors) {
        const double eps = rng.normal();
        for (std::size_t i = 0; i < x.size(); ++i)
            g[i] = x[i] + config.gammas[i] * (x[i] + config.lambda * eps);
    } else {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double eps = rng.normal();
            g[i] = x[i] + config.gammas[i] * (x[i] + config.lambda * eps);
        }
    }
    return g;
}

// Linear index of the garbled query, including the optional output noise.
// The output-noise draw happens only when output_lambda > 0, so a plain
// configuration consumes the same draws as garble() alone.
template <RandomStream R>
double garbled_linear_index(const RegressionModel& model, const Vector& x,
                            const GarblingConfig& config, R& rng) {
    if (x.size() != model.k()) throw DimensionError(model.k(), x.size(), "K");
    const Vector g = garble(x, config, rng);
    double index = linear_index(model, g);
    if (config.output_lambda > 0.0) index += config.output_lambda * rng.normal();
    return index;
}

// What the service returns: f_theta(g(x)), with output noise applied on the
// linear-index scale (identity link: added to the output; logistic link:
// added to the log-odds, keeping returned probabilities inside (0, 1)).
template <RandomStream R>
double garbled_predict(const RegressionModel& model, const Vector& x,
                       const GarblingConfig& config, R& rng) {
    return apply_link(model, garbled_linear_index(model, x, config, rng));
}

}  // namespace garble
