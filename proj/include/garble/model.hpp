#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "garble/errors.hpp"
#include "garble/linalg.hpp"
#include "garble/rng.hpp"

namespace garble {

enum class Link { Identity, Logistic };

// The defended service's true model. Parameters are configuration, not
// fitted: the service is treated as pre-trained.
struct RegressionModel {
    double intercept = 0.0;
    Vector slopes;
    Link link = Link::Identity;

    std::size_t k() const { return slopes.size(); }

    void validate() const {
        if (slopes.empty()) throw ConfigError("model needs at least one slope");
        if (!std::isfinite(intercept)) throw ConfigError("model intercept is not finite");
        for (double b : slopes)
            if (!std::isfinite(b)) throw ConfigError("model slope is not finite");
    }
};

// Distribution of user queries: multivariate normal with the given mean and
// covariance. The covariance must be symmetric PSD (checked at tolerance
// 1e-10 by the factorization).
struct CovariateSpec {
    Vector mean;
    Matrix covariance;
    std::size_t n = 0;

    std::size_t k() const { return mean.size(); }

    static CovariateSpec standard_normal(std::size_t k, std::size_t n) {
        CovariateSpec s;
        s.mean = Vector(k, 0.0);
        s.covariance = Matrix::identity(k);
        s.n = n;
        return s;
    }

    static CovariateSpec univariate(double variance, std::size_t n) {
        CovariateSpec s;
        s.mean = Vector(1, 0.0);
        s.covariance = Matrix(1, 1);
        s.covariance(0, 0) = variance;
        s.n = n;
        return s;
    }

    bool is_standard_normal(double tol = 1e-12) const {
        for (double m : mean)
            if (std::abs(m) > tol) return false;
        for (std::size_t i = 0; i < covariance.rows; ++i)
            for (std::size_t j = 0; j < covariance.cols; ++j) {
                const double want = (i == j) ? 1.0 : 0.0;
                if (std::abs(covariance(i, j) - want) > tol) return false;
            }
        return true;
    }
};

// Attacker/user query matrix X plus, when present, the service's replies.
struct Dataset {
    Matrix inputs;                          // N x K
    std::optional<Vector> outputs;          // length N

    std::size_t n() const { return inputs.rows; }
    std::size_t k() const { return inputs.cols; }

    Vector row(std::size_t i) const {
        Vector x(inputs.cols);
        for (std::size_t j = 0; j < inputs.cols; ++j) x[j] = inputs(i, j);
        return x;
    }

    void validate() const {
        if (outputs && outputs->size() != inputs.rows)
            throw DimensionError(inputs.rows, outputs->size(), "output length");
        for (double v : inputs.data)
            if (!std::isfinite(v)) throw ConfigError("dataset input contains a non-finite value");
        if (outputs)
            for (double v : *outputs)
                if (!std::isfinite(v)) throw ConfigError("dataset output contains a non-finite value");
    }
};

// Numerically stable logistic transform. Branches on the sign of the index so
// exp never overflows, and clamps into the open interval so finite indices
// never return exactly 0 or 1.
inline double logistic(double t) {
    double p;
    if (t >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-t));
    } else {
        const double e = std::exp(t);
        p = e / (1.0 + e);
    }
    constexpr double lo = std::numeric_limits<double>::min();
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    if (p < lo) p = lo;
    if (p > hi) p = hi;
    return p;
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double linear_index(const RegressionModel& model, const Vector& x) {
    if (x.size() != model.k()) throw DimensionError(model.k(), x.size(), "K");
    double t = model.intercept;
    for (std::size_t j = 0; j < x.size(); ++j) t += model.slopes[j] * x[j];
    return t;
}

inline double apply_link(const RegressionModel& model, double index) {
    return model.link == Link::Logistic ? logistic(index) : index;
}

// The service's answer with no garbling: f_theta(x).
inline double predict_clean(const RegressionModel& model, const Vector& x) {
    return apply_link(model, linear_index(model, x));
}

// Draws spec.n i.i.d. multivariate-normal rows. Deterministic for a fixed
// stream; each row consumes exactly K normal draws.
template <RandomStream R>
Dataset sample_covariates(const CovariateSpec& spec, R& rng) {
    if (spec.n == 0) throw InsufficientDataError(0, 1);
    if (spec.covariance.rows != spec.k() || spec.covariance.cols != spec.k())
        throw DimensionError(spec.k(), spec.covariance.rows, "covariance side");
    const Matrix l = cholesky_psd(spec.covariance, 1e-10);
    const std::size_t k = spec.k();

    Dataset d;
    d.inputs = Matrix(spec.n, k);
    Vector z(k);
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t j = 0; j < k; ++j) z[j] = rng.normal();
        for (std::size_t j = 0; j < k; ++j) {
            double v = spec.mean[j];
            for (std::size_t m = 0; m <= j; ++m) v += l(j, m) * z[m];
            d.inputs(i, j) = v;
        }
    }
    return d;
}

}  // namespace garble
