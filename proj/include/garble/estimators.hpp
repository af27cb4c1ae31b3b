#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "garble/errors.hpp"
#include "garble/linalg.hpp"
#include "garble/model.hpp"

namespace garble {

// What the attacker gets out of a least-squares pass over (X, Y_hat).
// residual_variance is the maximum-likelihood estimate (1/N normalization),
// which is the quantity that converges to (beta*gamma*lambda)^2 under
// garbling and is what the recovery attacks consume.
struct FitResult {
    double intercept_hat = 0.0;
    Vector slopes_hat;
    double residual_variance = 0.0;
    std::size_t n = 0;

    std::size_t k() const { return slopes_hat.size(); }
};

// Ordinary least squares via the normal equations with a Cholesky solve.
inline FitResult ols_fit(const Dataset& data, bool include_intercept = true) {
    data.validate();
    if (!data.outputs) throw ConfigError("ols_fit needs a dataset with outputs");
    const std::size_t n = data.n();
    const std::size_t k = data.k();
    const std::size_t p = k + (include_intercept ? 1 : 0);
    if (n <= p) throw InsufficientDataError(n, p + 1);

    // G = A^T A, rhs = A^T y with A = [1 X] (or X without intercept).
    Matrix g(p, p);
    Vector rhs(p, 0.0);
    Vector a_row(p);
    const Vector& y = *data.outputs;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        if (include_intercept) a_row[c++] = 1.0;
        for (std::size_t j = 0; j < k; ++j) a_row[c++] = data.inputs(i, j);
        for (std::size_t r = 0; r < p; ++r) {
            for (std::size_t s = r; s < p; ++s) g(r, s) += a_row[r] * a_row[s];
            rhs[r] += a_row[r] * y[i];
        }
    }
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t s = 0; s < r; ++s) g(r, s) = g(s, r);

    Vector coef;
    try {
        coef = solve_spd(g, rhs);
    } catch (const FactorizationError& e) {
        const std::size_t col = e.column;
        std::string name;
        if (include_intercept)
            name = (col == 0) ? "intercept" : ("regressor " + std::to_string(col - 1));
        else
            name = "regressor " + std::to_string(col);
        throw SingularityError(col, name);
    }

    FitResult fit;
    fit.n = n;
    if (include_intercept) {
        fit.intercept_hat = coef[0];
        fit.slopes_hat.assign(coef.begin() + 1, coef.end());
    } else {
        fit.intercept_hat = 0.0;
        fit.slopes_hat = coef;
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = fit.intercept_hat;
        for (std::size_t j = 0; j < k; ++j) pred += fit.slopes_hat[j] * data.inputs(i, j);
        const double r = y[i] - pred;
        ss += r * r;
    }
    fit.residual_variance = ss / static_cast<double>(n);
    return fit;
}

// Least squares on the log-odds: logit(p) = ln(p / (1 - p)) applied
// elementwise, then a straight OLS with intercept. Estimates live on the
// log-odds scale. Probabilities are clamped to [1e-12, 1 - 1e-12] first to
// tolerate floating-point saturation deep in the logistic tails.
inline FitResult logit_fit(const Dataset& data) {
    data.validate();
    if (!data.outputs) throw ConfigError("logit_fit needs a dataset with outputs");
    Dataset transformed;
    transformed.inputs = data.inputs;
    Vector z(data.outputs->size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        double p = (*data.outputs)[i];
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidProbabilityError(i, p);
        if (p < 1e-12) p = 1e-12;
        if (p > 1.0 - 1e-12) p = 1.0 - 1e-12;
        z[i] = logit(p);
    }
    transformed.outputs = std::move(z);
    return ols_fit(transformed, /*include_intercept=*/true);
}

// Identification attack for an attacker that knows lambda: in the large-N
// limit beta_hat -> (1+gamma)beta and sigma_hat^2 -> (beta*gamma*lambda)^2,
// so beta = beta_hat - sigma_hat / lambda (taking the positive root, i.e.
// assuming beta*gamma > 0). Undefined at lambda = 0, which is exactly why a
// service that wants this attack to stay infeasible keeps lambda hidden.
inline double recover_beta_known_lambda(const FitResult& fit, double lambda) {
    if (fit.k() != 1) throw DimensionError(1, fit.k(), "K (recovery attack is univariate)");
    if (!(lambda > 0.0))
        throw UndefinedAttackError("recovery with lambda = 0 divides by zero; the attack needs lambda > 0");
    return fit.slopes_hat[0] - std::sqrt(fit.residual_variance) / lambda;
}

// Extension to the output-noise defense: with output noise, residual variance
// converges to (beta*gamma*lambda)^2 + output_lambda^2, so an attacker who
// knows BOTH scales still re-identifies beta.
inline double recover_beta_known_lambda_pair(const FitResult& fit, double lambda,
                                             double output_lambda) {
    if (fit.k() != 1) throw DimensionError(1, fit.k(), "K (recovery attack is univariate)");
    if (!(lambda > 0.0))
        throw UndefinedAttackError("recovery with lambda = 0 divides by zero; the attack needs lambda > 0");
    if (!(output_lambda >= 0.0)) throw ConfigError("output_lambda must be >= 0");
    const double excess = fit.residual_variance - output_lambda * output_lambda;
    if (excess < 0.0) throw InconsistentParametersError(fit.residual_variance, output_lambda);
    return fit.slopes_hat[0] - std::sqrt(excess) / lambda;
}

// The other root of the residual-variance equation. The attack as printed
// assumes beta*gamma > 0; experiment reports surface both candidates instead
// of guessing the sign.
inline double recover_beta_other_root(const FitResult& fit, double lambda,
                                      double output_lambda = 0.0) {
    if (fit.k() != 1) throw DimensionError(1, fit.k(), "K (recovery attack is univariate)");
    if (!(lambda > 0.0))
        throw UndefinedAttackError("recovery with lambda = 0 divides by zero; the attack needs lambda > 0");
    const double excess = fit.residual_variance - output_lambda * output_lambda;
    if (excess < 0.0) throw InconsistentParametersError(fit.residual_variance, output_lambda);
    return fit.slopes_hat[0] + std::sqrt(excess) / lambda;
}

}  // namespace garble
