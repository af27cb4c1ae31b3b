#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace garble {

// Vector/matrix length disagrees with the model's regressor count.
struct DimensionError : std::invalid_argument {
    DimensionError(std::size_t expected, std::size_t actual, const std::string& what_dim = "dimension")
        : std::invalid_argument("dimension mismatch: expected " + what_dim + "=" +
                                std::to_string(expected) + ", got " + std::to_string(actual)),
          expected(expected),
          actual(actual) {}
    std::size_t expected;
    std::size_t actual;
};

// Symmetric factorization hit a negative or inconsistent pivot.
struct FactorizationError : std::runtime_error {
    FactorizationError(std::size_t column, const std::string& reason)
        : std::runtime_error("factorization failed at column " + std::to_string(column) + ": " + reason),
          column(column) {}
    std::size_t column;
};

// Design matrix is rank deficient; `column` is the offending regressor
// (columns are counted over the design matrix, intercept first when present).
struct SingularityError : std::runtime_error {
    SingularityError(std::size_t column, std::string column_name)
        : std::runtime_error("design matrix is rank deficient at column " + std::to_string(column) +
                             " (" + column_name + ")"),
          column(column),
          column_name(std::move(column_name)) {}
    std::size_t column;
    std::string column_name;
};

struct InsufficientDataError : std::invalid_argument {
    InsufficientDataError(std::size_t n, std::size_t required)
        : std::invalid_argument("insufficient data: n=" + std::to_string(n) + " but at least " +
                                std::to_string(required) + " rows are required"),
          n(n),
          required(required) {}
    std::size_t n;
    std::size_t required;
};

struct InvalidProbabilityError : std::invalid_argument {
    InvalidProbabilityError(std::size_t row, double value)
        : std::invalid_argument("output at row " + std::to_string(row) +
                                " is not a probability in [0, 1]: " + std::to_string(value)),
          row(row),
          value(value) {}
    std::size_t row;
    double value;
};

// Recovery attack called with lambda = 0: the identification divides by lambda.
struct UndefinedAttackError : std::invalid_argument {
    explicit UndefinedAttackError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Claimed output-noise scale exceeds the observed residual variance.
struct InconsistentParametersError : std::invalid_argument {
    InconsistentParametersError(double residual_variance, double output_lambda)
        : std::invalid_argument("claimed output noise exceeds observed residual variance: sigma_hat^2=" +
                                std::to_string(residual_variance) + " < output_lambda^2=" +
                                std::to_string(output_lambda * output_lambda)),
          residual_variance(residual_variance),
          output_lambda(output_lambda) {}
    double residual_variance;
    double output_lambda;
};

struct UnsupportedSpecError : std::invalid_argument {
    explicit UnsupportedSpecError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct UndefinedMomentError : std::invalid_argument {
    explicit UndefinedMomentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// choose_gamma_signs enumerates 2^K assignments; refuses oversized K.
struct SizeError : std::invalid_argument {
    explicit SizeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Network-level failure in the attacker client after exhausting retries.
struct TransportError : std::runtime_error {
    TransportError(std::string msg, int retries)
        : std::runtime_error(std::move(msg) + " (after " + std::to_string(retries) + " retries)"),
          retries(retries) {}
    int retries;
};

// Non-2xx HTTP status surfaced verbatim to the caller.
struct HttpStatusError : std::runtime_error {
    HttpStatusError(int status, const std::string& body)
        : std::runtime_error("HTTP status " + std::to_string(status) + ": " + body), status(status) {}
    int status;
};

struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace garble
