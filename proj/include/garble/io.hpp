#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "garble/errors.hpp"
#include "garble/experiment.hpp"

namespace garble {

// 17 significant digits: enough to round-trip any double exactly, so nothing
// downstream is perturbed by serialization.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char* csv_header() {
    return "gamma,lambda,n,d_closed,d_empirical,sigma2_closed,sigma2_empirical,"
           "sigma2_probability_scale,recovered_beta,seed";
}

inline std::string to_csv(const std::vector<ExperimentRow>& rows) {
    std::string out = csv_header();
    out += '\n';
    auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const ExperimentRow& r : rows) {
        out += format_double(r.gamma);
        out += ',';
        out += format_double(r.lambda);
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += cell(r.d_closed);
        out += ',';
        out += cell(r.d_empirical);
        out += ',';
        out += cell(r.sigma2_closed);
        out += ',';
        out += cell(r.sigma2_empirical);
        out += ',';
        out += cell(r.sigma2_probability_scale);
        out += ',';
        out += cell(r.recovered_beta);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

inline nlohmann::json row_to_json(const ExperimentRow& r) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    return nlohmann::json{{"gamma", r.gamma},
                          {"lambda", r.lambda},
                          {"n", r.n},
                          {"d_closed", opt(r.d_closed)},
                          {"d_empirical", opt(r.d_empirical)},
                          {"sigma2_closed", opt(r.sigma2_closed)},
                          {"sigma2_empirical", opt(r.sigma2_empirical)},
                          {"sigma2_probability_scale", opt(r.sigma2_probability_scale)},
                          {"recovered_beta", opt(r.recovered_beta)},
                          {"seed", r.seed}};
}

inline nlohmann::json to_json(const std::vector<ExperimentRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ExperimentRow& r : rows) arr.push_back(row_to_json(r));
    return arr;
}

inline nlohmann::json to_json(const RecoveryReport& report) {
    nlohmann::json scenarios = nlohmann::json::array();
    for (const RecoveryScenario& s : report.scenarios) {
        scenarios.push_back(
            {{"attacker", s.attacker},
             {"assumed_lambda", s.assumed_lambda},
             {"assumed_output_lambda",
              s.assumed_output_lambda ? nlohmann::json(*s.assumed_output_lambda)
                                      : nlohmann::json(nullptr)},
             {"beta_hat", s.fit.slopes_hat[0]},
             {"residual_variance", s.fit.residual_variance},
             {"recovered_beta", s.recovered_beta},
             {"recovered_beta_other_root", s.recovered_beta_other_root},
             {"true_beta", s.true_beta},
             {"error_abs", s.error_abs},
             {"error_rel", s.error_rel}});
    }
    return nlohmann::json{{"experiment", "recovery-attack"},
                          {"n", report.n},
                          {"seed", report.seed},
                          {"gamma", report.gamma},
                          {"lambda", report.lambda},
                          {"scenarios", scenarios}};
}

inline nlohmann::json to_json(const SmallSampleReport& report) {
    return nlohmann::json{{"experiment", "small-sample-mse"},
                          {"n", report.n},
                          {"replicates", report.replicates},
                          {"seed", report.seed},
                          {"gamma", report.gamma},
                          {"lambda", report.lambda},
                          {"mse_empirical", report.mse_empirical},
                          {"mse_reference", report.mse_reference},
                          {"reference_is_analytic", report.reference_is_analytic},
                          {"asymptote", report.asymptote}};
}

// Writes to the path, or to stdout when the path is empty or "-".
inline void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + path);
    f << content;
}

}  // namespace garble
