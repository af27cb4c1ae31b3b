#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "garble/errors.hpp"
#include "garble/estimators.hpp"
#include "garble/garbler.hpp"
#include "garble/io.hpp"
#include "garble/model.hpp"
#include "garble/rng.hpp"

namespace garble {

// Runs the defended model behind POST /v1/predict. The garbling parameters
// are the defense: nothing the service sends may reveal gamma, lambda, or
// output_lambda.
struct ServiceConfig {
    RegressionModel model;
    GarblingConfig garbling;
    std::string bind_address = "127.0.0.1:0";
    std::uint64_t seed = 0;
    std::size_t max_batch = 10000;

    void validate() const {
        model.validate();
        garbling.validate(model.k());
        if (max_batch < 1) throw ConfigError("max_batch must be >= 1");
        parse_bind();
    }

    std::pair<std::string, int> parse_bind() const {
        const auto colon = bind_address.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == bind_address.size())
            throw ConfigError("bind address must be host:port, got '" + bind_address + "'");
        const std::string host = bind_address.substr(0, colon);
        int port = 0;
        try {
            port = std::stoi(bind_address.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("bind address has a non-numeric port: '" + bind_address + "'");
        }
        if (port < 0 || port > 65535)
            throw ConfigError("bind port out of range: " + std::to_string(port));
        return {host, port};
    }
};

inline ServiceConfig service_config_from_json(const nlohmann::json& j) {
    ServiceConfig cfg;
    const auto& model = j.at("model");
    cfg.model.intercept = model.at("intercept").get<double>();
    cfg.model.slopes = model.at("slopes").get<Vector>();
    const std::string link = model.at("link").get<std::string>();
    if (link == "identity")
        cfg.model.link = Link::Identity;
    else if (link == "logistic")
        cfg.model.link = Link::Logistic;
    else
        throw ConfigError("link must be \"identity\" or \"logistic\", got \"" + link + "\"");

    const auto& garbling = j.at("garbling");
    cfg.garbling.gammas = garbling.at("gammas").get<Vector>();
    cfg.garbling.lambda = garbling.at("lambda").get<double>();
    cfg.garbling.output_lambda = garbling.value("output_lambda", 0.0);
    const std::string mode = garbling.value("noise_mode", "independent");
    if (mode == "independent")
        cfg.garbling.noise_mode = NoiseMode::IndependentPerRegressor;
    else if (mode == "shared")
        cfg.garbling.noise_mode = NoiseMode::SharedAcrossRegressors;
    else
        throw ConfigError("noise_mode must be \"independent\" or \"shared\", got \"" + mode + "\"");

    cfg.bind_address = j.at("bind").get<std::string>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.max_batch = j.value("max_batch", std::size_t{10000});
    cfg.validate();
    return cfg;
}

inline ServiceConfig load_service_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
    try {
        return service_config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file schema error: " + std::string(e.what()));
    }
}

class PredictionService {
public:
    explicit PredictionService(ServiceConfig config)
        : config_(std::move(config)), rng_(config_.seed) {
        config_.validate();
        register_routes();
    }

    PredictionService(const PredictionService&) = delete;
    PredictionService& operator=(const PredictionService&) = delete;

    ~PredictionService() { stop(); }

    void start() {
        auto [host, port] = config_.parse_bind();
        host_ = host;
        if (port == 0) {
            port_ = server_.bind_to_any_port(host);
            if (port_ < 0) throw ConfigError("cannot bind to " + host + " on any port");
        } else {
            if (!server_.bind_to_port(host, port))
                throw ConfigError("cannot bind to " + config_.bind_address);
            port_ = port;
        }
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    void stop() {
        if (thread_.joinable()) {
            server_.stop();
            thread_.join();
        }
    }

    int port() const { return port_; }
    const std::string& host() const { return host_; }
    std::string base_url() const { return "http://" + host_ + ":" + std::to_string(port_); }

private:
    void register_routes() {
        server_.Get("/v1/info", [this](const httplib::Request&, httplib::Response& res) {
            // Model shape only; garbling parameters stay secret.
            res.set_content("{\"k\":" + std::to_string(config_.model.k()) + ",\"link\":\"" +
                                (config_.model.link == Link::Logistic ? "logistic" : "identity") +
                                "\"}",
                            "application/json");
        });

        server_.Post("/v1/predict", [this](const httplib::Request& req, httplib::Response& res) {
            handle_predict(req, res);
        });
    }

    static void error_response(httplib::Response& res, int status, const std::string& message) {
        res.status = status;
        nlohmann::json body{{"error", message}};
        res.set_content(body.dump(), "application/json");
    }

    void handle_predict(const httplib::Request& req, httplib::Response& res) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::exception& e) {
            error_response(res, 400, "malformed JSON: " + std::string(e.what()));
            return;
        }
        if (!j.is_object() || !j.contains("inputs") || !j["inputs"].is_array()) {
            error_response(res, 400, "request body must be {\"inputs\": [[...], ...]}");
            return;
        }
        const auto& inputs = j["inputs"];
        if (inputs.size() > config_.max_batch) {
            error_response(res, 413,
                           "batch of " + std::to_string(inputs.size()) + " rows exceeds max_batch=" +
                               std::to_string(config_.max_batch));
            return;
        }
        const std::size_t k = config_.model.k();
        std::vector<Vector> rows;
        rows.reserve(inputs.size());
        for (const auto& row : inputs) {
            if (!row.is_array() || row.size() != k) {
                error_response(res, 400,
                               "each input row must have K=" + std::to_string(k) +
                                   " numeric entries, got " + std::to_string(row.size()));
                return;
            }
            Vector x(k);
            for (std::size_t jcol = 0; jcol < k; ++jcol) {
                if (!row[jcol].is_number()) {
                    error_response(res, 400,
                                   "each input row must have K=" + std::to_string(k) +
                                       " numeric entries");
                    return;
                }
                x[jcol] = row[jcol].get<double>();
            }
            rows.push_back(std::move(x));
        }

        // One seeded stream serves all requests; draws are consumed in
        // request-arrival order.
        std::string body = "{\"outputs\":[";
        {
            std::lock_guard<std::mutex> lock(rng_mutex_);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const double y = garbled_predict(config_.model, rows[i], config_.garbling, rng_);
                if (i) body += ',';
                body += format_double(y);
            }
        }
        body += "]}";
        res.set_content(body, "application/json");
    }

    ServiceConfig config_;
    httplib::Server server_;
    Rng rng_;
    std::mutex rng_mutex_;
    std::thread thread_;
    std::string host_;
    int port_ = -1;
};

// Constructs and starts the service; the caller owns the handle.
inline std::unique_ptr<PredictionService> serve(const ServiceConfig& config) {
    auto svc = std::make_unique<PredictionService>(config);
    svc->start();
    return svc;
}

// --- attacker client ---------------------------------------------------------

enum class Estimator { OLS, LogitOLS };

struct StealOptions {
    std::string endpoint;  // e.g. http://127.0.0.1:8080
    std::size_t n = 0;
    CovariateSpec covariates;
    Estimator estimator = Estimator::OLS;
    std::optional<double> known_lambda;
    std::optional<double> known_output_lambda;
    std::uint64_t seed = 0;
    std::size_t batch = 10000;
    int max_retries = 3;
};

struct StealReport {
    FitResult fit;
    std::optional<double> recovered_beta;
    std::optional<double> recovered_beta_other_root;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t service_k = 0;
    std::string service_link;
};

namespace detail {

inline nlohmann::json get_json_with_retries(httplib::Client& cli, const std::string& path,
                                            int max_retries) {
    int attempts = 0;
    for (;;) {
        auto res = cli.Get(path);
        if (res) {
            if (res->status != 200) throw HttpStatusError(res->status, res->body);
            return nlohmann::json::parse(res->body);
        }
        if (++attempts > max_retries)
            throw TransportError("GET " + path + " failed: " + httplib::to_string(res.error()),
                                 attempts - 1);
    }
}

inline nlohmann::json post_json_with_retries(httplib::Client& cli, const std::string& path,
                                             const std::string& body, int max_retries) {
    int attempts = 0;
    for (;;) {
        auto res = cli.Post(path, body, "application/json");
        if (res) {
            if (res->status != 200) throw HttpStatusError(res->status, res->body);
            return nlohmann::json::parse(res->body);
        }
        if (++attempts > max_retries)
            throw TransportError("POST " + path + " failed: " + httplib::to_string(res.error()),
                                 attempts - 1);
    }
}

}  // namespace detail

// The model-stealing loop over the wire: sample n queries, submit them in
// batches, fit, and optionally run the identification attack against the
// parameters the attacker claims to know.
inline StealReport steal(const StealOptions& options) {
    if (options.n == 0) throw ConfigError("steal needs n >= 1");
    if (options.batch < 1) throw ConfigError("steal needs batch >= 1");

    httplib::Client cli(options.endpoint);
    cli.set_read_timeout(30, 0);

    const nlohmann::json info = detail::get_json_with_retries(cli, "/v1/info", options.max_retries);
    const std::size_t service_k = info.at("k").get<std::size_t>();
    if (service_k != options.covariates.k())
        throw DimensionError(service_k, options.covariates.k(), "K (from /v1/info)");

    CovariateSpec spec = options.covariates;
    spec.n = options.n;
    Rng rng(options.seed);
    Dataset data = sample_covariates(spec, rng);
    Vector outputs;
    outputs.reserve(options.n);

    for (std::size_t offset = 0; offset < options.n; offset += options.batch) {
        const std::size_t count = std::min(options.batch, options.n - offset);
        std::string body = "{\"inputs\":[";
        for (std::size_t i = 0; i < count; ++i) {
            if (i) body += ',';
            body += '[';
            for (std::size_t j = 0; j < service_k; ++j) {
                if (j) body += ',';
                body += format_double(data.inputs(offset + i, j));
            }
            body += ']';
        }
        body += "]}";
        const nlohmann::json reply =
            detail::post_json_with_retries(cli, "/v1/predict", body, options.max_retries);
        for (const auto& y : reply.at("outputs")) outputs.push_back(y.get<double>());
    }
    if (outputs.size() != options.n)
        throw DimensionError(options.n, outputs.size(), "returned output count");
    data.outputs = std::move(outputs);

    StealReport report;
    report.n = options.n;
    report.seed = options.seed;
    report.service_k = service_k;
    report.service_link = info.at("link").get<std::string>();
    report.fit = options.estimator == Estimator::LogitOLS ? logit_fit(data) : ols_fit(data);
    if (options.known_lambda) {
        const double l2 = options.known_output_lambda.value_or(0.0);
        report.recovered_beta = recover_beta_known_lambda_pair(report.fit, *options.known_lambda, l2);
        report.recovered_beta_other_root =
            recover_beta_other_root(report.fit, *options.known_lambda, l2);
    }
    return report;
}

inline nlohmann::json to_json(const StealReport& report) {
    nlohmann::json fit{{"intercept_hat", report.fit.intercept_hat},
                       {"slopes_hat", report.fit.slopes_hat},
                       {"residual_variance", report.fit.residual_variance},
                       {"n", report.fit.n}};
    return nlohmann::json{
        {"n", report.n},
        {"seed", report.seed},
        {"service_k", report.service_k},
        {"service_link", report.service_link},
        {"fit", fit},
        {"recovered_beta",
         report.recovered_beta ? nlohmann::json(*report.recovered_beta) : nlohmann::json(nullptr)},
        {"recovered_beta_other_root", report.recovered_beta_other_root
                                          ? nlohmann::json(*report.recovered_beta_other_root)
                                          : nlohmann::json(nullptr)}};
}

}  // namespace garble
