#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "garble/garbler.hpp"

using garble::garbled_predict;
using garble::GarblingConfig;
using garble::Link;
using garble::NoiseMode;
using garble::predict_clean;
using garble::RegressionModel;
using garble::Rng;
using garble::Vector;

namespace {

// Hands out a fixed epsilon; lets tests evaluate g(x) with pinned noise.
struct PinnedStream {
    double value = 0.0;
    double normal() { return value; }
};

}  // namespace

TEST_CASE("gamma = 0 leaves the input untouched") {
    Rng rng(1);
    const Vector g = garble::garble({7.0}, GarblingConfig::univariate(0.0, 5.0), rng);
    REQUIRE(g[0] == 7.0);
}

TEST_CASE("garble with pinned noise matches the hand evaluation") {
    PinnedStream eps{0.3};
    const Vector g = garble::garble({2.0}, GarblingConfig::univariate(0.5, 1.0), eps);
    // 2 + 0.5 * (2 + 0.3) = 3.15
    REQUIRE(g[0] == Catch::Approx(3.15).margin(1e-15));
}

TEST_CASE("lambda = 0 garbling is pure deterministic scaling") {
    Rng rng(9);
    const Vector g = garble::garble({2.0}, GarblingConfig::univariate(0.5, 0.0), rng);
    REQUIRE(g[0] == Catch::Approx(3.0).margin(1e-15));
}

TEST_CASE("garble rejects dimension mismatches") {
    Rng rng(1);
    REQUIRE_THROWS_AS(garble::garble({1.0, 2.0}, GarblingConfig::univariate(0.5, 1.0), rng),
                      garble::DimensionError);
}

TEST_CASE("shared mode applies one draw across coordinates") {
    GarblingConfig cfg;
    cfg.gammas = {0.5, 0.25};
    cfg.lambda = 2.0;
    cfg.noise_mode = NoiseMode::SharedAcrossRegressors;
    PinnedStream eps{1.0};
    const Vector g = garble::garble({1.0, 1.0}, cfg, eps);
    REQUIRE(g[0] == Catch::Approx(1.0 + 0.5 * (1.0 + 2.0)).margin(1e-15));
    REQUIRE(g[1] == Catch::Approx(1.0 + 0.25 * (1.0 + 2.0)).margin(1e-15));
}

TEST_CASE("garbled_predict with no garbling equals predict_clean bit-exactly") {
    const RegressionModel model{0.7, {2.0, -3.0}, Link::Logistic};
    GarblingConfig cfg = GarblingConfig::none(2);
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const Vector x = {rng.normal(), rng.normal()};
        Rng noise(77, static_cast<std::uint64_t>(i));
        REQUIRE(garbled_predict(model, x, cfg, noise) == predict_clean(model, x));
    }
}

TEST_CASE("garbled_predict matches the hand evaluation with pinned noise") {
    const RegressionModel model{0.0, {2.0}, Link::Identity};
    PinnedStream eps{0.3};
    // g(2) = 3.15, output = 2 * 3.15 = 6.3
    REQUIRE(garbled_predict(model, {2.0}, GarblingConfig::univariate(0.5, 1.0), eps) ==
            Catch::Approx(6.3).margin(1e-12));
}

TEST_CASE("logistic garbled prediction with x=0 and pinned eps=0 is the clean value") {
    const RegressionModel model{2.0, {3.0}, Link::Logistic};
    PinnedStream eps{0.0};
    const double expected = std::exp(2.0) / (1.0 + std::exp(2.0));
    REQUIRE(garbled_predict(model, {0.0}, GarblingConfig::univariate(1.0, 1.0), eps) ==
            Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("output noise enters on the log-odds scale for the logistic link") {
    const RegressionModel model{2.0, {3.0}, Link::Logistic};
    GarblingConfig cfg = GarblingConfig::univariate(0.0, 0.0, /*output_lambda=*/5.0);
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const double p = garbled_predict(model, {0.0}, cfg, rng);
        REQUIRE(p > 0.0);
        REQUIRE(p < 1.0);
    }
}

TEST_CASE("mean-zero constraint: average deviation vanishes on a centered dataset") {
    const std::size_t n = 100000;
    const double gamma = 0.5, lambda = 1.0;
    Rng xs(2025);
    Vector x(n);
    double mean = 0.0;
    for (auto& v : x) {
        v = xs.normal();
        mean += v;
    }
    mean /= static_cast<double>(n);
    for (auto& v : x) v -= mean;  // sample mean exactly ~0

    GarblingConfig cfg = GarblingConfig::univariate(gamma, lambda);
    Rng noise(99);
    double avg_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vector g = garble::garble({x[i]}, cfg, noise);
        avg_dev += g[0] - x[i];
    }
    avg_dev /= static_cast<double>(n);
    // dev_i = gamma * (x_i + lambda*eps_i); with centered x the average is
    // gamma*lambda*mean(eps), whose standard error is gamma*lambda/sqrt(n).
    const double se = gamma * lambda / std::sqrt(static_cast<double>(n));
    REQUIRE(std::abs(avg_dev) < 4.0 * se);
}

TEST_CASE("garbled coordinate is normal with mean (1+gamma)x and sd |gamma|lambda") {
    const double gamma = -0.4, lambda = 2.0, x = 1.7;
    GarblingConfig cfg = GarblingConfig::univariate(gamma, lambda);
    Rng rng(11);
    const std::size_t n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = garble::garble({x}, cfg, rng)[0];
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / static_cast<double>(n);
    const double sd = std::sqrt(sumsq / static_cast<double>(n) - mean * mean);
    const double want_mean = (1.0 + gamma) * x;
    const double want_sd = std::abs(gamma) * lambda;
    const double se_mean = want_sd / std::sqrt(static_cast<double>(n));
    const double se_sd = want_sd / std::sqrt(2.0 * static_cast<double>(n));
    REQUIRE(std::abs(mean - want_mean) < 3.0 * se_mean);
    REQUIRE(std::abs(sd - want_sd) < 3.0 * se_sd);
}
