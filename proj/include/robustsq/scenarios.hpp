// The three benchmark data-generating scenarios and the four
// misspecification regimes applied to them.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustsq/dataset.hpp"
#include "robustsq/rng.hpp"
#include "robustsq/stats.hpp"

namespace robustsq {

enum class Scenario { linear, quadratic, ks };
enum class RegimeTag { both_correct, prop_correct, mean_correct, both_wrong };

inline std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::linear: return "linear";
        case Scenario::quadratic: return "quadratic";
        case Scenario::ks: return "ks";
    }
    throw std::logic_error("unknown scenario");
}

inline std::string to_string(RegimeTag t) {
    switch (t) {
        case RegimeTag::both_correct: return "both-correct";
        case RegimeTag::prop_correct: return "prop-correct";
        case RegimeTag::mean_correct: return "mean-correct";
        case RegimeTag::both_wrong: return "both-wrong";
    }
    throw std::logic_error("unknown regime");
}

struct ScenarioDraw {
    Dataset data;                     // linear/quadratic: x = [x1, x2];
                                      // ks: x = [u1..u4, x1..x4]
    Eigen::VectorXd y_full;           // outcomes before deletion
    Eigen::VectorXd true_propensity;  // P(observed | covariates)
};

inline double scenario_true_mean(Scenario s) {
    return s == Scenario::ks ? 210.0 : 10.0;
}

// Columns the BART-based methods consume: always the analyst-observed
// covariates (the latent U columns in the KS scenario are never shown to
// the flexible learners).
inline std::vector<int> scenario_bart_columns(Scenario s) {
    return s == Scenario::ks ? std::vector<int>{4, 5, 6, 7} : std::vector<int>{0, 1};
}

namespace detail {
inline ScenarioDraw gen_interaction_scenario(Eigen::Index n, RngStream& rng, bool quadratic) {
    ScenarioDraw draw;
    draw.data.x.resize(n, 2);
    draw.y_full.resize(n);
    draw.true_propensity.resize(n);
    draw.data.y.resize(n);
    draw.data.r.resize(n);
    const double intercept = quadratic ? 11.875 : 10.8125;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x1 = rng.normal(0.0, 0.5);
        const double x2 = x1 + rng.normal(0.25, 0.5);
        draw.data.x(i, 0) = x1;
        draw.data.x(i, 1) = x2;
        const double inter = quadratic ? (x1 * x2) * (x1 * x2) : x1 * x2;
        const double logit = (0.15 + 0.75 * (x1 + x2) - 2.0 * x1 * x2) / 3.0;
        draw.true_propensity[i] = expit(logit);
        draw.y_full[i] = intercept + 0.75 * (x1 + x2) - 2.0 * inter + rng.normal(0.0, 4.0);
        draw.data.r[i] = rng.bernoulli(draw.true_propensity[i]) ? 1.0 : 0.0;
        draw.data.y[i] = draw.data.r[i] == 1.0 ? draw.y_full[i] : 0.0;
    }
    return draw;
}
}  // namespace detail

// Linear two-way interaction in both models; population mean 10.
inline ScenarioDraw gen_linear(Eigen::Index n, RngStream& rng) {
    if (n < 10) throw std::invalid_argument("gen_linear: n must be >= 10");
    return detail::gen_interaction_scenario(n, rng, false);
}

// Same propensity, quadratic interaction in the mean; population mean 10.
inline ScenarioDraw gen_quadratic(Eigen::Index n, RngStream& rng) {
    if (n < 10) throw std::invalid_argument("gen_quadratic: n must be >= 10");
    return detail::gen_interaction_scenario(n, rng, true);
}

// The analyst-observed transforms of the latent KS covariates.
inline std::array<double, 4> ks_transform(double u1, double u2, double u3, double u4) {
    const double t3 = u1 * u3 / 25.0 + 0.6;
    const double t4 = u2 + u4 + 20.0;
    return {std::exp(u1) / 2.0, u2 / (1.0 + std::exp(u1)), t3 * t3 * t3, t4 * t4};
}

// Kang-Schafer benchmark: latent U drive both models, the analyst observes
// nonlinear transforms X of them; population mean 210.
inline ScenarioDraw gen_ks(Eigen::Index n, RngStream& rng) {
    if (n < 10) throw std::invalid_argument("gen_ks: n must be >= 10");
    ScenarioDraw draw;
    draw.data.x.resize(n, 8);
    draw.y_full.resize(n);
    draw.true_propensity.resize(n);
    draw.data.y.resize(n);
    draw.data.r.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double u[4];
        for (double& v : u) v = rng.standard_normal();
        const double logit = -u[0] + 0.5 * u[1] - 0.25 * u[2] - 0.1 * u[3];
        draw.true_propensity[i] = expit(logit);
        draw.y_full[i] = 210.0 + 27.4 * u[0] + 13.7 * (u[1] + u[2] + u[3]) + rng.normal(0.0, 1.0);
        const auto xt = ks_transform(u[0], u[1], u[2], u[3]);
        for (int j = 0; j < 4; ++j) {
            draw.data.x(i, j) = u[j];
            draw.data.x(i, 4 + j) = xt[j];
        }
        draw.data.r[i] = rng.bernoulli(draw.true_propensity[i]) ? 1.0 : 0.0;
        draw.data.y[i] = draw.data.r[i] == 1.0 ? draw.y_full[i] : 0.0;
    }
    return draw;
}

inline ScenarioDraw generate_scenario(Scenario s, Eigen::Index n, RngStream& rng) {
    switch (s) {
        case Scenario::linear: return gen_linear(n, rng);
        case Scenario::quadratic: return gen_quadratic(n, rng);
        case Scenario::ks: return gen_ks(n, rng);
    }
    throw std::logic_error("unknown scenario");
}

struct Regime {
    RegimeTag tag;
    std::vector<Term> propensity_terms;
    std::vector<Term> mean_terms;
};

inline Regime regime_designs(Scenario scenario, RegimeTag tag) {
    const bool prop_ok = tag == RegimeTag::both_correct || tag == RegimeTag::prop_correct;
    const bool mean_ok = tag == RegimeTag::both_correct || tag == RegimeTag::mean_correct;
    Regime regime;
    regime.tag = tag;
    if (scenario == Scenario::ks) {
        const std::vector<Term> latent{{0}, {1}, {2}, {3}};
        const std::vector<Term> observed{{4}, {5}, {6}, {7}};
        regime.propensity_terms = prop_ok ? latent : observed;
        regime.mean_terms = mean_ok ? latent : observed;
    } else {
        const std::vector<Term> wrong{{0}, {1}};
        std::vector<Term> prop_correct_terms{{0}, {1}, {0, 1}};
        std::vector<Term> mean_correct_terms = prop_correct_terms;
        if (scenario == Scenario::quadratic) mean_correct_terms = {{0}, {1}, {0, 0, 1, 1}};
        regime.propensity_terms = prop_ok ? prop_correct_terms : wrong;
        regime.mean_terms = mean_ok ? mean_correct_terms : wrong;
    }
    return regime;
}

}  // namespace robustsq
