// Interval estimation: Rubin's combining rule, the Heitjan modified
// bootstrap (resample-refit, pooled by Rubin's rule), and multiple
// imputation with posterior-mean or posterior-draw propensities.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustsq/bart.hpp"
#include "robustsq/dataset.hpp"
#include "robustsq/estimators.hpp"
#include "robustsq/rng.hpp"
#include "robustsq/stats.hpp"

namespace robustsq {

struct RubinCombined {
    double qbar = 0.0;
    double within = 0.0;   // W-bar
    double between = 0.0;  // B
    double total = 0.0;    // T = W-bar + (1 + 1/D) B
    double df = std::numeric_limits<double>::infinity();
    int d = 0;
};

inline RubinCombined rubin_combine(const std::vector<double>& estimates,
                                   const std::vector<double>& within) {
    const int d = static_cast<int>(estimates.size());
    if (d < 2) throw std::invalid_argument("rubin_combine: need at least 2 estimates");
    if (within.size() != estimates.size())
        throw std::invalid_argument("rubin_combine: estimates/within length mismatch");
    for (double w : within)
        if (w < 0.0) throw std::invalid_argument("rubin_combine: within-variance must be >= 0");

    RubinCombined out;
    out.d = d;
    out.qbar = mean(estimates);
    out.within = mean(within);
    out.between = sample_variance(estimates);
    out.total = out.within + (1.0 + 1.0 / d) * out.between;
    if (out.between > 0.0) {
        const double ratio = out.within / ((1.0 + 1.0 / d) * out.between);
        out.df = (d - 1) * (1.0 + ratio) * (1.0 + ratio);
    }
    return out;
}

struct IntervalEstimate {
    double point = 0.0;
    double lower = 0.0, upper = 0.0;
    double length = 0.0;
    std::string method;
    int d = 0;
};

inline IntervalEstimate interval_from_rubin(const RubinCombined& rc, const std::string& method) {
    IntervalEstimate iv;
    iv.point = rc.qbar;
    const double half = t_quantile(0.975, rc.df) * std::sqrt(rc.total);
    iv.lower = rc.qbar - half;
    iv.upper = rc.qbar + half;
    iv.length = iv.upper - iv.lower;
    iv.method = method;
    iv.d = rc.d;
    return iv;
}

// Heitjan modified bootstrap: D row-resamples with replacement, the whole
// pipeline refit per resample, pooled by Rubin's rule with zero
// within-variance (each resample already reflects sampling variability).
//
// Data needs: n(), take_rows(rows), has_observed_outcome().
// Estimator: double(const Data&, RngStream&).
template <typename Data, typename Estimator>
IntervalEstimate heitjan_bootstrap(const Data& data, Estimator estimator, int resamples,
                                   RngStream& rng, double within_variance = 0.0) {
    if (resamples < 2) throw std::invalid_argument("heitjan_bootstrap: need D >= 2");
    const auto n = data.n();
    std::vector<double> estimates;
    estimates.reserve(resamples);
    std::vector<int> rows(n);
    for (int d = 0; d < resamples; ++d) {
        RngStream sub = rng.substream(static_cast<std::uint64_t>(d));
        int attempts = 0;
        while (true) {
            for (auto& row : rows) row = static_cast<int>(sub.uniform_index(n));
            Data resampled = data.take_rows(rows);
            if (resampled.has_observed_outcome()) {
                estimates.push_back(estimator(resampled, sub));
                break;
            }
            if (++attempts > 100)
                throw std::runtime_error("heitjan_bootstrap: 100 resamples without observed outcomes");
        }
    }
    const RubinCombined rc =
        rubin_combine(estimates, std::vector<double>(estimates.size(), within_variance));
    return interval_from_rubin(rc, "bootstrap");
}

// --- multiple imputation -----------------------------------------------

// PSPP multiple imputation: per imputation, the logistic propensity is refit
// on a bootstrap resample (parameter uncertainty), scores are computed on the
// original data, the spline model is refit, and missing outcomes are imputed
// as conditional mean plus residual noise.
inline IntervalEstimate mi_interval_pspp(const Dataset& data, const Eigen::MatrixXd& prop_design,
                                         const Eigen::MatrixXd& f_design, int knot_count,
                                         int degree, int imputations, RngStream& rng) {
    if (imputations < 2) throw std::invalid_argument("mi_interval: need D >= 2");
    const auto n = data.n();
    std::vector<double> estimates, within;
    std::vector<int> rows(n);
    for (int d = 0; d < imputations; ++d) {
        RngStream sub = rng.substream(static_cast<std::uint64_t>(d));
        for (auto& row : rows) row = static_cast<int>(sub.uniform_index(n));
        Eigen::MatrixXd design_b(n, prop_design.cols());
        Eigen::VectorXd r_b(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            design_b.row(i) = prop_design.row(rows[i]);
            r_b[i] = data.r[rows[i]];
        }
        const LogisticFit prop = logistic_fit(design_b, r_b);
        const Eigen::VectorXd z = prop.probabilities(prop_design);
        const PsppFit fit = fit_pspp_detail(data, z, f_design, knot_count, degree);
        Eigen::VectorXd completed = data.y;
        for (Eigen::Index i = 0; i < n; ++i)
            if (data.r[i] == 0.0)
                completed[i] = fit.predictions[i] +
                               sub.normal(0.0, fit.model.residual_variance);
        estimates.push_back(completed.mean());
        double var = 0.0;
        const double m = completed.mean();
        for (Eigen::Index i = 0; i < n; ++i) var += (completed[i] - m) * (completed[i] - m);
        var /= static_cast<double>(n - 1);
        within.push_back(var / static_cast<double>(n));
    }
    return interval_from_rubin(rubin_combine(estimates, within), "mi");
}

// PSBPP multiple imputation.  The probit-BART propensity posterior is fit
// once; each imputation uses either its posterior mean or one stored draw.
inline IntervalEstimate mi_interval_psbpp(const Dataset& data, const Eigen::MatrixXd& xbart,
                                          const BartConfig& config, const Eigen::MatrixXd& f_design,
                                          int knot_count, int degree, int imputations,
                                          bool posterior_draw, RngStream& rng) {
    if (imputations < 2) throw std::invalid_argument("mi_interval: need D >= 2");
    BartConfig cfg = config;
    cfg.keep_forests = false;
    const BartPosterior post = backfit_probit(xbart, data.r, cfg, rng);
    const Eigen::VectorXd zmean = post.train_mean();
    const int stored = static_cast<int>(post.train_pred.cols());

    const auto n = data.n();
    std::vector<double> estimates, within;
    for (int d = 0; d < imputations; ++d) {
        RngStream sub = rng.substream(static_cast<std::uint64_t>(d) + 0x4d49ULL);
        const Eigen::VectorXd z =
            posterior_draw ? post.train_pred.col(d % stored).eval() : zmean;
        const PsppFit fit = fit_pspp_detail(data, z, f_design, knot_count, degree);
        Eigen::VectorXd completed = data.y;
        for (Eigen::Index i = 0; i < n; ++i)
            if (data.r[i] == 0.0)
                completed[i] = fit.predictions[i] +
                               sub.normal(0.0, fit.model.residual_variance);
        estimates.push_back(completed.mean());
        double var = 0.0;
        const double m = completed.mean();
        for (Eigen::Index i = 0; i < n; ++i) var += (completed[i] - m) * (completed[i] - m);
        var /= static_cast<double>(n - 1);
        within.push_back(var / static_cast<double>(n));
    }
    return interval_from_rubin(rubin_combine(estimates, within),
                               posterior_draw ? "mi-draw" : "mi-mean");
}

// BARTps multiple imputation.  Posterior-mean mode fits the outcome BART once
// and imputes from its stored draws; posterior-draw mode refits the outcome
// model per imputation with that draw's propensity appended.
inline IntervalEstimate mi_interval_bartps(const Dataset& data, const Eigen::MatrixXd& xbart,
                                           const BartConfig& config, int imputations,
                                           bool posterior_draw, RngStream& rng) {
    if (imputations < 2) throw std::invalid_argument("mi_interval: need D >= 2");
    BartConfig prop_cfg = config;
    prop_cfg.keep_forests = false;
    const BartPosterior prop = backfit_probit(xbart, data.r, prop_cfg, rng);
    const Eigen::VectorXd zmean = prop.train_mean();
    const int stored = static_cast<int>(prop.train_pred.cols());

    const auto n = data.n();
    const auto obs = data.observed_rows();
    std::vector<double> estimates, within;

    auto complete_from = [&](const BartPosterior& out_post, const Eigen::MatrixXd& xaug,
                             int draw, RngStream& sub) {
        const Eigen::VectorXd pred = posterior_predict_draw(out_post, xaug, draw);
        const double sigma = out_post.sigma_trace[draw];
        Eigen::VectorXd completed = data.y;
        for (Eigen::Index i = 0; i < n; ++i)
            if (data.r[i] == 0.0) completed[i] = pred[i] + sub.normal(0.0, sigma * sigma);
        estimates.push_back(completed.mean());
        double var = 0.0;
        const double m = completed.mean();
        for (Eigen::Index i = 0; i < n; ++i) var += (completed[i] - m) * (completed[i] - m);
        var /= static_cast<double>(n - 1);
        within.push_back(var / static_cast<double>(n));
    };

    auto fit_outcome = [&](const Eigen::VectorXd& z, RngStream& sub) {
        Eigen::MatrixXd xaug(n, xbart.cols() + 1);
        xaug << xbart, z;
        Eigen::MatrixXd xo(obs.size(), xaug.cols());
        Eigen::VectorXd yo(obs.size());
        for (std::size_t k = 0; k < obs.size(); ++k) {
            xo.row(k) = xaug.row(obs[k]);
            yo[k] = data.y[obs[k]];
        }
        return std::make_pair(backfit_continuous(xo, yo, config, sub), xaug);
    };

    if (!posterior_draw) {
        RngStream sub = rng.substream(0x4d4dULL);
        auto [out_post, xaug] = fit_outcome(zmean, sub);
        const int out_draws = static_cast<int>(out_post.sigma_trace.size());
        for (int d = 0; d < imputations; ++d) {
            RngStream noise = rng.substream(static_cast<std::uint64_t>(d) + 0x4e4fULL);
            complete_from(out_post, xaug, d % out_draws, noise);
        }
    } else {
        for (int d = 0; d < imputations; ++d) {
            RngStream sub = rng.substream(static_cast<std::uint64_t>(d) + 0x4e50ULL);
            auto [out_post, xaug] = fit_outcome(prop.train_pred.col(d % stored), sub);
            const int out_draws = static_cast<int>(out_post.sigma_trace.size());
            complete_from(out_post, xaug, static_cast<int>(sub.uniform_index(out_draws)), sub);
        }
    }
    return interval_from_rubin(rubin_combine(estimates, within),
                               posterior_draw ? "mi-draw" : "mi-mean");
}

}  // namespace robustsq
