// Population-mean estimators under missing-at-random outcomes:
// complete-case, regression imputation, AIPWT, PSPP, their BART-backed
// variants (AIPWT-with-BART, PSBPP, direct BART, BARTps), and the two-part
// Box-Cox pipeline for semicontinuous outcomes.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustsq/bart.hpp"
#include "robustsq/dataset.hpp"
#include "robustsq/linalg.hpp"
#include "robustsq/rng.hpp"
#include "robustsq/spline.hpp"

namespace robustsq {

// How a propensity posterior enters an estimator: its posterior mean or a
// single stored draw.
struct PropensityMode {
    bool use_mean = true;
    int draw_index = 0;
    static PropensityMode mean() { return {true, 0}; }
    static PropensityMode draw(int index) { return {false, index}; }
};

inline Estimate estimate_cc(const Dataset& data) {
    data.validate();
    double sum = 0.0, count = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i)
        if (data.r[i] == 1.0) {
            sum += data.y[i];
            count += 1.0;
        }
    return {sum / count, {}, "CC"};
}

// Regression imputation: fit the mean design on observed rows, impute the
// missing outcomes by their fitted means.
inline Estimate impute_mlr(const Dataset& data, const Eigen::MatrixXd& mean_design) {
    data.validate();
    const auto obs = data.observed_rows();
    Eigen::MatrixXd xo(obs.size(), mean_design.cols());
    Eigen::VectorXd yo(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) {
        xo.row(k) = mean_design.row(obs[k]);
        yo[k] = data.y[obs[k]];
    }
    const LinearFit fit = ols_fit(xo, yo);
    Estimate est;
    est.method = "MLR";
    est.imputed_y = data.y;
    for (Eigen::Index i = 0; i < data.n(); ++i)
        if (data.r[i] == 0.0) est.imputed_y[i] = fit.predict_row(mean_design.row(i));
    est.mu_hat = est.imputed_y.mean();
    return est;
}

// AIPWT in residual form: (1/n) sum { (r/z)(y - mhat) + mhat }.
// No weight truncation by default: the estimator's documented instability
// under double misspecification is part of its behavior.  clip_floor > 0
// clips propensities below that value first.
inline Estimate estimate_aipwt(const Dataset& data, const Eigen::VectorXd& z,
                               const Eigen::VectorXd& mhat, double clip_floor = 0.0) {
    data.validate();
    if (z.size() != data.n() || mhat.size() != data.n())
        throw std::invalid_argument("estimate_aipwt: z and mhat must have length n");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        double zi = clip_floor > 0.0 ? std::max(z[i], clip_floor) : z[i];
        if (data.r[i] == 1.0) {
            if (!(zi > 0.0))
                throw std::domain_error("estimate_aipwt: zero propensity on an observed row");
            acc += (data.y[i] - mhat[i]) / zi + mhat[i];
        } else {
            acc += mhat[i];
        }
    }
    return {acc / static_cast<double>(data.n()), {}, "AIPWT"};
}

// Full PSPP fit: spline on the propensity score plus an arbitrary covariate
// design, estimated as a penalized mixed model on observed rows.
struct PsppFit {
    Estimate estimate;
    MixedModelFit model;
    Eigen::VectorXd predictions;  // conditional means, all rows
    bool spline_active = true;
};

// f_design carries no intercept (the spline fixed part has one); it may have
// zero columns for the spline-only variant.
inline PsppFit fit_pspp_detail(const Dataset& data, const Eigen::VectorXd& z,
                               const Eigen::MatrixXd& f_design, int knot_count = 20,
                               int degree = 1) {
    data.validate();
    if (z.size() != data.n())
        throw std::invalid_argument("fit_pspp: z must have length n");
    const auto obs = data.observed_rows();

    std::vector<double> z_obs(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) z_obs[k] = z[obs[k]];
    double zmin = z_obs[0], zmax = z_obs[0];
    for (double v : z_obs) {
        zmin = std::min(zmin, v);
        zmax = std::max(zmax, v);
    }

    PsppFit out;
    Eigen::MatrixXd fixed_all, random_all;
    if (zmax - zmin > 1e-10) {
        SplineBasisSpec spec;
        spec.degree = degree;
        spec.knots = equally_spaced_knots(z_obs, knot_count);
        std::vector<double> z_all(z.data(), z.data() + z.size());
        const SplineBasis basis = truncated_power_basis(z_all, spec);
        fixed_all.resize(data.n(), basis.fixed.cols() + f_design.cols());
        fixed_all << basis.fixed, f_design;
        random_all = basis.random;
    } else {
        // Degenerate scores: the spline carries no information, fall back to
        // the covariate design alone.
        out.spline_active = false;
        fixed_all.resize(data.n(), 1 + f_design.cols());
        fixed_all.col(0).setOnes();
        if (f_design.cols() > 0) fixed_all.rightCols(f_design.cols()) = f_design;
        random_all = Eigen::MatrixXd::Zero(data.n(), 1);
    }

    Eigen::MatrixXd fixed_obs(obs.size(), fixed_all.cols());
    Eigen::MatrixXd random_obs(obs.size(), random_all.cols());
    Eigen::VectorXd y_obs(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) {
        fixed_obs.row(k) = fixed_all.row(obs[k]);
        random_obs.row(k) = random_all.row(obs[k]);
        y_obs[k] = data.y[obs[k]];
    }

    out.model = out.spline_active
                    ? reml_spline_fit(fixed_obs, random_obs, y_obs)
                    : reml_spline_fit_fixed_lambda(fixed_obs, random_obs, y_obs, 1e12);
    out.predictions = out.model.predict(fixed_all, random_all);

    out.estimate.method = "PSPP";
    out.estimate.imputed_y = data.y;
    for (Eigen::Index i = 0; i < data.n(); ++i)
        if (data.r[i] == 0.0) out.estimate.imputed_y[i] = out.predictions[i];
    out.estimate.mu_hat = out.estimate.imputed_y.mean();
    return out;
}

inline Estimate fit_pspp(const Dataset& data, const Eigen::VectorXd& z,
                         const Eigen::MatrixXd& f_design, int knot_count = 20,
                         int degree = 1) {
    return fit_pspp_detail(data, z, f_design, knot_count, degree).estimate;
}

// BART propensity scores on a covariate block: probit BART of r on xbart.
inline Eigen::VectorXd bart_propensity(const Dataset& data, const Eigen::MatrixXd& xbart,
                                       const BartConfig& config, PropensityMode mode,
                                       RngStream& rng) {
    BartConfig cfg = config;
    cfg.keep_forests = false;  // training predictions suffice here
    const BartPosterior post = backfit_probit(xbart, data.r, cfg, rng);
    return mode.use_mean ? post.train_mean() : post.train_pred.col(mode.draw_index);
}

// PSBPP: PSPP with the propensity score replaced by a BART-probit estimate.
inline Estimate estimate_psbpp(const Dataset& data, const Eigen::MatrixXd& xbart,
                               const BartConfig& config, const Eigen::MatrixXd& f_design,
                               int knot_count, int degree, PropensityMode mode,
                               RngStream& rng) {
    const Eigen::VectorXd z = bart_propensity(data, xbart, config, mode, rng);
    Estimate est = fit_pspp(data, z, f_design, knot_count, degree);
    est.method = "PSBPP";
    return est;
}

namespace detail {
// Continuous BART of the observed outcomes on `xfit`, posterior-mean
// prediction on every row.
inline Eigen::VectorXd bart_mean_model(const Dataset& data, const Eigen::MatrixXd& xfit,
                                       const BartConfig& config, RngStream& rng) {
    const auto obs = data.observed_rows();
    Eigen::MatrixXd xo(obs.size(), xfit.cols());
    Eigen::VectorXd yo(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) {
        xo.row(k) = xfit.row(obs[k]);
        yo[k] = data.y[obs[k]];
    }
    const BartPosterior post = backfit_continuous(xo, yo, config, rng);
    return posterior_predict_mean(post, xfit);
}
}  // namespace detail

// AIPWT with both nuisance models replaced by BART posteriors.
inline Estimate estimate_aipwt_bart(const Dataset& data, const Eigen::MatrixXd& xbart,
                                    const BartConfig& config, RngStream& rng) {
    const Eigen::VectorXd z = bart_propensity(data, xbart, config, PropensityMode::mean(), rng);
    const Eigen::VectorXd mhat = detail::bart_mean_model(data, xbart, config, rng);
    Estimate est = estimate_aipwt(data, z, mhat);
    est.method = "AIPWT-BART";
    return est;
}

// Direct BART imputation of the missing outcomes.
inline Estimate estimate_bart_direct(const Dataset& data, const Eigen::MatrixXd& xbart,
                                     const BartConfig& config, RngStream& rng) {
    data.validate();
    const Eigen::VectorXd pred = detail::bart_mean_model(data, xbart, config, rng);
    Estimate est;
    est.method = "BART";
    est.imputed_y = data.y;
    for (Eigen::Index i = 0; i < data.n(); ++i)
        if (data.r[i] == 0.0) est.imputed_y[i] = pred[i];
    est.mu_hat = est.imputed_y.mean();
    return est;
}

// BARTps: direct BART with the BART propensity score appended as a covariate.
inline Estimate estimate_bartps(const Dataset& data, const Eigen::MatrixXd& xbart,
                                const BartConfig& config, PropensityMode mode,
                                RngStream& rng) {
    const Eigen::VectorXd z = bart_propensity(data, xbart, config, mode, rng);
    Eigen::MatrixXd augmented(data.n(), xbart.cols() + 1);
    augmented << xbart, z;
    Estimate est = estimate_bart_direct(data, augmented, config, rng);
    est.method = "BARTps";
    return est;
}

enum class PipelineMethod { pspp, aipwt, psbpp, bartps };

// Two-part pipeline for nonnegative semicontinuous outcomes:
// (1) probit BART classifies zero vs positive; missing rows predicted zero
//     are imputed 0;
// (2) Box-Cox exponent fit on the observed positives;
// (3) the chosen method imputes predicted-positive missing rows on the
//     transformed scale; negative transformed predictions become 0, positive
//     ones are inverse-transformed.
inline Estimate two_part_boxcox_pipeline(const Dataset& data, PipelineMethod method,
                                         const BartConfig& config, RngStream& rng,
                                         int knot_count = 20, int degree = 1) {
    data.validate();
    const Eigen::Index n = data.n();
    std::vector<int> obs_rows, missing_rows;
    std::vector<double> obs_positive;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (data.r[i] == 1.0) {
            if (data.y[i] < 0.0)
                throw std::domain_error("two_part_boxcox_pipeline: observed y must be >= 0");
            obs_rows.push_back(static_cast<int>(i));
            if (data.y[i] > 0.0) obs_positive.push_back(data.y[i]);
        } else {
            missing_rows.push_back(static_cast<int>(i));
        }
    }

    Estimate est;
    est.method = "two-part";
    est.imputed_y = data.y;
    for (int i : missing_rows) est.imputed_y[i] = 0.0;

    // Every observed outcome is zero: nothing to transform, impute all zeros.
    if (obs_positive.empty()) {
        est.mu_hat = est.imputed_y.mean();
        return est;
    }

    // Step 1: classify zero vs positive among missing rows.
    std::vector<int> predicted_positive = missing_rows;
    const bool has_observed_zero = obs_positive.size() < obs_rows.size();
    if (has_observed_zero && !missing_rows.empty()) {
        Eigen::MatrixXd xo(obs_rows.size(), data.x.cols());
        Eigen::VectorXd pos(obs_rows.size());
        for (std::size_t k = 0; k < obs_rows.size(); ++k) {
            xo.row(k) = data.x.row(obs_rows[k]);
            pos[k] = data.y[obs_rows[k]] > 0.0 ? 1.0 : 0.0;
        }
        BartConfig cls = config;
        cls.keep_forests = true;
        const BartPosterior post = backfit_probit(xo, pos, cls, rng);
        Eigen::MatrixXd xmiss(missing_rows.size(), data.x.cols());
        for (std::size_t k = 0; k < missing_rows.size(); ++k)
            xmiss.row(k) = data.x.row(missing_rows[k]);
        const Eigen::VectorXd prob = posterior_predict_mean(post, xmiss);
        predicted_positive.clear();
        for (std::size_t k = 0; k < missing_rows.size(); ++k)
            if (prob[k] >= 0.5) predicted_positive.push_back(missing_rows[k]);
    }

    // Step 2: Box-Cox exponent on observed positives.
    const BoxCoxFit bc = box_cox(obs_positive);

    if (!predicted_positive.empty()) {
        // Step 3: impute on the transformed scale over the positive part.
        std::vector<int> part_rows;
        for (int i : obs_rows)
            if (data.y[i] > 0.0) part_rows.push_back(i);
        part_rows.insert(part_rows.end(), predicted_positive.begin(), predicted_positive.end());

        Dataset part;
        part.y.resize(part_rows.size());
        part.r.resize(part_rows.size());
        part.x.resize(part_rows.size(), data.x.cols());
        for (std::size_t k = 0; k < part_rows.size(); ++k) {
            const int i = part_rows[k];
            part.r[k] = data.r[i];
            part.x.row(k) = data.x.row(i);
            part.y[k] = data.r[i] == 1.0 ? bc.transform(data.y[i]) : 0.0;
        }

        const std::vector<Term> main_effects = [&] {
            std::vector<Term> t;
            for (int j = 0; j < data.x.cols(); ++j) t.push_back({j});
            return t;
        }();

        Eigen::VectorXd pred(part.n());
        switch (method) {
            case PipelineMethod::pspp: {
                const Eigen::MatrixXd design = build_design(part.x, main_effects);
                const Eigen::VectorXd z = logistic_fit(design, part.r).probabilities(design);
                const Eigen::MatrixXd f = build_design(part.x, main_effects, false);
                pred = fit_pspp_detail(part, z, f, knot_count, degree).predictions;
                break;
            }
            case PipelineMethod::aipwt: {
                const Eigen::MatrixXd design = build_design(part.x, main_effects);
                const Eigen::VectorXd mhat =
                    impute_mlr(part, design).imputed_y;  // MLR predictions on missing rows
                pred = mhat;
                break;
            }
            case PipelineMethod::psbpp: {
                const Eigen::VectorXd z =
                    bart_propensity(part, part.x, config, PropensityMode::mean(), rng);
                const Eigen::MatrixXd f = build_design(part.x, main_effects, false);
                pred = fit_pspp_detail(part, z, f, knot_count, degree).predictions;
                break;
            }
            case PipelineMethod::bartps: {
                const Eigen::VectorXd z =
                    bart_propensity(part, part.x, config, PropensityMode::mean(), rng);
                Eigen::MatrixXd augmented(part.n(), part.x.cols() + 1);
                augmented << part.x, z;
                BartConfig cfg = config;
                const auto obs = part.observed_rows();
                Eigen::MatrixXd xo(obs.size(), augmented.cols());
                Eigen::VectorXd yo(obs.size());
                for (std::size_t k = 0; k < obs.size(); ++k) {
                    xo.row(k) = augmented.row(obs[k]);
                    yo[k] = part.y[obs[k]];
                }
                const BartPosterior post = backfit_continuous(xo, yo, cfg, rng);
                pred = posterior_predict_mean(post, augmented);
                break;
            }
        }

        for (std::size_t k = 0; k < part_rows.size(); ++k) {
            if (part.r[k] == 1.0) continue;
            const double t = pred[k];
            est.imputed_y[part_rows[k]] = t <= 0.0 ? 0.0 : bc.inverse(t);
        }
    }

    est.mu_hat = est.imputed_y.mean();
    return est;
}

}  // namespace robustsq
