// Simulation study harness: runs the estimator x regime grid over replicated
// scenario draws and aggregates bias, RMSE, coverage, and interval length.
#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "robustsq/estimators.hpp"
#include "robustsq/scenarios.hpp"
#include "robustsq/uncertainty.hpp"

namespace robustsq {

enum class Method { bd, cc, mlr, pspp, aipwt, psbpp, aipwt_bart, bart, bartps };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::bd: return "BD";
        case Method::cc: return "CC";
        case Method::mlr: return "MLR";
        case Method::pspp: return "PSPP";
        case Method::aipwt: return "AIPWT";
        case Method::psbpp: return "PSBPP";
        case Method::aipwt_bart: return "AIPWT-BART";
        case Method::bart: return "BART";
        case Method::bartps: return "BARTps";
    }
    throw std::logic_error("unknown method");
}

inline const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods{
        Method::bd,    Method::cc,         Method::mlr,  Method::pspp,  Method::aipwt,
        Method::psbpp, Method::aipwt_bart, Method::bart, Method::bartps};
    return methods;
}

inline bool uses_bart(Method m) {
    return m == Method::psbpp || m == Method::aipwt_bart || m == Method::bart ||
           m == Method::bartps;
}

enum class UncertaintyMode { none, bootstrap, mi_mean, mi_draw };

inline std::string to_string(UncertaintyMode u) {
    switch (u) {
        case UncertaintyMode::none: return "none";
        case UncertaintyMode::bootstrap: return "bootstrap";
        case UncertaintyMode::mi_mean: return "mi-mean";
        case UncertaintyMode::mi_draw: return "mi-draw";
    }
    throw std::logic_error("unknown uncertainty mode");
}

// One replicate's data: the post-deletion dataset plus the pre-deletion
// outcomes (the BD reference estimator needs them; bootstrap resampling
// keeps the rows aligned).
struct SimBundle {
    Dataset data;
    Eigen::VectorXd y_full;

    Eigen::Index n() const { return data.n(); }
    bool has_observed_outcome() const { return data.has_observed_outcome(); }
    SimBundle take_rows(const std::vector<int>& rows) const {
        SimBundle out;
        out.data = data.take_rows(rows);
        out.y_full.resize(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) out.y_full[k] = y_full[rows[k]];
        return out;
    }
};

struct ExperimentSpec {
    Scenario scenario = Scenario::linear;
    Eigen::Index n = 1000;
    int replicates = 100;
    std::vector<Method> methods = all_methods();
    std::vector<RegimeTag> regimes{RegimeTag::both_correct, RegimeTag::prop_correct,
                                   RegimeTag::mean_correct, RegimeTag::both_wrong};
    UncertaintyMode uncertainty = UncertaintyMode::bootstrap;
    int resamples = 200;  // D
    BartConfig bart = BartConfig::desk();
    int knot_count = 20;
    int degree = 1;
    std::uint64_t seed = 20240817;
    int jobs = 1;
    double failure_cap = 0.10;  // fraction of failed replicates invalidating a cell
};

struct MetricsRow {
    std::string scenario, regime, method;
    Eigen::Index n = 0;
    int replicates = 0;
    double bias = 0.0, rmse = 0.0, coverage = 0.0, ail = 0.0;
    int failures = 0;
};

struct ExperimentResult {
    std::vector<MetricsRow> rows;
    bool invalid = false;  // some cell exceeded the failure cap
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<int>& cols) {
    Eigen::MatrixXd out(x.rows(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(j) = x.col(cols[j]);
    return out;
}

inline std::string terms_key(const std::vector<Term>& terms) {
    std::string key;
    for (const Term& t : terms) {
        for (int j : t) key += std::to_string(j) + ".";
        key += "|";
    }
    return key;
}

// Cache key: two cells with equal keys are algorithmically identical, so the
// harness computes them once per replicate (this is what makes the
// BART-family rows bit-identical across regimes).
inline std::string cell_key(Method m, const Regime& regime) {
    switch (m) {
        case Method::bd:
        case Method::cc:
        case Method::psbpp:  // depends on the mean design only
            return m == Method::psbpp ? "PSBPP/" + terms_key(regime.mean_terms)
                                      : to_string(m);
        case Method::mlr:
            return "MLR/" + terms_key(regime.mean_terms);
        case Method::pspp:
        case Method::aipwt:
            return to_string(m) + "/" + terms_key(regime.propensity_terms) + "/" +
                   terms_key(regime.mean_terms);
        default:  // BART-family methods never see the regime designs
            return to_string(m);
    }
}

// OLS mean-model predictions on every row (fit on observed rows only).
inline Eigen::VectorXd ols_predictions(const Dataset& data, const Eigen::MatrixXd& design) {
    const auto obs = data.observed_rows();
    Eigen::MatrixXd xo(obs.size(), design.cols());
    Eigen::VectorXd yo(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) {
        xo.row(k) = design.row(obs[k]);
        yo[k] = data.y[obs[k]];
    }
    return design * ols_fit(xo, yo).coefficients;
}

inline Eigen::VectorXd logistic_propensity(const Dataset& data, const std::vector<Term>& terms) {
    const Eigen::MatrixXd design = build_design(data.x, terms);
    return logistic_fit(design, data.r).probabilities(design);
}

}  // namespace detail

// Point estimate for one (method, regime) cell.
inline double point_estimate(Method method, const SimBundle& bundle, const Regime& regime,
                             const std::vector<int>& bart_cols, const ExperimentSpec& spec,
                             RngStream& rng) {
    const Dataset& data = bundle.data;
    switch (method) {
        case Method::bd:
            return bundle.y_full.mean();
        case Method::cc:
            return estimate_cc(data).mu_hat;
        case Method::mlr:
            return impute_mlr(data, build_design(data.x, regime.mean_terms)).mu_hat;
        case Method::aipwt: {
            const Eigen::VectorXd z = detail::logistic_propensity(data, regime.propensity_terms);
            const Eigen::VectorXd mhat =
                detail::ols_predictions(data, build_design(data.x, regime.mean_terms));
            return estimate_aipwt(data, z, mhat).mu_hat;
        }
        case Method::pspp: {
            const Eigen::VectorXd z = detail::logistic_propensity(data, regime.propensity_terms);
            const Eigen::MatrixXd f = build_design(data.x, regime.mean_terms, false);
            return fit_pspp(data, z, f, spec.knot_count, spec.degree).mu_hat;
        }
        case Method::psbpp: {
            const Eigen::MatrixXd xbart = detail::select_columns(data.x, bart_cols);
            const Eigen::MatrixXd f = build_design(data.x, regime.mean_terms, false);
            return estimate_psbpp(data, xbart, spec.bart, f, spec.knot_count, spec.degree,
                                  PropensityMode::mean(), rng)
                .mu_hat;
        }
        case Method::aipwt_bart: {
            const Eigen::MatrixXd xbart = detail::select_columns(data.x, bart_cols);
            return estimate_aipwt_bart(data, xbart, spec.bart, rng).mu_hat;
        }
        case Method::bart: {
            const Eigen::MatrixXd xbart = detail::select_columns(data.x, bart_cols);
            return estimate_bart_direct(data, xbart, spec.bart, rng).mu_hat;
        }
        case Method::bartps: {
            const Eigen::MatrixXd xbart = detail::select_columns(data.x, bart_cols);
            return estimate_bartps(data, xbart, spec.bart, PropensityMode::mean(), rng).mu_hat;
        }
    }
    throw std::logic_error("unknown method");
}

struct CellResult {
    double point = 0.0;
    bool has_interval = false;
    IntervalEstimate interval;
    bool failed = false;
};

inline CellResult compute_cell(Method method, const SimBundle& bundle, const Regime& regime,
                               const std::vector<int>& bart_cols, const ExperimentSpec& spec,
                               RngStream& rng) {
    CellResult cell;
    RngStream point_rng = rng.substream(1);
    cell.point = point_estimate(method, bundle, regime, bart_cols, spec, point_rng);
    if (spec.uncertainty == UncertaintyMode::none) return cell;

    const bool mi_requested = spec.uncertainty == UncertaintyMode::mi_mean ||
                              spec.uncertainty == UncertaintyMode::mi_draw;
    const bool posterior_draw = spec.uncertainty == UncertaintyMode::mi_draw;
    RngStream iv_rng = rng.substream(2);
    const Dataset& data = bundle.data;

    if (mi_requested &&
        (method == Method::pspp || method == Method::psbpp || method == Method::bartps)) {
        const Eigen::MatrixXd f = build_design(data.x, regime.mean_terms, false);
        if (method == Method::pspp) {
            cell.interval =
                mi_interval_pspp(data, build_design(data.x, regime.propensity_terms), f,
                                 spec.knot_count, spec.degree, spec.resamples, iv_rng);
        } else if (method == Method::psbpp) {
            cell.interval = mi_interval_psbpp(data, detail::select_columns(data.x, bart_cols),
                                              spec.bart, f, spec.knot_count, spec.degree,
                                              spec.resamples, posterior_draw, iv_rng);
        } else {
            cell.interval = mi_interval_bartps(data, detail::select_columns(data.x, bart_cols),
                                               spec.bart, spec.resamples, posterior_draw, iv_rng);
        }
        // Under multiple imputation the reported estimate is the Rubin pool.
        cell.point = cell.interval.point;
    } else {
        cell.interval = heitjan_bootstrap(
            bundle,
            [&](const SimBundle& resampled, RngStream& sub) {
                return point_estimate(method, resampled, regime, bart_cols, spec, sub);
            },
            spec.resamples, iv_rng);
    }
    cell.has_interval = true;
    return cell;
}

// Full grid over (method, regime) x replicates.  Replicates run in parallel;
// every replicate and cell draws from its own derived stream, so results do
// not depend on scheduling.  Failed cells are excluded and counted.
inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       const std::function<void(const std::string&)>& log = {}) {
    if (spec.replicates < 2) throw std::invalid_argument("run_experiment: replicates must be >= 2");
    const std::vector<int> bart_cols = scenario_bart_columns(spec.scenario);
    std::vector<Regime> regimes;
    for (RegimeTag tag : spec.regimes) regimes.push_back(regime_designs(spec.scenario, tag));

    using CellMap = std::map<std::string, CellResult>;
    std::vector<CellMap> per_replicate(spec.replicates);

    std::atomic<int> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        while (true) {
            const int rep = next.fetch_add(1);
            if (rep >= spec.replicates) return;
            RngStream base(spec.seed, static_cast<std::uint64_t>(rep) + 1);
            RngStream gen_rng = base.substream(0);
            const ScenarioDraw draw = generate_scenario(spec.scenario, spec.n, gen_rng);
            SimBundle bundle{draw.data, draw.y_full};
            CellMap& cells = per_replicate[rep];
            for (Method method : spec.methods) {
                for (const Regime& regime : regimes) {
                    const std::string key = detail::cell_key(method, regime);
                    if (cells.count(key)) continue;
                    RngStream cell_rng = base.substream(detail::fnv1a(key));
                    CellResult cell;
                    try {
                        cell = compute_cell(method, bundle, regime, bart_cols, spec, cell_rng);
                    } catch (const std::exception& e) {
                        cell.failed = true;
                        if (log) {
                            std::lock_guard lock(log_mutex);
                            log("replicate " + std::to_string(rep) + " seed " +
                                std::to_string(spec.seed) + " cell " + key + " failed: " + e.what());
                        }
                    }
                    cells.emplace(key, std::move(cell));
                }
            }
            if (log) {
                std::lock_guard lock(log_mutex);
                log("replicate " + std::to_string(rep + 1) + "/" +
                    std::to_string(spec.replicates) + " done");
            }
        }
    };

    const int jobs = std::max(1, spec.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Ordered reduce over replicates.
    ExperimentResult result;
    const double mu = scenario_true_mean(spec.scenario);
    for (Method method : spec.methods) {
        for (const Regime& regime : regimes) {
            const std::string key = detail::cell_key(method, regime);
            MetricsRow row;
            row.scenario = to_string(spec.scenario);
            row.regime = to_string(regime.tag);
            row.method = to_string(method);
            row.n = spec.n;
            row.replicates = spec.replicates;
            double sum = 0.0, sumsq = 0.0, covered = 0.0, length = 0.0;
            int ok = 0, with_iv = 0;
            for (int rep = 0; rep < spec.replicates; ++rep) {
                const CellResult& cell = per_replicate[rep].at(key);
                if (cell.failed) {
                    ++row.failures;
                    continue;
                }
                ++ok;
                sum += cell.point - mu;
                sumsq += (cell.point - mu) * (cell.point - mu);
                if (cell.has_interval) {
                    ++with_iv;
                    if (cell.interval.lower <= mu && mu <= cell.interval.upper) covered += 1.0;
                    length += cell.interval.length;
                }
            }
            if (ok > 0) {
                row.bias = sum / ok;
                row.rmse = std::sqrt(sumsq / ok);
            }
            if (with_iv > 0) {
                row.coverage = 100.0 * covered / with_iv;
                row.ail = length / with_iv;
            }
            if (row.failures > spec.failure_cap * spec.replicates) result.invalid = true;
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

}  // namespace robustsq
