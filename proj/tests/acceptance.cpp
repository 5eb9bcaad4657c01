// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "robustsq/bart.hpp"
#include "robustsq/estimators.hpp"
#include "robustsq/harness.hpp"
#include "robustsq/io.hpp"
#include "robustsq/scenarios.hpp"
#include "robustsq/spline.hpp"
#include "robustsq/uncertainty.hpp"

namespace {

int g_failures = 0;

void report(int criterion, const std::string& title, bool ok, const std::string& detail) {
    if (!ok) ++g_failures;
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, title.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int default_jobs() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

const robustsq::MetricsRow& find_row(const robustsq::ExperimentResult& result,
                                     const std::string& method, const std::string& regime) {
    for (const auto& row : result.rows)
        if (row.method == method && row.regime == regime) return row;
    throw std::logic_error("row not found: " + method + "/" + regime);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: deterministic estimator identities.
void criterion1() {
    std::string detail;
    bool ok = true;

    robustsq::Dataset hand;
    hand.y.resize(4);
    hand.y << 2, 4, 0, 0;
    hand.r.resize(4);
    hand.r << 1, 1, 0, 0;
    hand.x = Eigen::MatrixXd::Zero(4, 1);
    Eigen::VectorXd z(4), m(4);
    z << 0.5, 0.8, 0.5, 0.8;
    m << 1, 3, 5, 7;
    const double aipwt = robustsq::estimate_aipwt(hand, z, m).mu_hat;
    if (aipwt != 4.8125) {
        ok = false;
        detail += "aipwt=" + fmt(aipwt) + " (want 4.8125 exactly); ";
    }

    const auto rc = robustsq::rubin_combine({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
    if (rc.qbar != 2.0 || rc.total != 4.0 / 3.0) {
        ok = false;
        detail += "rubin total=" + fmt(rc.total) + " (want 4/3 exactly); ";
    }

    const std::vector<double> zz{0.0, 0.25, 0.5, 0.75, 1.0};
    const auto basis =
        robustsq::truncated_power_basis(zz, robustsq::SplineBasisSpec{1, {0.2, 0.6}});
    Eigen::MatrixXd want(5, 2);
    want << 0, 0, 0.05, 0, 0.3, 0, 0.55, 0.15, 0.8, 0.4;
    if ((basis.random - want).cwiseAbs().maxCoeff() > 1e-12) {
        ok = false;
        detail += "spline basis off by " + fmt((basis.random - want).cwiseAbs().maxCoeff()) + "; ";
    }
    report(1, "deterministic estimator identities", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 2: Monte Carlo scenario ground truth at 1e6 draws.
void criterion2() {
    const Eigen::Index n = 1'000'000;
    std::string detail;
    bool ok = true;
    const double targets[3] = {10.0, 10.0, 210.0};
    const robustsq::Scenario scenarios[3] = {robustsq::Scenario::linear,
                                             robustsq::Scenario::quadratic,
                                             robustsq::Scenario::ks};
    for (int s = 0; s < 3; ++s) {
        robustsq::RngStream rng(3, static_cast<std::uint64_t>(s));
        const double mc = robustsq::generate_scenario(scenarios[s], n, rng).y_full.mean();
        detail += robustsq::to_string(scenarios[s]) + "=" + fmt(mc) + " ";
        if (std::abs(mc - targets[s]) > 0.02) ok = false;
    }
    report(2, "scenario ground-truth means within 0.02 at 1e6 draws", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 3: non-BART table cells, linear scenario.
void criterion3() {
    // Point estimates are drawn from a stream independent of the uncertainty
    // mode, so the bias checks run without bootstrap; the coverage check
    // (AIPWT both-wrong) runs with the D=100 bootstrap.
    robustsq::ExperimentSpec bias_spec;
    bias_spec.scenario = robustsq::Scenario::linear;
    bias_spec.n = 1000;
    bias_spec.replicates = 200;
    bias_spec.methods = {robustsq::Method::cc, robustsq::Method::mlr, robustsq::Method::pspp};
    bias_spec.regimes = {robustsq::RegimeTag::mean_correct, robustsq::RegimeTag::both_wrong};
    bias_spec.uncertainty = robustsq::UncertaintyMode::none;
    bias_spec.seed = 301;
    bias_spec.jobs = default_jobs();
    const auto bias_run = robustsq::run_experiment(bias_spec);

    robustsq::ExperimentSpec cov_spec = bias_spec;
    cov_spec.methods = {robustsq::Method::aipwt};
    cov_spec.regimes = {robustsq::RegimeTag::both_wrong};
    cov_spec.uncertainty = robustsq::UncertaintyMode::bootstrap;
    cov_spec.resamples = 100;
    const auto cov_run = robustsq::run_experiment(cov_spec);

    const double cc = find_row(bias_run, "CC", "both-wrong").bias;
    const double mlr = find_row(bias_run, "MLR", "both-wrong").bias;
    const double pspp = find_row(bias_run, "PSPP", "mean-correct").bias;
    const auto& aipwt = find_row(cov_run, "AIPWT", "both-wrong");

    std::string detail = "cc_bias=" + fmt(cc) + " mlr_bias=" + fmt(mlr) +
                         " aipwt_bias=" + fmt(aipwt.bias) + " aipwt_cov=" + fmt(aipwt.coverage) +
                         " pspp_bias=" + fmt(pspp);
    const bool ok = std::abs(cc - 0.51) <= 0.05 && std::abs(mlr - 0.45) <= 0.08 &&
                    std::abs(aipwt.bias - 0.43) <= 0.08 && aipwt.coverage < 30.0 &&
                    std::abs(pspp) <= 0.05;
    report(3, "non-BART linear-scenario table cells", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 4: BART-family table cells at the desk preset.
void criterion4() {
    robustsq::ExperimentSpec spec;
    spec.scenario = robustsq::Scenario::linear;
    spec.n = 1000;
    spec.replicates = 100;
    spec.methods = {robustsq::Method::bartps, robustsq::Method::psbpp};
    spec.regimes = {robustsq::RegimeTag::both_wrong};
    spec.uncertainty = robustsq::UncertaintyMode::bootstrap;
    spec.resamples = 50;
    spec.bart = robustsq::BartConfig::desk();
    spec.seed = 401;
    spec.jobs = default_jobs();
    const auto lin = robustsq::run_experiment(spec);

    spec.scenario = robustsq::Scenario::quadratic;
    spec.methods = {robustsq::Method::psbpp};
    spec.seed = 402;
    const auto quad = robustsq::run_experiment(spec);

    const auto& bartps = find_row(lin, "BARTps", "both-wrong");
    const auto& psbpp = find_row(lin, "PSBPP", "both-wrong");
    const auto& psbpp_q = find_row(quad, "PSBPP", "both-wrong");

    std::string detail = "bartps_bias=" + fmt(bartps.bias) + " bartps_cov=" + fmt(bartps.coverage) +
                         " psbpp_bias=" + fmt(psbpp.bias) + " psbpp_cov=" + fmt(psbpp.coverage) +
                         " quad_psbpp_bias=" + fmt(psbpp_q.bias) +
                         " quad_psbpp_cov=" + fmt(psbpp_q.coverage);
    const bool ok = std::abs(bartps.bias - 0.07) <= 0.10 && bartps.coverage >= 88.0 &&
                    std::abs(psbpp.bias) <= 0.15 && psbpp.coverage >= 90.0 &&
                    std::abs(psbpp_q.bias - 0.13) <= 0.20 && psbpp_q.coverage >= 80.0;
    report(4, "BART-family table cells (desk preset)", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 5: Kang-Schafer stress property.
void criterion5() {
    robustsq::ExperimentSpec spec;
    spec.scenario = robustsq::Scenario::ks;
    spec.n = 1000;
    spec.replicates = 100;
    spec.methods = {robustsq::Method::aipwt, robustsq::Method::psbpp,
                    robustsq::Method::aipwt_bart};
    spec.regimes = {robustsq::RegimeTag::both_wrong};
    spec.uncertainty = robustsq::UncertaintyMode::none;
    spec.bart = robustsq::BartConfig::desk();
    spec.seed = 501;
    spec.jobs = default_jobs();
    const auto run = robustsq::run_experiment(spec);

    const double aipwt_rmse = find_row(run, "AIPWT", "both-wrong").rmse;
    const double psbpp_rmse = find_row(run, "PSBPP", "both-wrong").rmse;
    const double ab_bias = find_row(run, "AIPWT-BART", "both-wrong").bias;
    std::string detail = "aipwt_rmse=" + fmt(aipwt_rmse) + " psbpp_rmse=" + fmt(psbpp_rmse) +
                         " aipwt_bart_bias=" + fmt(ab_bias);
    const bool ok = aipwt_rmse >= 10.0 * psbpp_rmse && std::abs(ab_bias) <= 1.0;
    report(5, "Kang-Schafer stress property", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 6: double-robustness convergence.
void criterion6() {
    auto run_at = [](Eigen::Index n, std::uint64_t seed) {
        robustsq::ExperimentSpec spec;
        spec.scenario = robustsq::Scenario::linear;
        spec.n = n;
        spec.replicates = 100;
        spec.methods = {robustsq::Method::pspp, robustsq::Method::aipwt};
        spec.regimes = {robustsq::RegimeTag::prop_correct, robustsq::RegimeTag::mean_correct};
        spec.uncertainty = robustsq::UncertaintyMode::none;
        spec.seed = seed;
        spec.jobs = default_jobs();
        return robustsq::run_experiment(spec);
    };
    const auto small = run_at(500, 601);
    const auto large = run_at(5000, 602);

    bool ok = true;
    std::string detail;
    for (const char* method : {"PSPP", "AIPWT"}) {
        for (const char* regime : {"prop-correct", "mean-correct"}) {
            const double b_small = find_row(small, method, regime).bias;
            const double b_large = find_row(large, method, regime).bias;
            detail += std::string(method) + "/" + regime + ": " + fmt(b_small) + "->" +
                      fmt(b_large) + " ";
            if (!(std::abs(b_large) < std::abs(b_small)) || !(std::abs(b_large) < 0.1))
                ok = false;
        }
    }
    report(6, "double-robustness convergence (n=500 vs n=5000)", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 7: BART engine sanity suite.

// Tiny-instance enumeration oracle.  Covariate takes values {0,1,2,3}, five
// rows each; two trees, depth cap 2, minimum node size 5.  Every reachable
// tree structure is one of 11 partitions of the value groups.  The sampler's
// stationary law over a structure T is
//   P(T) proportional to  prod_internal [alpha (1+d)^-beta / C_node]
//                       * prod_leaf [1 - alpha (1+d)^-beta]
//                       * N(ys; 0, sigma^2 I + tau^2 sum_k B_k B_k')
// where C_node is the number of distinct covariate values at the node (the
// uniform split-rule mass that cancels against the proposal) and B_k is the
// leaf-membership matrix of tree k.
struct TinyStructure {
    int root_cut;  // 0 = root is a leaf
    int left_cut;  // 0 = leaf; only set when root_cut > 0
    int right_cut;
};

std::vector<TinyStructure> tiny_structures() {
    return {{0, 0, 0},  {1, 0, 0}, {1, 0, 2}, {1, 0, 3}, {2, 0, 0}, {2, 1, 0},
            {2, 0, 3},  {2, 1, 3}, {3, 0, 0}, {3, 1, 0}, {3, 2, 0}};
}

int tiny_depth(const TinyStructure& s) {
    if (s.root_cut == 0) return 0;
    return (s.left_cut > 0 || s.right_cut > 0) ? 2 : 1;
}

// Partition of the four value groups into leaves.
std::vector<std::vector<int>> tiny_partition(const TinyStructure& s) {
    if (s.root_cut == 0) return {{0, 1, 2, 3}};
    std::vector<int> left, right;
    for (int v : {0, 1, 2, 3}) (v < s.root_cut ? left : right).push_back(v);
    std::vector<std::vector<int>> out;
    const auto split = [&out](const std::vector<int>& side, int cut) {
        if (cut == 0) {
            out.push_back(side);
            return;
        }
        std::vector<int> a, b;
        for (int v : side) (v < cut ? a : b).push_back(v);
        out.push_back(a);
        out.push_back(b);
    };
    split(left, s.left_cut);
    split(right, s.right_cut);
    return out;
}

double tiny_log_prior(const TinyStructure& s, double alpha, double beta) {
    const auto p_split = [&](int d) { return alpha * std::pow(1.0 + d, -beta); };
    if (s.root_cut == 0) return std::log(1.0 - p_split(0));
    double lp = std::log(p_split(0)) - std::log(4.0);  // 4 distinct root values
    const auto side = [&](int cut, int distinct) {
        if (cut == 0) {
            lp += std::log(1.0 - p_split(1));
        } else {
            lp += std::log(p_split(1)) - std::log(static_cast<double>(distinct)) +
                  2.0 * std::log(1.0 - p_split(2));
        }
    };
    side(s.left_cut, s.root_cut);        // left side holds root_cut distinct values
    side(s.right_cut, 4 - s.root_cut);
    return lp;
}

bool tiny_enumeration_check(std::string& detail) {
    const int groups = 4, per_group = 5, n = groups * per_group;
    robustsq::BartConfig cfg;
    cfg.num_trees = 2;
    cfg.burn_in = 2000;
    cfg.num_draws = 40000;
    cfg.max_depth = 2;
    cfg.min_node_size = 5;
    cfg.fixed_sigma = 0.25;  // model (scaled-outcome) sigma
    cfg.keep_forests = true;

    Eigen::MatrixXd x(n, 1);
    Eigen::VectorXd y(n);
    robustsq::RngStream data_rng(7070, 0);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = i / per_group;
        y[i] = data_rng.standard_normal();
    }

    robustsq::RngStream rng(7071, 0);
    const auto post = robustsq::backfit_continuous(x, y, cfg, rng);

    // outcome on the model scale, exactly as the sampler sees it
    const Eigen::VectorXd ys = (y.array() - post.y_center) / post.y_range;
    const double tau = 0.5 / (cfg.k * std::sqrt(static_cast<double>(cfg.num_trees)));
    const double sigma = cfg.fixed_sigma;

    const auto structures = tiny_structures();
    const int ns = static_cast<int>(structures.size());
    std::vector<double> lp(ns);
    std::vector<Eigen::MatrixXd> bb(ns);  // tau^2 B B' contribution per structure
    for (int s = 0; s < ns; ++s) {
        lp[s] = tiny_log_prior(structures[s], cfg.alpha, cfg.beta);
        Eigen::MatrixXd contrib = Eigen::MatrixXd::Zero(n, n);
        for (const auto& leaf : tiny_partition(structures[s])) {
            Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < n; ++i)
                if (std::find(leaf.begin(), leaf.end(), i / per_group) != leaf.end()) ind[i] = 1.0;
            contrib += tau * tau * ind * ind.transpose();
        }
        bb[s] = contrib;
    }

    // joint law over ordered structure pairs, folded to max-depth pairs
    double probs[3][3] = {};
    std::vector<double> logw;
    std::vector<std::pair<int, int>> depth_of;
    logw.reserve(ns * ns);
    for (int a = 0; a < ns; ++a) {
        for (int b = 0; b < ns; ++b) {
            Eigen::MatrixXd cov = bb[a] + bb[b];
            cov.diagonal().array() += sigma * sigma;
            const Eigen::LLT<Eigen::MatrixXd> llt(cov);
            const Eigen::VectorXd sol = llt.solve(ys);
            double logdet = 0.0;
            for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
            logw.push_back(lp[a] + lp[b] - 0.5 * (logdet + ys.dot(sol)));
            depth_of.emplace_back(tiny_depth(structures[a]), tiny_depth(structures[b]));
        }
    }
    const double wmax = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    for (double& w : logw) {
        w = std::exp(w - wmax);
        total += w;
    }
    for (std::size_t i = 0; i < logw.size(); ++i)
        probs[depth_of[i].first][depth_of[i].second] += logw[i] / total;

    // observed depth-pair frequencies, thinned
    const int thin = 10;
    double counts[3][3] = {};
    int kept = 0;
    for (std::size_t d = 0; d < post.draws.size(); d += thin) {
        const int d1 = post.draws[d].trees[0].max_leaf_depth();
        const int d2 = post.draws[d].trees[1].max_leaf_depth();
        if (d1 > 2 || d2 > 2) return false;  // outside the enumerated space
        counts[d1][d2] += 1.0;
        ++kept;
    }

    double stat = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double expected = probs[a][b] * kept;
            stat += (counts[a][b] - expected) * (counts[a][b] - expected) / expected;
        }
    const double pvalue = 1.0 - robustsq::chisq_cdf(stat, 8.0);
    detail += "chi2=" + fmt(stat) + " p=" + fmt(pvalue) + "; ";
    return pvalue > 0.001;
}

void criterion7() {
    std::string detail;
    bool ok = true;

    // step-function recovery
    {
        robustsq::RngStream rng(701, 0);
        const int n = 400;
        Eigen::MatrixXd x(n, 1);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            x(i, 0) = -1.0 + 2.0 * (i + 0.5) / n;
            y[i] = (x(i, 0) > 0.0 ? 3.0 : 0.0) + rng.normal(0.0, 0.09);
        }
        robustsq::BartConfig cfg = robustsq::BartConfig::desk();
        cfg.keep_forests = false;
        const auto post = robustsq::backfit_continuous(x, y, cfg, rng);
        const Eigen::VectorXd fit = post.train_mean();
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            if (std::abs(x(i, 0)) < 0.2) continue;  // skip the jump neighborhood
            worst = std::max(worst, std::abs(fit[i] - (x(i, 0) > 0.0 ? 3.0 : 0.0)));
        }
        detail += "step_err=" + fmt(worst) + "; ";
        if (worst > 0.5) ok = false;
    }

    // sigma posterior median
    {
        robustsq::RngStream rng(702, 0);
        const int n = 500;
        Eigen::MatrixXd x(n, 1);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            x(i, 0) = rng.uniform();
            y[i] = 2.0 * x(i, 0) + rng.normal(0.0, 4.0);  // true sigma = 2
        }
        robustsq::BartConfig cfg = robustsq::BartConfig::desk();
        cfg.burn_in = 200;
        cfg.num_draws = 500;
        cfg.keep_forests = false;
        auto post = robustsq::backfit_continuous(x, y, cfg, rng);
        std::sort(post.sigma_trace.begin(), post.sigma_trace.end());
        const double med = post.sigma_trace[post.sigma_trace.size() / 2];
        detail += "sigma_med=" + fmt(med) + "; ";
        if (med < 1.7 || med > 2.3) ok = false;
    }

    // probit null (discrete covariate levels bound the partition resolution)
    {
        robustsq::RngStream rng(703, 0);
        const int n = 2000;
        Eigen::MatrixXd x(n, 1);
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) {
            x(i, 0) = static_cast<double>(i % 4);
            r[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
        robustsq::BartConfig cfg = robustsq::BartConfig::desk();
        cfg.keep_forests = false;
        const auto post = robustsq::backfit_probit(x, r, cfg, rng);
        const Eigen::VectorXd p = post.train_mean();
        detail += "probit_range=[" + fmt(p.minCoeff()) + "," + fmt(p.maxCoeff()) + "]; ";
        if (p.minCoeff() < 0.45 || p.maxCoeff() > 0.55) ok = false;
    }

    if (!tiny_enumeration_check(detail)) ok = false;
    report(7, "BART engine sanity suite", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 8: posterior-draw MI does not beat posterior-mean MI on bias.
void criterion8() {
    const int reps = 100, imputations = 50;
    double bias_mean = 0.0, bias_draw = 0.0;
    const auto regime =
        robustsq::regime_designs(robustsq::Scenario::linear, robustsq::RegimeTag::both_wrong);
    const robustsq::BartConfig cfg = robustsq::BartConfig::desk();
    for (int rep = 0; rep < reps; ++rep) {
        robustsq::RngStream base(801, static_cast<std::uint64_t>(rep) + 1);
        robustsq::RngStream gen = base.substream(0);
        const auto draw = robustsq::gen_linear(1000, gen);
        const Eigen::MatrixXd f = robustsq::build_design(draw.data.x, regime.mean_terms, false);
        // paired seeds: both modes start from identical streams
        robustsq::RngStream rng_mean = base.substream(1);
        robustsq::RngStream rng_draw = base.substream(1);
        bias_mean += robustsq::mi_interval_psbpp(draw.data, draw.data.x, cfg, f, 20, 1,
                                                 imputations, false, rng_mean)
                         .point -
                     10.0;
        bias_draw += robustsq::mi_interval_psbpp(draw.data, draw.data.x, cfg, f, 20, 1,
                                                 imputations, true, rng_draw)
                         .point -
                     10.0;
    }
    bias_mean /= reps;
    bias_draw /= reps;
    const std::string detail = "mi_mean_bias=" + fmt(bias_mean) + " mi_draw_bias=" + fmt(bias_draw);
    report(8, "posterior-draw MI bias >= posterior-mean MI bias",
           std::abs(bias_draw) >= std::abs(bias_mean), detail);
}

// ---------------------------------------------------------------------------
// Criterion 9: byte-identical reruns.
void criterion9() {
    robustsq::ExperimentSpec spec;
    spec.scenario = robustsq::Scenario::linear;
    spec.n = 200;
    spec.replicates = 3;
    spec.methods = {robustsq::Method::cc, robustsq::Method::aipwt, robustsq::Method::bart};
    spec.regimes = {robustsq::RegimeTag::both_correct, robustsq::RegimeTag::both_wrong};
    spec.uncertainty = robustsq::UncertaintyMode::bootstrap;
    spec.resamples = 5;
    spec.bart.num_trees = 10;
    spec.bart.burn_in = 20;
    spec.bart.num_draws = 20;
    spec.seed = 901;
    spec.jobs = default_jobs();

    const auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    std::string first_csv, first_json;
    bool ok = true;
    for (int run = 0; run < 2; ++run) {
        const auto result = robustsq::run_experiment(spec);
        robustsq::emit_results(result.rows, "csv", "acceptance_rerun.csv");
        robustsq::emit_results(result.rows, "json", "acceptance_rerun.json");
        const std::string csv = slurp("acceptance_rerun.csv");
        const std::string json = slurp("acceptance_rerun.json");
        if (run == 0) {
            first_csv = csv;
            first_json = json;
        } else if (csv != first_csv || json != first_json) {
            ok = false;
        }
    }
    std::remove("acceptance_rerun.csv");
    std::remove("acceptance_rerun.json");
    report(9, "same-seed reruns are byte-identical", ok, "");
}

void run(int index, void (*fn)(), const char* title) {
    Stopwatch watch;
    try {
        fn();
    } catch (const std::exception& e) {
        report(index, title, false, std::string("exception: ") + e.what());
    }
    std::fprintf(stderr, "[acceptance] criterion %d finished in %.1fs\n", index, watch.seconds());
}

}  // namespace

int main() {
    run(1, criterion1, "deterministic estimator identities");
    run(2, criterion2, "scenario ground-truth means within 0.02 at 1e6 draws");
    run(3, criterion3, "non-BART linear-scenario table cells");
    run(4, criterion4, "BART-family table cells (desk preset)");
    run(5, criterion5, "Kang-Schafer stress property");
    run(6, criterion6, "double-robustness convergence (n=500 vs n=5000)");
    run(7, criterion7, "BART engine sanity suite");
    run(8, criterion8, "posterior-draw MI bias >= posterior-mean MI bias");
    run(9, criterion9, "byte-identical reruns");
    std::printf("%s: %d of 9 criteria passed\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                9 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
