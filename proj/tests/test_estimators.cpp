#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "robustsq/estimators.hpp"
#include "robustsq/rng.hpp"

using robustsq::BartConfig;
using robustsq::Dataset;
using robustsq::PropensityMode;
using robustsq::RngStream;
using robustsq::Term;

namespace {

BartConfig tiny_bart() {
    BartConfig cfg;
    cfg.num_trees = 30;
    cfg.burn_in = 50;
    cfg.num_draws = 100;
    return cfg;
}

Dataset synthetic_mar(int n, RngStream& rng) {
    Dataset data;
    data.y.resize(n);
    data.r.resize(n);
    data.x.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        data.x(i, 0) = rng.standard_normal();
        data.x(i, 1) = rng.standard_normal();
        const double p = robustsq::expit(0.5 + 0.7 * data.x(i, 0));
        data.r[i] = rng.bernoulli(p) ? 1.0 : 0.0;
        const double y = 3.0 + data.x(i, 0) + 0.5 * data.x(i, 1) + rng.normal(0.0, 1.0);
        data.y[i] = data.r[i] == 1.0 ? y : 0.0;
    }
    return data;
}

}  // namespace

TEST_CASE("complete-case mean: arithmetic and no-missingness reductions") {
    Dataset data;
    data.y.resize(4);
    data.y << 1, 2, 3, 4;
    data.r.resize(4);
    data.r << 1, 1, 0, 0;
    data.x = Eigen::MatrixXd::Zero(4, 1);
    REQUIRE(robustsq::estimate_cc(data).mu_hat == Catch::Approx(1.5).margin(1e-15));
    data.r.setOnes();
    REQUIRE(robustsq::estimate_cc(data).mu_hat == Catch::Approx(2.5).margin(1e-15));
}

TEST_CASE("MLR imputation on an exact line completes to 2.5") {
    Dataset data;
    data.y.resize(4);
    data.y << 1, 2, 0, 0;
    data.r.resize(4);
    data.r << 1, 1, 0, 0;
    data.x.resize(4, 1);
    data.x << 0, 1, 2, 3;
    const auto design = robustsq::build_design(data.x, {{0}});
    const auto est = robustsq::impute_mlr(data, design);
    REQUIRE(est.imputed_y[2] == Catch::Approx(3.0).margin(1e-10));
    REQUIRE(est.imputed_y[3] == Catch::Approx(4.0).margin(1e-10));
    REQUIRE(est.mu_hat == Catch::Approx(2.5).margin(1e-10));
    // observed entries never change
    REQUIRE(est.imputed_y[0] == 1.0);
    REQUIRE(est.imputed_y[1] == 2.0);
}

TEST_CASE("AIPWT trivial reductions and the hand case 4.8125") {
    Dataset data;
    data.y.resize(3);
    data.y << 1, 2, 6;
    data.r = Eigen::VectorXd::Ones(3);
    data.x = Eigen::MatrixXd::Zero(3, 1);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(3);
    REQUIRE(robustsq::estimate_aipwt(data, ones, Eigen::VectorXd::Zero(3)).mu_hat ==
            Catch::Approx(3.0).margin(1e-15));

    // oracle mean model: residual term vanishes regardless of z
    Eigen::VectorXd z(3);
    z << 0.2, 0.9, 0.4;
    REQUIRE(robustsq::estimate_aipwt(data, z, data.y).mu_hat ==
            Catch::Approx(data.y.mean()).margin(1e-12));

    Dataset hand;
    hand.y.resize(4);
    hand.y << 2, 4, 0, 0;
    hand.r.resize(4);
    hand.r << 1, 1, 0, 0;
    hand.x = Eigen::MatrixXd::Zero(4, 1);
    Eigen::VectorXd zh(4), mh(4);
    zh << 0.5, 0.8, 0.5, 0.8;
    mh << 1, 3, 5, 7;
    REQUIRE(robustsq::estimate_aipwt(hand, zh, mh).mu_hat == 4.8125);

    zh[0] = 0.0;  // zero propensity on an observed row
    REQUIRE_THROWS_AS(robustsq::estimate_aipwt(hand, zh, mh), std::domain_error);
}

TEST_CASE("PSPP with degenerate scores falls back to the covariate design") {
    RngStream rng(301, 0);
    Dataset data;
    const int n = 80;
    data.y.resize(n);
    data.r.resize(n);
    data.x.resize(n, 1);
    for (int i = 0; i < n; ++i) {
        data.x(i, 0) = rng.uniform(-1.0, 1.0);
        data.r[i] = i % 4 == 0 ? 0.0 : 1.0;
        data.y[i] = data.r[i] == 1.0 ? 1.0 + 2.0 * data.x(i, 0) + rng.normal(0.0, 0.04) : 0.0;
    }
    const Eigen::VectorXd z = Eigen::VectorXd::Constant(n, 0.75);
    const Eigen::MatrixXd f = robustsq::build_design(data.x, {{0}}, false);
    const auto pspp = robustsq::fit_pspp(data, z, f);
    const auto mlr = robustsq::impute_mlr(data, robustsq::build_design(data.x, {{0}}));
    REQUIRE(pspp.mu_hat == Catch::Approx(mlr.mu_hat).margin(1e-6));
}

TEST_CASE("PSPP with a correct f and pure-noise scores tracks MLR") {
    RngStream rng(302, 0);
    Dataset data = synthetic_mar(600, rng);
    Eigen::VectorXd z(600);
    for (int i = 0; i < 600; ++i) z[i] = rng.uniform(0.05, 0.95);  // unrelated to anything
    const Eigen::MatrixXd f = robustsq::build_design(data.x, {{0}, {1}}, false);
    const auto pspp = robustsq::fit_pspp(data, z, f);
    const auto mlr = robustsq::impute_mlr(data, robustsq::build_design(data.x, {{0}, {1}}));
    REQUIRE(std::abs(pspp.mu_hat - mlr.mu_hat) < 0.05);
}

TEST_CASE("PSPP spline-only on the true propensity is nearly unbiased") {
    // Balancing-property check: spline on the true score with no f term.
    RngStream rng(303, 0);
    const int reps = 30, n = 1500;
    double bias = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        RngStream sub = rng.substream(rep);
        Dataset data;
        data.y.resize(n);
        data.r.resize(n);
        data.x.resize(n, 1);
        Eigen::VectorXd z(n);
        double truth = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = sub.standard_normal();
            data.x(i, 0) = x;
            z[i] = robustsq::expit(0.3 + x);
            const double y = 5.0 + 2.0 * x + sub.normal(0.0, 1.0);
            truth += y / n;
            data.r[i] = sub.bernoulli(z[i]) ? 1.0 : 0.0;
            data.y[i] = data.r[i] == 1.0 ? y : 0.0;
        }
        const Eigen::MatrixXd f(n, 0);
        bias += (robustsq::fit_pspp(data, z, f).mu_hat - truth) / reps;
    }
    REQUIRE(std::abs(bias) < 0.08);
}

TEST_CASE("PSBPP under a flat response mechanism behaves like MLR") {
    RngStream rng(304, 0);
    const int n = 1000;
    Dataset data;
    data.y.resize(n);
    data.r.resize(n);
    data.x.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        data.x(i, 0) = rng.standard_normal();
        data.x(i, 1) = rng.standard_normal();
        data.r[i] = rng.bernoulli(0.7) ? 1.0 : 0.0;  // independent of x
        const double y = 2.0 + data.x(i, 0) + data.x(i, 1) + rng.normal(0.0, 1.0);
        data.y[i] = data.r[i] == 1.0 ? y : 0.0;
    }
    const Eigen::MatrixXd f = robustsq::build_design(data.x, {{0}, {1}}, false);
    RngStream bart_rng(304, 1);
    const auto psbpp = robustsq::estimate_psbpp(data, data.x, tiny_bart(), f, 20, 1,
                                                PropensityMode::mean(), bart_rng);
    const auto mlr = robustsq::impute_mlr(data, robustsq::build_design(data.x, {{0}, {1}}));
    REQUIRE(std::abs(psbpp.mu_hat - mlr.mu_hat) < 0.1);
}

TEST_CASE("AIPWT residual form with oracle mean model ignores the weights") {
    // The r = 1 rows contribute (y - mhat)/z + mhat; with mhat = y the
    // propensities drop out entirely, the basis of the no-missingness
    // reduction for the BART-backed variant as well.
    RngStream rng(305, 0);
    const int n = 200;
    Dataset data;
    data.y.resize(n);
    data.r = Eigen::VectorXd::Ones(n);
    data.x.resize(n, 1);
    for (int i = 0; i < n; ++i) {
        data.x(i, 0) = rng.standard_normal();
        data.y[i] = 4.0 + data.x(i, 0) + rng.normal(0.0, 1.0);
    }
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = rng.uniform(0.1, 0.9);
    const auto est = robustsq::estimate_aipwt(data, z, data.y);
    REQUIRE(est.mu_hat == Catch::Approx(data.y.mean()).margin(1e-12));
}

TEST_CASE("AIPWT with BART nuisance models is close to truth on smooth data") {
    RngStream rng(313, 0);
    Dataset data = synthetic_mar(800, rng);
    RngStream bart_rng(313, 1);
    const auto est = robustsq::estimate_aipwt_bart(data, data.x, tiny_bart(), bart_rng);
    REQUIRE(std::abs(est.mu_hat - 3.0) < 0.4);  // E[y] = 3 in synthetic_mar
}

TEST_CASE("direct BART imputation on a constant outcome returns the constant") {
    RngStream rng(306, 0);
    const int n = 150;
    Dataset data;
    data.y = Eigen::VectorXd::Constant(n, 3.0);
    data.r = Eigen::VectorXd::Ones(n);
    data.x.resize(n, 1);
    for (int i = 0; i < n; ++i) data.x(i, 0) = rng.standard_normal();
    for (int i = 0; i < n; i += 5) {
        data.r[i] = 0.0;
        data.y[i] = 0.0;
    }
    RngStream bart_rng(306, 1);
    const auto est = robustsq::estimate_bart_direct(data, data.x, tiny_bart(), bart_rng);
    REQUIRE(std::abs(est.mu_hat - 3.0) < 0.01);
    for (int i = 0; i < n; ++i)
        if (data.r[i] == 1.0) REQUIRE(est.imputed_y[i] == 3.0);
}

TEST_CASE("BARTps stays close to direct BART when the propensity is flat") {
    RngStream rng(307, 0);
    Dataset data;
    const int n = 600;
    data.y.resize(n);
    data.r.resize(n);
    data.x.resize(n, 1);
    for (int i = 0; i < n; ++i) {
        data.x(i, 0) = rng.uniform(-1.0, 1.0);
        data.r[i] = rng.bernoulli(0.7) ? 1.0 : 0.0;
        const double y = 1.0 + 2.0 * data.x(i, 0) + rng.normal(0.0, 0.25);
        data.y[i] = data.r[i] == 1.0 ? y : 0.0;
    }
    RngStream r1(307, 1), r2(307, 2);
    const auto direct = robustsq::estimate_bart_direct(data, data.x, tiny_bart(), r1);
    const auto ps = robustsq::estimate_bartps(data, data.x, tiny_bart(),
                                              PropensityMode::mean(), r2);
    REQUIRE(std::abs(ps.mu_hat - direct.mu_hat) < 0.05);
}

TEST_CASE("location equivariance of the non-BART estimators") {
    RngStream rng(308, 0);
    Dataset data = synthetic_mar(500, rng);
    Dataset shifted = data;
    const double c = 17.0;
    for (int i = 0; i < 500; ++i)
        if (shifted.r[i] == 1.0) shifted.y[i] += c;

    const auto design = robustsq::build_design(data.x, {{0}, {1}});
    const auto f = robustsq::build_design(data.x, {{0}, {1}}, false);
    const Eigen::VectorXd z =
        robustsq::logistic_fit(design, data.r).probabilities(design);

    REQUIRE(robustsq::estimate_cc(shifted).mu_hat ==
            Catch::Approx(robustsq::estimate_cc(data).mu_hat + c).margin(1e-9));
    REQUIRE(robustsq::impute_mlr(shifted, design).mu_hat ==
            Catch::Approx(robustsq::impute_mlr(data, design).mu_hat + c).margin(1e-9));
    const Eigen::VectorXd mhat_a = robustsq::impute_mlr(data, design).imputed_y;
    const Eigen::VectorXd mhat_b = robustsq::impute_mlr(shifted, design).imputed_y;
    REQUIRE(robustsq::estimate_aipwt(shifted, z, mhat_b).mu_hat ==
            Catch::Approx(robustsq::estimate_aipwt(data, z, mhat_a).mu_hat + c).margin(1e-9));
    REQUIRE(robustsq::fit_pspp(shifted, z, f).mu_hat ==
            Catch::Approx(robustsq::fit_pspp(data, z, f).mu_hat + c).margin(1e-8));
}

TEST_CASE("location equivariance of the BART estimators at a fixed seed") {
    RngStream rng(309, 0);
    Dataset data = synthetic_mar(300, rng);
    Dataset shifted = data;
    const double c = 50.0;
    for (int i = 0; i < 300; ++i)
        if (shifted.r[i] == 1.0) shifted.y[i] += c;
    RngStream r1(309, 1), r2(309, 1);
    const auto a = robustsq::estimate_bart_direct(data, data.x, tiny_bart(), r1);
    const auto b = robustsq::estimate_bart_direct(shifted, shifted.x, tiny_bart(), r2);
    REQUIRE(b.mu_hat == Catch::Approx(a.mu_hat + c).margin(1e-8));
}

TEST_CASE("two-part pipeline: all-zero observed outcomes give zero") {
    Dataset data;
    data.y = Eigen::VectorXd::Zero(20);
    data.r = Eigen::VectorXd::Ones(20);
    for (int i = 0; i < 20; i += 3) data.r[i] = 0.0;
    data.x = Eigen::MatrixXd::Random(20, 1);
    RngStream rng(310, 0);
    const auto est = robustsq::two_part_boxcox_pipeline(data, robustsq::PipelineMethod::pspp,
                                                        tiny_bart(), rng);
    REQUIRE(est.mu_hat == 0.0);
    for (int i = 0; i < 20; ++i) REQUIRE(est.imputed_y[i] == 0.0);
}

TEST_CASE("two-part pipeline rejects negative observed outcomes") {
    Dataset data;
    data.y.resize(10);
    data.y.setConstant(1.0);
    data.y[3] = -0.5;
    data.r = Eigen::VectorXd::Ones(10);
    data.x = Eigen::MatrixXd::Random(10, 1);
    RngStream rng(311, 0);
    REQUIRE_THROWS_AS(robustsq::two_part_boxcox_pipeline(data, robustsq::PipelineMethod::pspp,
                                                         tiny_bart(), rng),
                      std::domain_error);
}

TEST_CASE("two-part pipeline recovers a zero-inflated log-normal mean") {
    RngStream rng(312, 0);
    const int reps = 50, n = 300;
    double rel_err_sum = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        RngStream sub = rng.substream(rep);
        Dataset data;
        data.y.resize(n);
        data.r.resize(n);
        data.x.resize(n, 1);
        double full_mean = 0.0;
        for (int i = 0; i < n; ++i) {
            data.x(i, 0) = sub.standard_normal();
            const bool zero = sub.bernoulli(robustsq::expit(-1.0 - data.x(i, 0)));
            const double y = zero ? 0.0 : std::exp(1.0 + 0.5 * data.x(i, 0) +
                                                   sub.normal(0.0, 0.25));
            full_mean += y / n;
            data.r[i] = sub.bernoulli(0.7) ? 1.0 : 0.0;  // MCAR 30%
            data.y[i] = data.r[i] == 1.0 ? y : 0.0;
        }
        const auto est = robustsq::two_part_boxcox_pipeline(
            data, robustsq::PipelineMethod::pspp, tiny_bart(), sub);
        rel_err_sum += std::abs(est.mu_hat - full_mean) / full_mean;
    }
    REQUIRE(rel_err_sum / reps < 0.10);
}
