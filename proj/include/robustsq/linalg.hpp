// Deterministic fitted models: OLS, logistic regression via IRLS,
// REML-penalized mixed-model regression, and the Box-Cox transform.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "robustsq/stats.hpp"

namespace robustsq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct LinearFit {
    Vector coefficients;       // intercept first when the design carries one
    double residual_variance;  // SSR / (n - p), 0 when n == p

    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
        return x.dot(coefficients);
    }
    Vector predict(const Matrix& x) const { return x * coefficients; }
};

// Least squares through a rank-revealing QR; rank deficiency is an error that
// names the offending column rather than a silent pseudo-inverse fallback.
inline LinearFit ols_fit(const Matrix& design, const Vector& y) {
    if (design.rows() != y.size())
        throw std::invalid_argument("ols_fit: design rows != len(y)");
    if (design.rows() < design.cols())
        throw std::invalid_argument("ols_fit: fewer rows than columns");
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.cols()) {
        // Columns permuted past the numerical rank are the collinear ones.
        const auto perm = qr.colsPermutation().indices();
        const int bad = perm[qr.rank()];
        throw std::invalid_argument("ols_fit: design is rank deficient; column " +
                                    std::to_string(bad) + " is collinear with earlier columns");
    }
    LinearFit fit;
    fit.coefficients = qr.solve(y);
    const Vector resid = y - design * fit.coefficients;
    const auto dof = design.rows() - design.cols();
    fit.residual_variance = dof > 0 ? resid.squaredNorm() / static_cast<double>(dof) : 0.0;
    return fit;
}

struct LogisticFit {
    Vector coefficients;
    bool converged = false;
    int iterations = 0;

    double probability_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
        return expit(x.dot(coefficients));
    }
    Vector probabilities(const Matrix& x) const {
        Vector eta = x * coefficients;
        for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = expit(eta[i]);
        return eta;
    }
};

// Logistic MLE via iteratively reweighted least squares.  Separation is an
// error (coefficient norm blowing past 30), never a silently diverged fit.
inline LogisticFit logistic_fit(const Matrix& design, const Vector& r,
                                int max_iter = 100, double tol = 1e-8) {
    const auto n = design.rows();
    if (n != r.size()) throw std::invalid_argument("logistic_fit: design rows != len(r)");
    bool any0 = false, any1 = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (r[i] == 0.0) any0 = true;
        else if (r[i] == 1.0) any1 = true;
        else throw std::invalid_argument("logistic_fit: response must be 0/1");
    }
    if (!any0 || !any1)
        throw std::invalid_argument("logistic_fit: both response classes must be present");

    LogisticFit fit;
    fit.coefficients = Vector::Zero(design.cols());
    for (int it = 0; it < max_iter; ++it) {
        Vector p = fit.probabilities(design);
        Vector w = p.array() * (1.0 - p.array());
        Matrix xtwx = design.transpose() * w.asDiagonal() * design;
        // numeric jitter, not a prior
        xtwx.diagonal().array() += 1e-10;
        const Vector grad = design.transpose() * (r - p);
        const Vector step = xtwx.ldlt().solve(grad);
        fit.coefficients += step;
        fit.iterations = it + 1;
        if (fit.coefficients.norm() > 30.0)
            throw std::runtime_error(
                "logistic_fit: separation detected (coefficient norm > 30); "
                "consider regularizing or simplifying the design");
        if (step.cwiseAbs().maxCoeff() < tol) {
            fit.converged = true;
            break;
        }
    }
    if (!fit.converged)
        throw std::runtime_error("logistic_fit: IRLS did not converge in 100 iterations");
    return fit;
}

struct MixedModelFit {
    Vector fixed_coefficients;
    Vector random_coefficients;
    double lambda = 0.0;             // ridge penalty is lambda^2 * diag(0, I)
    double residual_variance = 0.0;  // sigma^2
    double random_variance = 0.0;    // sigma_u^2

    Vector predict(const Matrix& fixed, const Matrix& random) const {
        return fixed * fixed_coefficients + random * random_coefficients;
    }
};

namespace detail {

// Penalized normal equations at a given penalty lambda (on the random block).
inline void ridge_solve(const Matrix& fixed, const Matrix& random, const Vector& y,
                        double lambda, MixedModelFit& out) {
    const Eigen::Index p = fixed.cols(), q = random.cols();
    Matrix c(y.size(), p + q);
    c << fixed, random;
    Matrix ctc = c.transpose() * c;
    for (Eigen::Index j = p; j < p + q; ++j) ctc(j, j) += lambda * lambda;
    const Vector delta = ctc.ldlt().solve(c.transpose() * y);
    out.fixed_coefficients = delta.head(p);
    out.random_coefficients = delta.tail(q);
}

// REML log-likelihood in kappa = sigma_u^2 / sigma^2, reduced to q x q and
// p x p cross-products so large n stays cheap.
struct RemlWorkspace {
    Matrix xtx, xtz, ztz;
    Vector xty, zty;
    double yty = 0.0;
    Eigen::Index n = 0, p = 0, q = 0;

    RemlWorkspace(const Matrix& x, const Matrix& z, const Vector& y)
        : xtx(x.transpose() * x), xtz(x.transpose() * z), ztz(z.transpose() * z),
          xty(x.transpose() * y), zty(z.transpose() * y), yty(y.squaredNorm()),
          n(x.rows()), p(x.cols()), q(z.cols()) {}

    // Returns (loglik, y'Py) at kappa.
    std::pair<double, double> loglik(double kappa) const {
        Matrix a = Matrix::Identity(q, q) + kappa * ztz;
        Eigen::LLT<Matrix> llt_a(a);
        if (llt_a.info() != Eigen::Success) return {-std::numeric_limits<double>::infinity(), 0.0};
        double logdet_a = 0.0;
        for (Eigen::Index i = 0; i < q; ++i) logdet_a += 2.0 * std::log(llt_a.matrixL()(i, i));

        const Matrix ainv_ztx = llt_a.solve(xtz.transpose());
        const Vector ainv_zty = llt_a.solve(zty);
        Matrix xvx = xtx - kappa * xtz * ainv_ztx;
        const Vector xvy = xty - kappa * xtz * ainv_zty;
        const double yvy = yty - kappa * zty.dot(ainv_zty);

        Eigen::LDLT<Matrix> ldlt_x(xvx);
        const Vector beta = ldlt_x.solve(xvy);
        double logdet_x = 0.0;
        for (Eigen::Index i = 0; i < p; ++i) {
            const double d = ldlt_x.vectorD()(i);
            if (d <= 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
            logdet_x += std::log(d);
        }
        double ypy = yvy - xvy.dot(beta);
        if (ypy <= 0.0) ypy = std::numeric_limits<double>::min();
        const double ll = -0.5 * (logdet_a + logdet_x +
                                  static_cast<double>(n - p) * std::log(ypy));
        return {ll, ypy};
    }
};

}  // namespace detail

// Penalized spline regression in mixed-model form: y = X beta + Z u + eps with
// u ~ N(0, sigma_u^2 I).  Variance components by REML over the ratio, then
// coefficients from the equivalent generalized-ridge system.
inline MixedModelFit reml_spline_fit(const Matrix& fixed, const Matrix& random,
                                     const Vector& y) {
    if (fixed.rows() != y.size() || random.rows() != y.size())
        throw std::invalid_argument("reml_spline_fit: non-conformable inputs");
    if (fixed.rows() < fixed.cols())
        throw std::invalid_argument("reml_spline_fit: fewer rows than fixed columns");
    if (!y.allFinite() || !fixed.allFinite() || !random.allFinite())
        throw std::invalid_argument("reml_spline_fit: non-finite inputs");

    detail::RemlWorkspace ws(fixed, random, y);

    // Golden-section maximization over log kappa.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = -25.0, hi = 25.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = ws.loglik(std::exp(x1)).first, f2 = ws.loglik(std::exp(x2)).first;
    for (int it = 0; it < 200 && hi - lo > 1e-8; ++it) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + phi * (hi - lo); f2 = ws.loglik(std::exp(x2)).first;
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - phi * (hi - lo); f1 = ws.loglik(std::exp(x1)).first;
        }
    }
    const double kappa = std::exp((lo + hi) / 2.0);
    const auto [ll, ypy] = ws.loglik(kappa);
    (void)ll;

    MixedModelFit fit;
    fit.residual_variance = ypy / static_cast<double>(ws.n - ws.p);
    fit.random_variance = kappa * fit.residual_variance;
    fit.lambda = std::sqrt(1.0 / kappa);
    detail::ridge_solve(fixed, random, y, fit.lambda, fit);
    return fit;
}

// Same model with the penalty supplied externally (no REML step).
inline MixedModelFit reml_spline_fit_fixed_lambda(const Matrix& fixed, const Matrix& random,
                                                  const Vector& y, double lambda) {
    if (fixed.rows() != y.size() || random.rows() != y.size())
        throw std::invalid_argument("reml_spline_fit: non-conformable inputs");
    MixedModelFit fit;
    fit.lambda = lambda;
    detail::ridge_solve(fixed, random, y, lambda, fit);
    const Vector resid = y - fit.predict(fixed, random);
    const auto dof = fixed.rows() - fixed.cols();
    fit.residual_variance = dof > 0 ? resid.squaredNorm() / static_cast<double>(dof) : 0.0;
    fit.random_variance = lambda > 0.0 ? fit.residual_variance / (lambda * lambda) : 0.0;
    return fit;
}

struct BoxCoxFit {
    double lambda_hat = 0.0;    // profile-likelihood maximizer
    double lambda_tilde = 1.0;  // lambda_hat + 1, the exponent used downstream

    double transform(double y) const {
        if (std::abs(lambda_tilde) < 1e-12) return std::log(y);
        return (std::pow(y, lambda_tilde) - 1.0) / lambda_tilde;
    }
    double inverse(double t) const {
        if (std::abs(lambda_tilde) < 1e-12) return std::exp(t);
        const double base = lambda_tilde * t + 1.0;
        if (base <= 0.0) return 0.0;  // outside the transform's range
        return std::pow(base, 1.0 / lambda_tilde);
    }
};

// Box-Cox exponent by profile likelihood on a fixed grid.
inline BoxCoxFit box_cox(const std::vector<double>& y,
                         double grid_lo = -2.0, double grid_hi = 2.0, double step = 0.01) {
    if (y.empty()) throw std::domain_error("box_cox: empty input");
    double sum_log = 0.0;
    for (double v : y) {
        if (!(v > 0.0)) throw std::domain_error("box_cox: all values must be > 0");
        sum_log += std::log(v);
    }
    const double n = static_cast<double>(y.size());
    double best_ll = -std::numeric_limits<double>::infinity();
    double best_lambda = 1.0;
    std::vector<double> t(y.size());
    for (double lam = grid_lo; lam <= grid_hi + 1e-12; lam += step) {
        for (std::size_t i = 0; i < y.size(); ++i)
            t[i] = std::abs(lam) < 1e-12 ? std::log(y[i]) : (std::pow(y[i], lam) - 1.0) / lam;
        const double m = mean(t);
        double ss = 0.0;
        for (double v : t) ss += (v - m) * (v - m);
        const double var = ss / n;
        if (var <= 0.0) continue;
        const double ll = -0.5 * n * std::log(var) + (lam - 1.0) * sum_log;
        if (ll > best_ll) {
            best_ll = ll;
            best_lambda = lam;
        }
    }
    BoxCoxFit fit;
    fit.lambda_hat = best_lambda;
    fit.lambda_tilde = best_lambda + 1.0;
    return fit;
}

}  // namespace robustsq
