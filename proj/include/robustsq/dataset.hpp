// Core data model: outcome with missingness, response indicator, covariates,
// and design-matrix construction from term lists.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace robustsq {

// y entries are meaningful only where r = 1; x is fully observed.
struct Dataset {
    Eigen::VectorXd y;
    Eigen::VectorXd r;  // 1 = observed
    Eigen::MatrixXd x;

    Eigen::Index n() const { return r.size(); }

    void validate() const {
        if (y.size() != r.size() || x.rows() != r.size())
            throw std::invalid_argument("Dataset: y, r, x row counts differ");
        bool any_observed = false;
        for (Eigen::Index i = 0; i < n(); ++i) {
            if (r[i] != 0.0 && r[i] != 1.0)
                throw std::invalid_argument("Dataset: response indicator must be 0/1");
            if (r[i] == 1.0) {
                any_observed = true;
                if (!std::isfinite(y[i]))
                    throw std::invalid_argument("Dataset: observed y must be finite");
            }
        }
        if (!any_observed) throw std::invalid_argument("Dataset: no observed outcomes");
        if (!x.allFinite()) throw std::invalid_argument("Dataset: covariates must be finite");
    }

    Eigen::Index observed_count() const {
        return static_cast<Eigen::Index>(r.sum());
    }

    std::vector<int> observed_rows() const {
        std::vector<int> idx;
        for (Eigen::Index i = 0; i < n(); ++i)
            if (r[i] == 1.0) idx.push_back(static_cast<int>(i));
        return idx;
    }

    Dataset take_rows(const std::vector<int>& rows) const {
        Dataset out;
        out.y.resize(rows.size());
        out.r.resize(rows.size());
        out.x.resize(rows.size(), x.cols());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            out.y[k] = y[rows[k]];
            out.r[k] = r[rows[k]];
            out.x.row(k) = x.row(rows[k]);
        }
        return out;
    }

    bool has_observed_outcome() const { return r.sum() > 0.0; }
};

// A design term is a product of covariate columns; repeats give powers,
// e.g. {0,0,1,1} is (x0*x1)^2.  The intercept is added by build_design.
using Term = std::vector<int>;

inline Eigen::MatrixXd build_design(const Eigen::MatrixXd& x, const std::vector<Term>& terms,
                                    bool intercept = true) {
    const Eigen::Index n = x.rows();
    const Eigen::Index q = static_cast<Eigen::Index>(terms.size()) + (intercept ? 1 : 0);
    Eigen::MatrixXd design(n, q);
    Eigen::Index col = 0;
    if (intercept) design.col(col++).setOnes();
    for (const Term& term : terms) {
        Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
        for (int j : term) {
            if (j < 0 || j >= x.cols())
                throw std::invalid_argument("build_design: term references column " +
                                            std::to_string(j) + " outside the covariate matrix");
            v.array() *= x.col(j).array();
        }
        design.col(col++) = v;
    }
    return design;
}

// Point estimate plus the completed outcome vector for imputation methods.
struct Estimate {
    double mu_hat = 0.0;
    Eigen::VectorXd imputed_y;  // equals data y where observed; empty for weighting methods
    std::string method;
};

}  // namespace robustsq
