// Truncated power bases on propensity scores for PSPP / PSBPP.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace robustsq {

struct SplineBasisSpec {
    int degree = 1;             // L; linear truncated basis by default
    std::vector<double> knots;  // strictly increasing

    void validate() const {
        if (degree < 1) throw std::invalid_argument("SplineBasisSpec: degree must be >= 1");
        if (knots.empty()) throw std::invalid_argument("SplineBasisSpec: need at least one knot");
        for (std::size_t h = 1; h < knots.size(); ++h)
            if (!(knots[h] > knots[h - 1]))
                throw std::invalid_argument("SplineBasisSpec: knots must be strictly increasing");
    }
};

// H knots equally spaced strictly inside (min z, max z).
inline std::vector<double> equally_spaced_knots(const std::vector<double>& z, int count) {
    if (count < 1) throw std::invalid_argument("equally_spaced_knots: H must be >= 1");
    if (z.empty()) throw std::invalid_argument("equally_spaced_knots: empty scores");
    const auto [lo_it, hi_it] = std::minmax_element(z.begin(), z.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi - lo > 1e-10))
        throw std::invalid_argument("equally_spaced_knots: degenerate (constant) scores");
    std::vector<double> knots(count);
    for (int h = 1; h <= count; ++h)
        knots[h - 1] = lo + h * (hi - lo) / (count + 1);
    return knots;
}

struct SplineBasis {
    Eigen::MatrixXd fixed;   // [1, z, ..., z^L]
    Eigen::MatrixXd random;  // [(z - tau_h)_+^L]
};

inline SplineBasis truncated_power_basis(const std::vector<double>& z,
                                         const SplineBasisSpec& spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(z.size());
    const int L = spec.degree;
    const auto H = static_cast<Eigen::Index>(spec.knots.size());
    SplineBasis basis;
    basis.fixed.resize(n, L + 1);
    basis.random.resize(n, H);
    for (Eigen::Index i = 0; i < n; ++i) {
        double pow_z = 1.0;
        for (int l = 0; l <= L; ++l) {
            basis.fixed(i, l) = pow_z;
            pow_z *= z[i];
        }
        for (Eigen::Index h = 0; h < H; ++h) {
            const double d = z[i] - spec.knots[h];
            basis.random(i, h) = d > 0.0 ? std::pow(d, L) : 0.0;
        }
    }
    return basis;
}

}  // namespace robustsq
