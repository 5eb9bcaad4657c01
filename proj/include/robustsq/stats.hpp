// Small numeric helpers: distribution CDFs/quantiles and moment utilities.
#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace robustsq {

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double normal_quantile(double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double chisq_quantile(double p, double df) {
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), p);
}

inline double chisq_cdf(double x, double df) {
    return boost::math::cdf(boost::math::chi_squared_distribution<double>(df), x);
}

// 97.5% t quantile with Rubin-style possibly-infinite df.
inline double t_quantile(double p, double df) {
    if (!std::isfinite(df)) return normal_quantile(p);
    return boost::math::quantile(boost::math::students_t_distribution<double>(df), p);
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean: empty vector");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample variance (n-1 denominator).
inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

inline double expit(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace robustsq
