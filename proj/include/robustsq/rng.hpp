// Seedable random streams and the samplers used across the library.
//
// Every stochastic component receives its own RngStream, identified by a
// master seed plus a chain of stream ids (replicate, resample, chain, ...).
// The same (seed, ids) always yields the same sample sequence, and distinct
// id chains give streams that can be consumed independently in parallel.
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <stdexcept>

namespace robustsq {

namespace detail {
// splitmix64 finalizer; used to turn (seed, stream ids) into engine seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : state_(detail::mix64(detail::mix64(seed) ^ detail::mix64(stream_id ^ 0x5851f42d4c957f2dULL))),
          engine_(state_) {}

    // Derive an independent child stream, e.g. one per bootstrap resample.
    RngStream substream(std::uint64_t id) const {
        RngStream child(0);
        child.state_ = detail::mix64(state_ ^ detail::mix64(id + 0x709394d9e3cbbd4bULL));
        child.engine_.seed(child.state_);
        return child;
    }

    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(engine_);
    }

    // Integer in [0, n).
    std::size_t uniform_index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    bool bernoulli(double p) { return uniform() < p; }

    double standard_normal() {
        return std::normal_distribution<double>(0.0, 1.0)(engine_);
    }

    // NOTE: second parameter is a VARIANCE, not a standard deviation.
    double normal(double mu, double var) {
        if (var < 0.0 || !std::isfinite(var))
            throw std::domain_error("normal: variance must be finite and >= 0");
        if (var == 0.0) return mu;
        return mu + std::sqrt(var) * standard_normal();
    }

    double gamma(double shape, double scale) {
        return std::gamma_distribution<double>(shape, scale)(engine_);
    }

    // N(mu, 1) conditioned to (a, b).  Uses plain rejection when the interval
    // has decent mass under the untruncated normal, and Robert's translated
    // exponential proposal for one-sided tails far from mu.
    double truncated_normal(double mu, double a, double b) {
        if (!(a < b)) throw std::domain_error("truncated_normal: requires a < b");
        const double lo = a - mu, hi = b - mu;
        return mu + truncated_std_normal(lo, hi);
    }

    // Scaled inverse chi-square: nu*lambda / X, X ~ chi2(nu).
    double scaled_inv_chisq(double nu, double lambda) {
        if (!(nu > 0.0) || !(lambda > 0.0))
            throw std::domain_error("scaled_inv_chisq: nu and lambda must be > 0");
        const double chi2 = gamma(nu / 2.0, 2.0);
        return nu * lambda / chi2;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    // Standard normal truncated to (lo, hi).
    double truncated_std_normal(double lo, double hi) {
        const double inf = std::numeric_limits<double>::infinity();
        if (lo == -inf && hi == inf) return standard_normal();
        // Flip one-sided lower tails into upper tails.
        if (hi == inf) return lo <= 0.0 ? reject_two_sided(lo, hi) : robert_tail(lo);
        if (lo == -inf) return hi >= 0.0 ? reject_two_sided(lo, hi) : -robert_tail(-hi);
        return reject_two_sided(lo, hi);
    }

    double reject_two_sided(double lo, double hi) {
        // Direct rejection is fine when the interval contains mass near 0.
        for (int i = 0; i < 4096; ++i) {
            const double x = standard_normal();
            if (x > lo && x < hi) return x;
        }
        // Narrow or far interval: uniform proposal with exp bound.
        const double m = (lo > 0.0) ? lo : (hi < 0.0 ? hi : 0.0);
        while (true) {
            const double x = uniform(lo, hi);
            const double logw = (m * m - x * x) / 2.0;
            if (std::log(uniform()) <= logw) return x;
        }
    }

    // Robert (1995) exponential-proposal sampler for x ~ N(0,1) | x > lo > 0.
    double robert_tail(double lo) {
        const double alpha = (lo + std::sqrt(lo * lo + 4.0)) / 2.0;
        while (true) {
            const double x = lo - std::log(uniform()) / alpha;
            const double w = std::exp(-(x - alpha) * (x - alpha) / 2.0);
            if (uniform() <= w) return x;
        }
    }

    std::uint64_t state_;
    std::mt19937_64 engine_;
};

}  // namespace robustsq
