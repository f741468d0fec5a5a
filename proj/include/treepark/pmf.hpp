#pragma once

// Probability mass functions on {0, ..., K} with the mass beyond K tracked
// explicitly as `tail`. Nothing here renormalizes: every operation produces
// coordinates that are exact functions of the input coordinates, and whatever
// cannot be placed is accounted to the tail. That discipline is what makes
// the truncated fixed-point iteration trustworthy on its kept coordinates.

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace treepark {

struct Pmf {
    std::vector<double> mass;  // mass[k] = P(X = k), k = 0..K
    double tail = 0.0;         // mass not represented in `mass`

    std::size_t K() const { return mass.size() - 1; }

    static Pmf zero(std::size_t K) {
        Pmf p;
        p.mass.assign(K + 1, 0.0);
        return p;
    }

    static Pmf point(std::size_t K, std::size_t at) {
        Pmf p = zero(K);
        if (at < p.mass.size()) p.mass[at] = 1.0;
        else p.tail = 1.0;
        return p;
    }

    double sum() const {
        double s = 0.0;
        for (double m : mass) s += m;
        return s;
    }

    void refresh_tail() { tail = std::max(0.0, 1.0 - sum()); }

    void validate(const char* where) const {
        if (mass.empty()) throw std::invalid_argument(std::string(where) + ": empty pmf");
        double s = tail;
        for (double m : mass) {
            if (!(m >= 0.0)) throw std::invalid_argument(std::string(where) + ": negative mass");
            s += m;
        }
        if (s > 1.0 + 1e-9)
            throw std::invalid_argument(std::string(where) + ": total mass exceeds 1");
    }
};

// law of (X - 1)^+ : mass at 0 collects P(X = 0) + P(X = 1), everything else
// shifts down one slot; the tail is untouched
inline Pmf pushdown(const Pmf& mu) {
    Pmf r = Pmf::zero(mu.K());
    r.mass[0] = mu.mass[0] + (mu.K() >= 1 ? mu.mass[1] : 0.0);
    for (std::size_t k = 1; k + 1 < mu.mass.size(); ++k) r.mass[k] = mu.mass[k + 1];
    r.tail = mu.tail;
    return r;
}

// law of sum_{i=1}^{N} V_i with N Geometric(1/2) (P(N=i) = 2^-(i+1)) and V_i
// i.i.d. with pmf nu. In generating functions w = 1 / (2 - nu), which unrolls
// into the lower-triangular recursion
//
//   w(0) = 1 / (2 - nu(0))
//   w(k) (1 - nu(0)/2) = (1/2) sum_{j=1}^{k} nu(j) w(k-j),   k >= 1
//
// so w(k) depends on nu(0..k) only; truncation never leaks into kept
// coordinates. Missing mass lands in the tail.
inline Pmf geom_half_sum(const Pmf& nu) {
    nu.validate("geom_half_sum");
    if (nu.mass[0] >= 2.0)
        throw std::domain_error("geom_half_sum: degenerate denominator");
    const std::size_t K = nu.K();
    Pmf w = Pmf::zero(K);
    const double denom = 1.0 - nu.mass[0] / 2.0;
    w.mass[0] = 1.0 / (2.0 - nu.mass[0]);
    for (std::size_t k = 1; k <= K; ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) acc += nu.mass[j] * w.mass[k - j];
        w.mass[k] = acc / (2.0 * denom);
    }
    w.refresh_tail();
    return w;
}

// Poisson(lambda) restricted to {0..K}; upward recursion from exp(-lambda)
inline Pmf poisson_pmf(double lambda, std::size_t K) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("poisson_pmf: lambda < 0");
    Pmf p = Pmf::zero(K);
    double m = std::exp(-lambda);
    p.mass[0] = m;
    for (std::size_t k = 1; k <= K; ++k) {
        m *= lambda / static_cast<double>(k);
        p.mass[k] = m;
    }
    p.refresh_tail();
    return p;
}

// truncated convolution; lost cross terms go to the tail
inline Pmf convolve(const Pmf& a, const Pmf& b) {
    const std::size_t K = std::max(a.K(), b.K());
    Pmf c = Pmf::zero(K);
    for (std::size_t i = 0; i < a.mass.size(); ++i) {
        if (a.mass[i] == 0.0) continue;
        const double ai = a.mass[i];
        const std::size_t jmax = std::min(b.mass.size() - 1, K - i);
        for (std::size_t j = 0; j <= jmax; ++j) c.mass[i + j] += ai * b.mass[j];
    }
    c.refresh_tail();
    return c;
}

struct PgfValue {
    double value = 0.0;
    double tail_bound = 0.0;  // tail * s^K, a cap on what the tail could add
};

inline PgfValue pmf_pgf_eval(const Pmf& mu, double s) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("pmf_pgf_eval: s outside [0, 1]");
    PgfValue out;
    double spow = 1.0;
    for (std::size_t k = 0; k < mu.mass.size(); ++k) {
        out.value += mu.mass[k] * spow;
        spow *= s;
    }
    // spow is now s^(K+1); s^K is the stated bound, stay on the generous side
    out.tail_bound = mu.tail * (s == 0.0 ? 0.0 : spow / s);
    return out;
}

// Truncated mean: a lower bound for E[X]. When a refinement at doubled K is
// supplied, the heuristic flag reports whether the bound is still climbing by
// more than `threshold`, the telltale of an infinite-mean fixed point.
struct MeanEstimate {
    double mean_lower = 0.0;
    bool diverged = false;
};

inline MeanEstimate pmf_mean(const Pmf& mu, const Pmf* doubled_K = nullptr,
                             double threshold = 1e-3) {
    MeanEstimate r;
    for (std::size_t k = 1; k < mu.mass.size(); ++k)
        r.mean_lower += static_cast<double>(k) * mu.mass[k];
    if (doubled_K) {
        double m2 = 0.0;
        for (std::size_t k = 1; k < doubled_K->mass.size(); ++k)
            m2 += static_cast<double>(k) * doubled_K->mass[k];
        r.diverged = (m2 - r.mean_lower) > threshold;
    }
    return r;
}

}  // namespace treepark
