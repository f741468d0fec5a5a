#pragma once

// Distributional fixed-point engine for the root-flow recursion
//
//   X  =d  P + sum_{i=1}^{N} (X_i - 1)^+
//
// with P the arrival law and N the offspring law. One step maps a candidate
// law mu through pushdown, then the N-fold i.i.d. sum, then convolution with
// the arrivals. Iterating from the point mass at 0 climbs monotonically (in
// stochastic order) to the minimal solution; the truncated iteration keeps
// coordinates 0..K-1 exact at every step because each stage is
// lower-triangular in the coordinates.

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "pmf.hpp"

namespace treepark {

struct GeometricHalfOffspring {};   // P(N = i) = 2^-(i+1), the plane-tree case
struct PoissonOneOffspring {};      // N ~ Poisson(1)
struct ExplicitOffspring {          // finite support 0..len-1
    std::vector<double> mass;
};

using OffspringSpec = std::variant<GeometricHalfOffspring, PoissonOneOffspring, ExplicitOffspring>;

struct PoissonArrivals { double alpha = 0.0; };
struct ExplicitArrivals { std::vector<double> mass; };

using ArrivalSpec = std::variant<PoissonArrivals, ExplicitArrivals>;

inline double offspring_mean(const OffspringSpec& spec) {
    if (std::holds_alternative<GeometricHalfOffspring>(spec)) return 1.0;
    if (std::holds_alternative<PoissonOneOffspring>(spec)) return 1.0;
    const auto& m = std::get<ExplicitOffspring>(spec).mass;
    double mean = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) mean += static_cast<double>(k) * m[k];
    return mean;
}

inline double offspring_variance(const OffspringSpec& spec) {
    if (std::holds_alternative<GeometricHalfOffspring>(spec)) return 2.0;
    if (std::holds_alternative<PoissonOneOffspring>(spec)) return 1.0;
    const auto& m = std::get<ExplicitOffspring>(spec).mass;
    double mean = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        mean += static_cast<double>(k) * m[k];
        sq += static_cast<double>(k) * static_cast<double>(k) * m[k];
    }
    return sq - mean * mean;
}

// E[P(P-1)], the factorial moment entering the critical-density formula
inline double arrival_nu(const ArrivalSpec& spec) {
    if (const auto* po = std::get_if<PoissonArrivals>(&spec)) return po->alpha * po->alpha;
    const auto& m = std::get<ExplicitArrivals>(spec).mass;
    double nu = 0.0;
    for (std::size_t k = 2; k < m.size(); ++k)
        nu += static_cast<double>(k) * static_cast<double>(k - 1) * m[k];
    return nu;
}

inline double arrival_mean(const ArrivalSpec& spec) {
    if (const auto* po = std::get_if<PoissonArrivals>(&spec)) return po->alpha;
    const auto& m = std::get<ExplicitArrivals>(spec).mass;
    double mean = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) mean += static_cast<double>(k) * m[k];
    return mean;
}

namespace detail {

// compound Poisson(1): w = exp(nu^ - 1) via the standard recursion
//   w(0) = exp(nu(0) - 1),  k w(k) = sum_{j=1}^{k} j nu(j) w(k-j)
inline Pmf poisson_one_sum(const Pmf& nu) {
    const std::size_t K = nu.K();
    Pmf w = Pmf::zero(K);
    w.mass[0] = std::exp(nu.mass[0] - 1.0);
    for (std::size_t k = 1; k <= K; ++k) {
        double acc = 0.0;
        for (std::size_t j = 1; j <= k; ++j)
            acc += static_cast<double>(j) * nu.mass[j] * w.mass[k - j];
        w.mass[k] = acc / static_cast<double>(k);
    }
    w.refresh_tail();
    return w;
}

// finite mixture over N of the N-fold convolution
inline Pmf explicit_sum(const Pmf& nu, const std::vector<double>& offspring_mass) {
    const std::size_t K = nu.K();
    Pmf w = Pmf::zero(K);
    Pmf power = Pmf::point(K, 0);  // nu^{*0}
    for (std::size_t n = 0; n < offspring_mass.size(); ++n) {
        if (offspring_mass[n] != 0.0)
            for (std::size_t k = 0; k <= K; ++k) w.mass[k] += offspring_mass[n] * power.mass[k];
        if (n + 1 < offspring_mass.size()) power = convolve(power, nu);
    }
    w.refresh_tail();
    return w;
}

inline Pmf arrivals_pmf(const ArrivalSpec& spec, std::size_t K) {
    if (const auto* po = std::get_if<PoissonArrivals>(&spec)) return poisson_pmf(po->alpha, K);
    const auto& m = std::get<ExplicitArrivals>(spec).mass;
    Pmf p = Pmf::zero(K);
    for (std::size_t k = 0; k < m.size() && k <= K; ++k) p.mass[k] = m[k];
    p.refresh_tail();
    return p;
}

}  // namespace detail

inline void validate_offspring(const OffspringSpec& spec) {
    if (const auto* ex = std::get_if<ExplicitOffspring>(&spec)) {
        double s = 0.0;
        for (double m : ex->mass) {
            if (!(m >= 0.0)) throw std::invalid_argument("offspring: negative mass");
            s += m;
        }
        if (std::fabs(s - 1.0) > 1e-9)
            throw std::invalid_argument("offspring: masses must sum to 1");
    }
}

// one application of the distributional recursion to mu
inline Pmf rde_step(const Pmf& mu, const ArrivalSpec& arrivals, const OffspringSpec& offspring) {
    mu.validate("rde_step");
    validate_offspring(offspring);
    const Pmf nu = pushdown(mu);
    Pmf summed;
    if (std::holds_alternative<GeometricHalfOffspring>(offspring))
        summed = geom_half_sum(nu);
    else if (std::holds_alternative<PoissonOneOffspring>(offspring))
        summed = detail::poisson_one_sum(nu);
    else
        summed = detail::explicit_sum(nu, std::get<ExplicitOffspring>(offspring).mass);
    // arrivals first: Poisson masses underflow to exact zeros in the far tail
    // and convolve skips zero rows of its first argument
    return convolve(detail::arrivals_pmf(arrivals, mu.K()), summed);
}

struct FixedPointResult {
    Pmf pmf;
    std::uint64_t iterations = 0;
    double residual = 0.0;  // sup-norm change at the last step
    bool converged = false;
};

// iterate from the point mass at 0 until the sup-norm step change drops
// below tol
inline FixedPointResult rde_fixed_point(const ArrivalSpec& arrivals,
                                        const OffspringSpec& offspring, std::size_t K,
                                        double tol = 1e-12, std::uint64_t max_iter = 100000) {
    FixedPointResult out;
    Pmf mu = Pmf::point(K, 0);
    for (std::uint64_t it = 1; it <= max_iter; ++it) {
        Pmf next = rde_step(mu, arrivals, offspring);
        double delta = 0.0;
        for (std::size_t k = 0; k <= K; ++k)
            delta = std::max(delta, std::fabs(next.mass[k] - mu.mass[k]));
        mu = std::move(next);
        out.iterations = it;
        out.residual = delta;
        if (delta < tol) {
            out.converged = true;
            break;
        }
    }
    out.pmf = std::move(mu);
    return out;
}

// Law of the limit-tree root load Y = P + sum_{i=1}^{N1+N2} (X_i - 1)^+ built
// from a solved X pmf: two independent geometric-sum blocks convolved with
// the spine arrivals.
inline Pmf y_pmf(const Pmf& x_pmf, double alpha) {
    const Pmf block = geom_half_sum(pushdown(x_pmf));
    return convolve(poisson_pmf(alpha, x_pmf.K()), convolve(block, block));
}

}  // namespace treepark
