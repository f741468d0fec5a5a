#pragma once

// Probe for the conjectured universal phase boundary. For a critical
// offspring law N and an arrival family P(alpha) with mean alpha, write
// nu(alpha) = E[P(P-1)]. The conjectured critical density is
//
//   alpha_c = inf { alpha >= 0 : alpha = 1 - sqrt(Var(N) nu(alpha)) }
//
// and below it the mean root flow should be
//
//   E[X] = (1 - alpha + alpha Var(N) - sqrt((1-alpha)^2 - Var(N) nu(alpha)))
//          / Var(N).
//
// The probe solves the distributional fixed point numerically for each
// requested alpha and reports the truncated mean next to this closed form.
// For Geometric(1/2) offspring with Poisson arrivals the formula collapses
// to the proven plane-tree expression, which is what the acceptance test
// pins down.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rde.hpp"

namespace treepark {

// arrival families the probe knows how to scan over alpha
enum class ArrivalFamily {
    Poisson,    // P ~ Poisson(alpha), nu = alpha^2
    TwoPoint,   // P in {0, 2}, P(P = 2) = alpha/2, nu = alpha
};

inline ArrivalSpec make_family_arrivals(ArrivalFamily family, double alpha) {
    if (family == ArrivalFamily::Poisson) return PoissonArrivals{alpha};
    if (!(alpha >= 0.0 && alpha <= 2.0))
        throw std::invalid_argument("two-point arrivals: alpha outside [0, 2]");
    return ExplicitArrivals{{1.0 - alpha / 2.0, 0.0, alpha / 2.0}};
}

inline double family_nu(ArrivalFamily family, double alpha) {
    return family == ArrivalFamily::Poisson ? alpha * alpha : alpha;
}

struct ConjectureRow {
    double alpha = 0.0;
    double rde_mean = 0.0;        // truncated mean of the solved fixed point
    bool rde_converged = false;
    std::optional<double> conjectured_mean;  // absent above the conjectured alpha_c
    double abs_diff = 0.0;
    bool within_tol = false;
};

struct ConjectureReport {
    double var_n = 0.0;
    double conjectured_alpha_c = 0.0;
    std::vector<ConjectureRow> rows;
};

inline std::optional<double> conjectured_mean(double alpha, double var_n, double nu) {
    const double disc = (1.0 - alpha) * (1.0 - alpha) - var_n * nu;
    if (disc < 0.0) return std::nullopt;
    return (1.0 - alpha + alpha * var_n - std::sqrt(disc)) / var_n;
}

// smallest root of alpha = 1 - sqrt(Var(N) nu(alpha)) on [0, hi], by
// bisection on the sign of the difference (nu is increasing in alpha for
// both families, so the crossing is simple)
inline double conjectured_alpha_c(ArrivalFamily family, double var_n, double hi = 1.0) {
    auto gap = [&](double a) { return a - 1.0 + std::sqrt(var_n * family_nu(family, a)); };
    double lo = 0.0;
    if (gap(lo) >= 0.0) return 0.0;
    if (gap(hi) < 0.0) return hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2.0;
        (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    return (lo + hi) / 2.0;
}

inline ConjectureReport conjecture_probe(const OffspringSpec& offspring, ArrivalFamily family,
                                         const std::vector<double>& alphas, std::size_t K = 400,
                                         double tol = 1e-12, std::uint64_t max_iter = 100000,
                                         double compare_tol = 1e-4) {
    validate_offspring(offspring);
    if (std::fabs(offspring_mean(offspring) - 1.0) > 1e-9)
        throw std::invalid_argument("conjecture_probe: offspring law must be critical (mean 1)");
    ConjectureReport rep;
    rep.var_n = offspring_variance(offspring);
    rep.conjectured_alpha_c = conjectured_alpha_c(family, rep.var_n);
    for (double alpha : alphas) {
        ConjectureRow row;
        row.alpha = alpha;
        const auto fp = rde_fixed_point(make_family_arrivals(family, alpha), offspring, K,
                                        tol, max_iter);
        row.rde_mean = pmf_mean(fp.pmf).mean_lower;
        row.rde_converged = fp.converged;
        row.conjectured_mean = conjectured_mean(alpha, rep.var_n, family_nu(family, alpha));
        if (row.conjectured_mean) {
            row.abs_diff = std::fabs(row.rde_mean - *row.conjectured_mean);
            row.within_tol = row.abs_diff <= compare_tol;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace treepark
