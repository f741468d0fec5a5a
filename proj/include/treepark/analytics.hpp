#pragma once

// Closed-form side of the theory. The probability generating function
// G(s) = E[s^X] of the minimal root-flow solution satisfies the quadratic
//
//   G(s)^2 - ((2-p)s + p) G(s) + s e^{alpha(s-1)} = 0,       p = P(X = 0),
//
// whose two explicit branches are
//
//   Q±(s) = ((2-p)s + p ± sqrt(h(s))) / 2,
//   h(s)  = ((2-p)s + p)^2 - 4 s e^{alpha(s-1)}.
//
// Below and at the critical density alpha_c = sqrt(2) - 1 everything is
// explicit: p = 1 - alpha and G = Q+ on [0, 1]. Above alpha_c the value of p
// is pinned by h having a double root inside (0, 1): combining h = 0 with
// h' = 0 shows the double root solves the quadratic
//
//   f(s) = alpha (2-p) s^2 + (alpha p + p - 2) s + p = 0,
//
// and the residual r(p) = h(smaller root of f) crosses zero at exactly one p
// in (1 - alpha, 2 / ((3 + 2 sqrt 2) alpha + 1)]. G then follows Q+ left of
// the double root s_p and Q- right of it.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace treepark {

inline double alpha_critical() { return std::sqrt(2.0) - 1.0; }

// width of the band around alpha_c treated as exactly critical
inline constexpr double kCriticalBand = 1e-6;

enum class Regime { Subcritical, Critical, Supercritical };

inline Regime classify_regime(double alpha) {
    const double ac = alpha_critical();
    if (std::fabs(alpha - ac) < kCriticalBand) return Regime::Critical;
    return alpha < ac ? Regime::Subcritical : Regime::Supercritical;
}

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        default: return "supercritical";
    }
}

inline void check_alpha_domain(double alpha, const char* where) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::domain_error(std::string(where) + ": alpha outside [0, 1]");
}

// P(every car parks) on the limit tree; hits 0 continuously at alpha_c
inline double limit_parking_prob(double alpha) {
    check_alpha_domain(alpha, "limit_parking_prob");
    if (alpha > alpha_critical()) return 0.0;
    const double disc = std::max(0.0, 1.0 - 2.0 * alpha - alpha * alpha);
    const double om = 1.0 - alpha;
    return std::sqrt(disc) / (om * om * std::exp(alpha));
}

struct ExtReal {
    bool finite = true;
    double value = 0.0;
    static ExtReal inf() { return {false, std::numeric_limits<double>::infinity()}; }
    static ExtReal of(double v) { return {true, v}; }
};

// E[X]; finite up to and including alpha_c (value 1/sqrt(2) there)
inline ExtReal mean_X(double alpha) {
    check_alpha_domain(alpha, "mean_X");
    if (classify_regime(alpha) == Regime::Supercritical) return ExtReal::inf();
    const double disc = std::max(0.0, 1.0 - 2.0 * alpha - alpha * alpha);
    return ExtReal::of((1.0 + alpha - std::sqrt(disc)) / 2.0);
}

// E[Y] for the limit-tree load; equals 1 at alpha_c
inline ExtReal mean_Y(double alpha) {
    check_alpha_domain(alpha, "mean_Y");
    if (classify_regime(alpha) == Regime::Supercritical) return ExtReal::inf();
    const double disc = std::max(0.0, 1.0 - 2.0 * alpha - alpha * alpha);
    return ExtReal::of(1.0 - std::sqrt(disc));
}

namespace detail {

// h and its derivatives in long double: the p solver pushes the double root
// to the noise floor, and 80-bit evaluation keeps that floor low enough for
// the branches to meet cleanly in double precision.
inline long double h_ld(long double s, long double alpha, long double p) {
    const long double lin = (2.0L - p) * s + p;
    return lin * lin - 4.0L * s * std::exp(alpha * (s - 1.0L));
}

inline long double h_prime_ld(long double s, long double alpha, long double p) {
    const long double lin = (2.0L - p) * s + p;
    return 2.0L * (2.0L - p) * lin - 4.0L * (1.0L + alpha * s) * std::exp(alpha * (s - 1.0L));
}

inline long double h_second_ld(long double s, long double alpha, long double p) {
    const long double q = 2.0L - p;
    return 2.0L * q * q -
           4.0L * (2.0L * alpha + alpha * alpha * s) * std::exp(alpha * (s - 1.0L));
}

// smaller root of f, the double-root candidate location
inline long double f_smaller_root_ld(long double alpha, long double p) {
    const long double a = alpha * (2.0L - p);
    const long double b = alpha * p + p - 2.0L;  // negative in range
    const long double c = p;
    long double disc = b * b - 4.0L * a * c;
    if (disc < 0.0L && disc > -1e-12L) disc = 0.0L;  // p at the interval edge
    if (disc < 0.0L) return std::numeric_limits<long double>::quiet_NaN();
    // -b is positive; the smaller root comes out of the stable pairing
    const long double sq = std::sqrt(disc);
    const long double big = (-b + sq) / (2.0L * a);
    return c / (a * big);
}

}  // namespace detail

inline double h_discriminant(double s, double alpha, double p) {
    return static_cast<double>(detail::h_ld(s, alpha, p));
}

// f(s) = alpha (2-p) s^2 + (alpha p + p - 2) s + p
inline double f_quadratic(double s, double alpha, double p) {
    return alpha * (2.0 - p) * s * s + (alpha * p + p - 2.0) * s + p;
}

// upper end of the admissible p interval above alpha_c (where f's
// discriminant vanishes): p <= 2 / ((3 + 2 sqrt 2) alpha + 1)
inline double p_upper_bound(double alpha) {
    return 2.0 / ((3.0 + 2.0 * std::sqrt(2.0)) * alpha + 1.0);
}

struct BracketFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// P(X = 0). Explicit below alpha_c; above, the unique root of the double-root
// residual, bracketed inside (1 - alpha, p_upper_bound] and bisected to the
// long-double noise floor.
inline double p_zero(double alpha) {
    check_alpha_domain(alpha, "p_zero");
    if (classify_regime(alpha) != Regime::Supercritical) return 1.0 - alpha;

    const long double a = alpha;
    auto residual = [a](long double p) -> long double {
        const long double t1 = detail::f_smaller_root_ld(a, p);
        if (std::isnan(t1)) return std::numeric_limits<long double>::quiet_NaN();
        return detail::h_ld(t1, a, p);
    };

    long double lo = 1.0L - a + 1e-9L;
    long double hi = p_upper_bound(alpha);
    long double rlo = residual(lo);
    long double rhi = residual(hi);
    if (std::isnan(rlo) || std::isnan(rhi) || (rlo < 0.0L) == (rhi < 0.0L))
        throw BracketFailure("p_zero: residual does not change sign over (" +
                             std::to_string(static_cast<double>(lo)) + ", " +
                             std::to_string(static_cast<double>(hi)) + "] at alpha=" +
                             std::to_string(alpha));

    // sanity sweep: the residual should cross once; more than one sign change
    // means the bracket logic no longer matches the function's shape
    {
        int changes = 0;
        long double prev = rlo;
        for (int i = 1; i <= 20; ++i) {
            const long double p = lo + (hi - lo) * i / 20.0L;
            const long double r = residual(p);
            if (!std::isnan(r) && (r < 0.0L) != (prev < 0.0L)) {
                ++changes;
                prev = r;
            }
        }
        if (changes != 1)
            throw BracketFailure("p_zero: expected exactly one sign change, saw " +
                                 std::to_string(changes) + " at alpha=" + std::to_string(alpha));
    }

    for (int iter = 0; iter < 200 && hi - lo > 1e-18L; ++iter) {
        const long double mid = (lo + hi) / 2.0L;
        const long double rm = residual(mid);
        if ((rm < 0.0L) == (rlo < 0.0L)) {
            lo = mid;
            rlo = rm;
        } else {
            hi = mid;
        }
    }
    return static_cast<double>((lo + hi) / 2.0L);
}

// discriminant clamp shared by the branch evaluators
inline double clamped_sqrt_h(double s, double alpha, double p) {
    const double h = static_cast<double>(detail::h_ld(s, alpha, p));
    if (h < -1e-10)
        throw std::domain_error("q_plus/q_minus: discriminant below -1e-10 (s=" +
                                std::to_string(s) + ")");
    return std::sqrt(std::max(0.0, h));
}

inline double q_plus(double s, double alpha, double p) {
    return (((2.0 - p) * s + p) + clamped_sqrt_h(s, alpha, p)) / 2.0;
}

inline double q_minus(double s, double alpha, double p) {
    return (((2.0 - p) * s + p) - clamped_sqrt_h(s, alpha, p)) / 2.0;
}

// location of the double root of h above alpha_c (the branch switch point)
inline double s_switch(double alpha, double p) {
    const double t = static_cast<double>(detail::f_smaller_root_ld(alpha, p));
    if (std::isnan(t))
        throw std::domain_error("s_switch: f has no real roots at this (alpha, p)");
    return t;
}

// G(s) on [0, 1]: Q+ throughout at or below alpha_c; above, Q+ left of the
// switch point and Q- from it onward
inline double gen_fn(double s, double alpha) {
    if (s < 0.0 || s > 1.0) throw std::domain_error("gen_fn: s outside [0, 1]");
    check_alpha_domain(alpha, "gen_fn");
    if (classify_regime(alpha) != Regime::Supercritical)
        return q_plus(s, alpha, 1.0 - alpha);
    const double p = p_zero(alpha);
    const double sp = s_switch(alpha, p);
    return s < sp ? q_plus(s, alpha, p) : q_minus(s, alpha, p);
}

struct TurningPoints {
    double t1 = 0.0;
    double t2 = 0.0;
};

// The two roots of h' in (0, 1) above alpha_c, where h switches between
// decreasing / increasing / decreasing. h'' is strictly decreasing, so h' is
// concave: find its maximum by bisecting h'', then bisect h' on either side.
inline std::optional<TurningPoints> h_turning_points(double alpha, double p) {
    const long double a = alpha, pp = p;
    long double lo = 0.0L, hi = 1.0L;
    if (!(detail::h_second_ld(lo, a, pp) > 0.0L) || !(detail::h_second_ld(hi, a, pp) < 0.0L))
        return std::nullopt;
    for (int i = 0; i < 120; ++i) {
        const long double mid = (lo + hi) / 2.0L;
        (detail::h_second_ld(mid, a, pp) > 0.0L ? lo : hi) = mid;
    }
    const long double peak = (lo + hi) / 2.0L;
    if (!(detail::h_prime_ld(peak, a, pp) > 0.0L)) return std::nullopt;
    if (!(detail::h_prime_ld(0.0L, a, pp) < 0.0L)) return std::nullopt;

    auto bisect_hprime = [&](long double x0, long double x1, bool rising) {
        for (int i = 0; i < 120; ++i) {
            const long double mid = (x0 + x1) / 2.0L;
            const bool below = detail::h_prime_ld(mid, a, pp) < 0.0L;
            if (below == rising) x0 = mid; else x1 = mid;
        }
        return (x0 + x1) / 2.0L;
    };

    TurningPoints t;
    t.t1 = static_cast<double>(bisect_hprime(0.0L, peak, true));
    // h'(1) can sit on either side of zero only for out-of-range p; in range
    // it is negative (h decreases into its root at s = 1)
    if (!(detail::h_prime_ld(1.0L, a, pp) < 0.0L)) return std::nullopt;
    t.t2 = static_cast<double>(bisect_hprime(peak, 1.0L, false));
    return t;
}

// survival probability m/q of the skip-free walk: increments 1 - Y_k, ruin
// when the walk goes negative; m = E[1 - Y], q = P(Y = 0)
inline double skip_free_survival(double m, double q) {
    if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("skip_free_survival: q outside (0, 1]");
    if (!(m >= 0.0)) throw std::domain_error("skip_free_survival: negative drift");
    const double s = m / q;
    if (s > 1.0 + 1e-12) throw std::domain_error("skip_free_survival: m/q exceeds 1");
    return std::min(1.0, s);
}

// E[z^X] continued to z >= 1 (subcritical only). The branch labels swap at
// s = 1: the analytic continuation of G follows Q- beyond 1, up to the next
// zero of h.
inline double pgf_extension_above_one(double z, double alpha) {
    if (classify_regime(alpha) == Regime::Supercritical)
        throw std::domain_error("pgf_extension_above_one: needs alpha <= alpha_c");
    const double p = 1.0 - alpha;
    if (z < 1.0) throw std::domain_error("pgf_extension_above_one: z < 1");
    return q_minus(z, alpha, p);
}

// largest z > 1 with h(z) >= 0 at the subcritical p; the natural boundary of
// the continuation and the optimal base for exponential ruin bounds
inline double pgf_extension_radius(double alpha) {
    if (classify_regime(alpha) == Regime::Supercritical)
        throw std::domain_error("pgf_extension_radius: needs alpha <= alpha_c");
    const long double a = alpha, p = 1.0L - a;
    if (alpha == 0.0) return std::numeric_limits<double>::infinity();
    long double lo = 1.0L, hi = 2.0L;
    while (detail::h_ld(hi, a, p) > 0.0L && hi < 1e6L) hi *= 2.0L;
    if (hi >= 1e6L) return static_cast<double>(hi);
    // h dips negative somewhere past the dome; walk lo forward to just below
    // the first crossing using h > 0 as the bracket invariant
    for (int i = 0; i < 200 && hi - lo > 1e-15L; ++i) {
        const long double mid = (lo + hi) / 2.0L;
        (detail::h_ld(mid, a, p) > 0.0L ? lo : hi) = mid;
    }
    return static_cast<double>(lo);
}

struct AlphaProfile {
    double alpha = 0.0;
    Regime regime = Regime::Subcritical;
    double p = 0.0;
    std::optional<double> switch_point;  // only above alpha_c
    ExtReal ex;                          // E[X]
    ExtReal ey;                          // E[Y]
    double limit_prob = 0.0;
};

inline AlphaProfile alpha_profile(double alpha) {
    AlphaProfile pr;
    pr.alpha = alpha;
    pr.regime = classify_regime(alpha);
    pr.p = p_zero(alpha);
    if (pr.regime == Regime::Supercritical)
        pr.switch_point = s_switch(alpha, pr.p);
    pr.ex = mean_X(alpha);
    pr.ey = mean_Y(alpha);
    pr.limit_prob = limit_parking_prob(alpha);
    return pr;
}

}  // namespace treepark
