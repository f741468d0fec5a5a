#pragma once

// Monte Carlo on the local limit: an infinite spine 1, 2, 3, ... rooted at 1,
// with two independent GGW(1/2) trees grafted onto every spine vertex by
// identifying their roots with it. After parking each off-spine subtree, the
// load reaching spine vertex k is
//
//   Y_k = P_k + sum_{i=1}^{N1+N2} (X_i - 1)^+,
//
// P_k the vertex's own Poisson(alpha) arrivals and the sum running over the
// subtrees hanging off the two identified roots. Every car parks if and only
// if the spare-capacity walk C_n = n - (Y_1 + ... + Y_n) stays nonnegative.
//
// Note the identified roots contribute neither an arrival of their own nor a
// parking spot: both belong to the spine vertex and are already accounted for
// by P_k and by the +1 per step of the walk. Concretely each graft
// contributes the sum of (X - 1)^+ over the root's child subtrees, which is
// the root flow of a GGW tree whose root arrival is suppressed and whose
// root spot is removed.
//
// The estimator truncates at a finite horizon, which biases upward (an
// exact upper bound on the infinite-horizon survival). Below alpha_c a
// second, quantified shortcut is available: once the walk holds capacity c,
// the chance it ever goes negative is at most z^-(c+1) for any z > 1 with
// E[z^(Y-1)] <= 1 (z^-C_n is then a supermartingale). The largest usable z
// is the extension radius of the pgf, computable in closed form, so trials
// are accepted early once the ruin bound drops below a configured epsilon.
// At the default epsilon = 1e-9 the added bias is invisible next to Monte
// Carlo noise; set early_accept = false to disable the shortcut entirely.

#include <cstdint>
#include <cmath>
#include <optional>
#include <vector>

#include "analytics.hpp"
#include "parallel.hpp"
#include "parking.hpp"
#include "rng.hpp"
#include "sample_trees.hpp"

namespace treepark {

struct SpineOptions {
    std::uint64_t size_cap = 10000000;  // per grafted tree
    bool early_accept = true;
    double accept_epsilon = 1e-9;
    std::uint64_t max_restarts = 100000;  // per trial, then the run aborts
    unsigned threads = 1;
};

namespace detail {

// workspace reused across draws: tree code buffer plus the flow stack
struct YSampler {
    explicit YSampler(double alpha) : po(alpha) {}

    PoissonSampler po;
    std::vector<std::uint32_t> code;
    std::vector<std::uint64_t> stack;

    // sum of (X - 1)^+ over the root's child subtrees of one GGW tree with
    // Poisson arrivals everywhere except the root; nullopt on a capped draw
    std::optional<std::uint64_t> graft_overflow(Rng& rng, std::uint64_t size_cap) {
        if (!sample_ggw_code(rng, code, size_cap)) return std::nullopt;
        stack.clear();
        const std::size_t n = code.size();
        for (std::size_t ri = 0; ri < n; ++ri) {
            const std::size_t i = n - 1 - ri;
            std::uint64_t x = (i == 0) ? 0 : po.sample(rng);  // root arrival suppressed
            for (std::uint32_t c = 0; c < code[i]; ++c) {
                x += stack.back();
                stack.pop_back();
            }
            if (i == 0) return x;  // root spot suppressed too: keep the raw sum
            stack.push_back(x > 0 ? x - 1 : 0);
        }
        return 0;  // unreachable; the loop always returns at i == 0
    }

    std::optional<std::uint64_t> sample_Y(Rng& rng, std::uint64_t size_cap) {
        const auto a = graft_overflow(rng, size_cap);
        if (!a) return std::nullopt;
        const auto b = graft_overflow(rng, size_cap);
        if (!b) return std::nullopt;
        return *a + *b + po.sample(rng);
    }
};

}  // namespace detail

// Single-draw form of Y for tests and cross-checks.
inline std::optional<std::uint64_t> sample_Y(Rng& rng, double alpha,
                                             std::uint64_t size_cap = 10000000) {
    detail::YSampler ys(alpha);
    return ys.sample_Y(rng, size_cap);
}

// Capacity threshold for early acceptance: smallest c with z^-(c+1) <= eps
// at the best admissible z. nullopt when no useful z exists (at or above
// alpha_c, or so close below that the threshold would be enormous).
inline std::optional<std::uint64_t> early_accept_threshold(double alpha, double eps) {
    if (classify_regime(alpha) != Regime::Subcritical) return std::nullopt;
    if (alpha == 0.0) return 0;  // Y = 0 identically, accept at once
    const double z = pgf_extension_radius(alpha);
    // at z = radius, E[z^Y] = G(z)^2 e^{-alpha(z-1)} equals z exactly (the
    // discriminant vanishes), so the supermartingale condition holds with
    // equality and any smaller z holds strictly
    if (!(z > 1.0 + 1e-9)) return std::nullopt;
    const double c = std::log(1.0 / eps) / std::log(z);
    const std::uint64_t threshold = 2 * static_cast<std::uint64_t>(std::ceil(c)) + 2;
    if (threshold > 1000000) return std::nullopt;
    return threshold;
}

struct SpineSurvivalResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t horizon = 0;
    std::uint64_t cap_exceeded_events = 0;  // capped draws observed (restarting)
    std::uint64_t restarted_trials = 0;     // trials hit by at least one restart
    std::uint64_t early_accepted = 0;       // trials concluded via the bound
    std::optional<std::uint64_t> accept_threshold;
};

// P(C_n >= 0 for all n <= horizon), Monte Carlo over `trials` spine walks.
// A capped tree draw aborts and restarts the whole trial on the same derived
// stream, so results stay reproducible for a given (seed, horizon, trials).
inline SpineSurvivalResult spine_survival_estimate(double alpha, std::uint64_t horizon,
                                                   std::uint64_t trials,
                                                   std::uint64_t master_seed,
                                                   const SpineOptions& opt = {}) {
    check_alpha_domain(alpha, "spine_survival_estimate");
    SpineSurvivalResult out;
    out.trials = trials;
    out.horizon = horizon;
    if (opt.early_accept)
        out.accept_threshold = early_accept_threshold(alpha, opt.accept_epsilon);

    struct Tally {
        std::uint64_t caps = 0, restarted = 0, accepted = 0;
    };
    const unsigned workers = resolve_threads(opt.threads);
    std::vector<Tally> tallies(workers);
    std::vector<detail::YSampler> samplers(workers, detail::YSampler(alpha));

    const auto survived = parallel_trial_count(trials, opt.threads, [&](unsigned w, std::uint64_t t) {
        detail::YSampler& ys = samplers[w];
        Tally& tally = tallies[w];
        Rng rng = derive_rng(master_seed, t);
        bool restarted = false;
        for (std::uint64_t restart = 0;; ++restart) {
            if (restart > opt.max_restarts)
                throw std::runtime_error("spine_survival_estimate: restart budget exhausted");
            std::int64_t capacity = 0;
            bool failed = false, capped = false;
            for (std::uint64_t n = 1; n <= horizon; ++n) {
                const auto y = ys.sample_Y(rng, opt.size_cap);
                if (!y) {
                    capped = true;
                    break;
                }
                capacity += 1 - static_cast<std::int64_t>(*y);
                if (capacity < 0) {
                    failed = true;
                    break;
                }
                if (out.accept_threshold &&
                    static_cast<std::uint64_t>(capacity) >= *out.accept_threshold) {
                    tally.accepted++;
                    break;
                }
            }
            if (capped) {
                tally.caps++;
                restarted = true;
                continue;  // replay the trial on the same stream
            }
            if (restarted) tally.restarted++;
            return !failed;
        }
    });

    for (const auto& t : tallies) {
        out.cap_exceeded_events += t.caps;
        out.restarted_trials += t.restarted;
        out.early_accepted += t.accepted;
    }
    out.estimate = trials ? static_cast<double>(survived) / trials : 0.0;
    out.std_error = trials ? std::sqrt(out.estimate * (1.0 - out.estimate) / trials) : 0.0;
    return out;
}

// The survival event of the spare-capacity walk is exactly the event that
// every car parks on the limit tree, so this is an alias with the parking
// name; the joint-simulation cross-check lives in the tests.
inline SpineSurvivalResult limit_parking_estimate(double alpha, std::uint64_t horizon,
                                                  std::uint64_t trials,
                                                  std::uint64_t master_seed,
                                                  const SpineOptions& opt = {}) {
    return spine_survival_estimate(alpha, horizon, trials, master_seed, opt);
}

struct SpineWalkTrace {
    std::vector<std::int64_t> capacity;  // C_1 .. C_m, m <= horizon
    bool survived = true;
    std::uint64_t first_failure = 0;  // step with C < 0, when survived == false
};

// one full walk (no early accept), recording C_n per step for the trace dump
inline SpineWalkTrace simulate_spine_trace(double alpha, std::uint64_t horizon,
                                           std::uint64_t master_seed,
                                           std::uint64_t trial_index = 0,
                                           std::uint64_t size_cap = 10000000) {
    detail::YSampler ys(alpha);
    SpineWalkTrace trace;
    // the restarted walk keeps consuming the same stream, like the estimator
    // does after a capped draw
    Rng rng = derive_rng(master_seed, trial_index);
    for (std::uint64_t restart = 0; restart < 100000; ++restart) {
        trace.capacity.clear();
        trace.survived = true;
        trace.first_failure = 0;
        bool capped = false;
        std::int64_t capacity = 0;
        for (std::uint64_t n = 1; n <= horizon; ++n) {
            const auto y = ys.sample_Y(rng, size_cap);
            if (!y) {
                capped = true;
                break;
            }
            capacity += 1 - static_cast<std::int64_t>(*y);
            trace.capacity.push_back(capacity);
            if (capacity < 0) {
                trace.survived = false;
                trace.first_failure = n;
                break;
            }
        }
        if (!capped) return trace;
    }
    throw std::runtime_error("simulate_spine_trace: restart budget exhausted");
}

}  // namespace treepark
