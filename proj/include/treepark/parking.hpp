#pragma once

// The parking process. Cars arrive on vertices of a rooted tree, drive toward
// the root, and park at the first unoccupied vertex on the way; a car that
// passes the root is lost.
//
// The order cars are processed in does not change how many are lost, so the
// whole process collapses to one bottom-up flow computation:
//
//   X_v = arrivals(v) + sum over children c of (X_c - 1)^+
//
// X_v counts cars that try to park at v; vertex v keeps one and passes the
// excess to its parent. Root overflow (X_root - 1)^+ is the number of lost
// cars. park_flow evaluates this in O(n) with an explicit stack; a literal
// one-car-at-a-time implementation is kept alongside as the oracle the
// equivalence tests compare against.

#include <cstdint>
#include <vector>
#include <stdexcept>

#include "alpha.hpp"
#include "plane_tree.hpp"
#include "rng.hpp"
#include "sample_trees.hpp"
#include "parallel.hpp"

namespace treepark {

struct ArrivalConfig {
    std::vector<std::uint32_t> counts;  // cars arriving per vertex
    std::uint64_t total = 0;
};

inline ArrivalConfig arrivals_from_counts(std::vector<std::uint32_t> counts) {
    ArrivalConfig a;
    a.total = 0;
    for (auto c : counts) a.total += c;
    a.counts = std::move(counts);
    return a;
}

// m cars, destinations i.i.d. uniform on the n vertices
inline ArrivalConfig sample_arrivals_fixed(Rng& rng, std::size_t n, std::uint64_t m) {
    ArrivalConfig a;
    a.counts.assign(n, 0);
    for (std::uint64_t i = 0; i < m; ++i)
        a.counts[rng.next_below(n)]++;
    a.total = m;
    return a;
}

// independent Poisson(alpha) arrivals per vertex
inline ArrivalConfig sample_arrivals_poisson(Rng& rng, std::size_t n,
                                             const PoissonSampler& po) {
    ArrivalConfig a;
    a.counts.assign(n, 0);
    a.total = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const std::uint32_t c = po.sample(rng);
        a.counts[v] = c;
        a.total += c;
    }
    return a;
}

struct ParkingFlowResult {
    std::vector<std::uint64_t> visits;  // X_v per vertex
    std::uint64_t root_visits = 0;
    std::uint64_t overflow = 0;         // cars lost past the root
    bool all_parked = false;
};

namespace detail {

// Flow on a preorder code directly. Scanning the code backwards visits every
// vertex after all of its descendants, and the pending (X_c - 1)^+ values of
// a vertex's children are exactly the top child_count entries of the stack.
// Returns X_root. `visits`, when given, receives X_v by preorder index.
template <class ArrivalAt>
std::uint64_t flow_over_code(const std::vector<std::uint32_t>& code,
                             ArrivalAt&& arrival_at,
                             std::vector<std::uint64_t>& stack,
                             std::vector<std::uint64_t>* visits = nullptr) {
    stack.clear();
    const std::size_t n = code.size();
    if (visits) visits->assign(n, 0);
    for (std::size_t ri = 0; ri < n; ++ri) {
        const std::size_t i = n - 1 - ri;
        std::uint64_t x = arrival_at(i);
        for (std::uint32_t c = 0; c < code[i]; ++c) {
            x += stack.back();
            stack.pop_back();
        }
        if (visits) (*visits)[i] = x;
        stack.push_back(x > 0 ? x - 1 : 0);
    }
    const std::uint64_t past_root = stack.back();
    stack.pop_back();
    return past_root;  // this is (X_root - 1)^+; callers wanting X_root use visits
}

}  // namespace detail

inline ParkingFlowResult park_flow(const PlaneTree& t, const ArrivalConfig& arrivals) {
    if (arrivals.counts.size() != t.size())
        throw std::invalid_argument("park_flow: arrival vector length != tree size");
    const std::vector<std::uint32_t> code = t.code();
    ParkingFlowResult r;
    std::vector<std::uint64_t> stack;
    r.overflow = detail::flow_over_code(
        code, [&](std::size_t v) { return std::uint64_t(arrivals.counts[v]); }, stack,
        &r.visits);
    r.root_visits = r.visits[0];
    r.all_parked = (r.overflow == 0);
    return r;
}

struct SequentialParkResult {
    std::uint64_t parked = 0;
    std::uint64_t failed = 0;
};

// Literal process: one car at a time in the order given, each walking from
// its destination toward the root. Quadratic in the worst case; this is the
// semantic reference, not the fast path.
inline SequentialParkResult park_sequential(const PlaneTree& t,
                                            const std::vector<std::uint32_t>& destinations) {
    std::vector<std::uint8_t> occupied(t.size(), 0);
    SequentialParkResult r;
    for (std::uint32_t dest : destinations) {
        if (dest >= t.size())
            throw std::invalid_argument("park_sequential: destination out of range");
        std::int32_t v = static_cast<std::int32_t>(dest);
        while (v >= 0 && occupied[v]) v = t.parent(v);
        if (v >= 0) {
            occupied[v] = 1;
            r.parked++;
        } else {
            r.failed++;
        }
    }
    return r;
}

struct FiniteEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t cars = 0;
    std::uint64_t successes = 0;
};

// One trial of the finite experiment: uniform n-vertex tree, floor(alpha*n)
// uniform destinations, success iff nobody is lost. Buffers are caller-owned
// so the per-trial cost is allocation free.
struct FiniteTrialWorkspace {
    std::vector<std::uint32_t> code;
    std::vector<std::int8_t> steps;
    std::vector<std::uint32_t> arrival_counts;
    std::vector<std::uint64_t> stack;
};

inline bool finite_trial_parks_all(Rng& rng, std::uint32_t n, std::uint64_t cars,
                                   FiniteTrialWorkspace& ws) {
    sample_uniform_code(rng, n, ws.code, ws.steps);
    ws.arrival_counts.assign(n, 0);
    for (std::uint64_t i = 0; i < cars; ++i)
        ws.arrival_counts[rng.next_below(n)]++;
    const std::uint64_t lost = detail::flow_over_code(
        ws.code, [&](std::size_t v) { return std::uint64_t(ws.arrival_counts[v]); },
        ws.stack);
    return lost == 0;
}

// P(every car parks) on a uniform n-vertex tree with floor(alpha*n) cars.
// Trial t always uses the generator derived from (master_seed, t), so the
// result is one fixed number for a given seed no matter the thread count.
inline FiniteEstimate estimate_finite_parking_prob(std::uint32_t n, const Alpha& alpha,
                                                   std::uint64_t trials,
                                                   std::uint64_t master_seed,
                                                   unsigned threads = 1) {
    if (n == 0) throw std::invalid_argument("estimate_finite_parking_prob: n >= 1");
    if (alpha.value < 0.0 || alpha.value > 1.0)
        throw std::invalid_argument("estimate_finite_parking_prob: alpha outside [0, 1]");
    const std::uint64_t cars = alpha.floor_times(n);
    FiniteEstimate est;
    est.trials = trials;
    est.cars = cars;
    std::vector<FiniteTrialWorkspace> workspaces(resolve_threads(threads));
    est.successes = parallel_trial_count(trials, threads, [&](unsigned w, std::uint64_t t) {
        Rng rng = derive_rng(master_seed, t);
        return finite_trial_parks_all(rng, n, cars, workspaces[w]);
    });
    est.estimate = trials ? static_cast<double>(est.successes) / trials : 0.0;
    est.std_error = trials ? std::sqrt(est.estimate * (1.0 - est.estimate) / trials) : 0.0;
    return est;
}

}  // namespace treepark
