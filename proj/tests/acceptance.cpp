// Acceptance gate. Each criterion is its own test case, tagged so ctest can
// run them one by one, and each prints exactly one PASS/FAIL line with the
// numbers it saw. Tolerances are fixed here on purpose: loosening them is a
// spec change, not a bug fix.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "treepark/alpha.hpp"
#include "treepark/analytics.hpp"
#include "treepark/conjecture.hpp"
#include "treepark/enumerate.hpp"
#include "treepark/limit.hpp"
#include "treepark/parking.hpp"
#include "treepark/rde.hpp"
#include "treepark/rotation.hpp"
#include "treepark/sample_trees.hpp"

using namespace treepark;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20260821;

bool announce(int n, const char* name, bool ok) {
    std::cout << "[acceptance] criterion " << n << " (" << name
              << "): " << (ok ? "PASS" : "FAIL") << std::endl;
    return ok;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("finite-size transition location", "[criterion-1]") {
    bool ok = true;
    for (const char* text : {"0.30", "0.38", "0.44", "0.50"}) {
        const Alpha a = parse_alpha(text);
        const auto est = estimate_finite_parking_prob(10000, a, 10000, kSeed, 1);
        const double want = limit_parking_prob(a.value);
        const double bound = 3 * est.std_error + 0.02;
        const bool row_ok = std::fabs(est.estimate - want) <= bound;
        std::cout << "  - alpha " << text << ": estimate " << est.estimate << " closed "
                  << want << " allowed " << bound << (row_ok ? "" : "  <-- off") << "\n";
        ok = ok && row_ok;
    }
    REQUIRE(announce(1, "finite-size transition location", ok));
}

TEST_CASE("subcritical exactness chain", "[criterion-2]") {
    bool ok = true;
    for (double a : {0.1, 0.2, 0.3, 0.4}) {
        const auto fp =
            rde_fixed_point(PoissonArrivals{a}, GeometricHalfOffspring{}, 400, 1e-12);
        const double mean = pmf_mean(fp.pmf).mean_lower;
        const double mean_want = (1 + a - std::sqrt(1 - 2 * a - a * a)) / 2;
        const bool row_ok = fp.converged && std::fabs(fp.pmf.mass[0] - (1 - a)) < 1e-6 &&
                            std::fabs(mean - mean_want) < 1e-4;
        std::cout << "  - alpha " << a << ": p " << fp.pmf.mass[0] << " (want " << 1 - a
                  << "), mean " << mean << " (want " << mean_want << ")"
                  << (row_ok ? "" : "  <-- off") << "\n";
        ok = ok && row_ok;
    }
    REQUIRE(announce(2, "subcritical exactness chain", ok));
}

TEST_CASE("generating-function identities", "[criterion-3]") {
    bool ok = true;

    // quadratic residual at alpha = 0.3
    for (int i = 1; i <= 9; ++i) {
        const double s = 0.1 * i;
        const double g = gen_fn(s, 0.3);
        const double resid = g * g - ((2 - 0.7) * s + 0.7) * g + s * std::exp(0.3 * (s - 1));
        ok = ok && std::fabs(resid) < 1e-6;
    }

    // plus-branch match below the transition
    for (double a : {0.1, 0.2, 0.3, 0.4}) {
        for (int i = 1; i <= 9; ++i) {
            const double s = 0.1 * i;
            ok = ok && std::fabs(gen_fn(s, a) - q_plus(s, a, 1 - a)) < 1e-6;
        }
    }

    // piecewise branch structure around the switch point at alpha = 0.5
    const double p = p_zero(0.5);
    const double sp = s_switch(0.5, p);
    std::cout << "  - solved p " << p << ", switch point " << sp << "\n";
    ok = ok && std::fabs(q_plus(sp, 0.5, p) - q_minus(sp, 0.5, p)) < 1e-5;
    for (double off : {0.0005, 0.005, 0.03}) {
        ok = ok && std::fabs(gen_fn(sp - off, 0.5) - q_plus(sp - off, 0.5, p)) < 1e-5;
        ok = ok && std::fabs(gen_fn(sp + off, 0.5) - q_minus(sp + off, 0.5, p)) < 1e-5;
        const double g = gen_fn(sp + off, 0.5);
        const double resid =
            g * g - ((2 - p) * (sp + off) + p) * g + (sp + off) * std::exp(0.5 * (sp + off - 1));
        ok = ok && std::fabs(resid) < 1e-6;
    }
    REQUIRE(announce(3, "generating-function identities", ok));
}

TEST_CASE("supercritical zero-visit probability, two routes", "[criterion-4]") {
    const double p = p_zero(0.5);
    bool ok = p > 0.5 && p <= 0.510957;

    const auto fp =
        rde_fixed_point(PoissonArrivals{0.5}, GeometricHalfOffspring{}, 2000, 1e-8, 12000);
    const double diff = std::fabs(fp.pmf.mass[0] - p);
    std::cout << "  - implicit p " << p << ", fixed-point mass(0) " << fp.pmf.mass[0]
              << " after " << fp.iterations << " iterations, diff " << diff << "\n";
    ok = ok && diff < 1e-3;
    REQUIRE(announce(4, "supercritical zero-visit probability, two routes", ok));
}

TEST_CASE("limit-model survival", "[criterion-5]") {
    SpineOptions opt;
    opt.threads = 1;
    const auto low = spine_survival_estimate(0.2, 100000, 10000, kSeed, opt);
    std::cout << "  - alpha 0.2: estimate " << low.estimate << " +- " << low.std_error
              << " (capped draws " << low.cap_exceeded_events << ", early accepted "
              << low.early_accepted << " at bar "
              << (low.accept_threshold ? std::to_string(*low.accept_threshold) : "none")
              << ")\n";
    bool ok = std::fabs(low.estimate - 0.957315) < 0.01;

    const auto high = spine_survival_estimate(0.6, 100000, 10000, kSeed, opt);
    std::cout << "  - alpha 0.6: estimate " << high.estimate << "\n";
    ok = ok && high.estimate < 0.01;
    REQUIRE(announce(5, "limit-model survival", ok));
}

TEST_CASE("sequential dynamics equal the flow recursion, exhaustively", "[criterion-6]") {
    bool ok = true;
    std::uint64_t checked = 0;
    for (std::uint32_t n = 1; n <= 5 && ok; ++n) {
        for (const auto& t : enumerate_plane_trees(n)) {
            for (std::uint32_t m = 0; m <= 5 && ok; ++m) {
                // odometer over all n^m destination sequences: this covers
                // every multiset in every order
                std::vector<std::uint32_t> seq(m, 0);
                while (true) {
                    std::vector<std::uint32_t> counts(n, 0);
                    for (auto d : seq) counts[d]++;
                    const auto flow = park_flow(t, arrivals_from_counts(counts));
                    const auto drive = park_sequential(t, seq);
                    ++checked;
                    if (flow.overflow != drive.failed) {
                        ok = false;
                        break;
                    }
                    std::size_t i = 0;
                    while (i < m && seq[i] + 1 == n) seq[i++] = 0;
                    if (i == m) break;
                    seq[i]++;
                }
            }
        }
    }
    std::cout << "  - agreed on " << checked << " (tree, arrival order) pairs\n";
    REQUIRE(announce(6, "sequential dynamics equal the flow recursion", ok));
}

TEST_CASE("rotation bijection and sampler uniformity", "[criterion-7]") {
    bool ok = true;
    for (std::uint32_t n = 1; n <= 8; ++n) {
        const auto trees = enumerate_plane_trees(n);
        std::set<std::string> keys;
        for (const auto& t : trees) {
            const BinaryTree b = rotation_to_binary(t);
            ok = ok && b.size() == n - 1 && rotation_from_binary(b) == t;
            keys.insert(b.shape_key());
        }
        ok = ok && keys.size() == trees.size();
        if (n == 8) ok = ok && trees.size() == 429;
    }

    const auto shapes = enumerate_plane_trees(5);
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < shapes.size(); ++i)
        index[serialize_code(shapes[i].code())] = int(i);
    Rng rng = derive_rng(kSeed, 7);
    std::vector<int> obs(shapes.size(), 0);
    std::vector<std::uint32_t> code;
    std::vector<std::int8_t> steps;
    const int N = 1000000;
    for (int i = 0; i < N; ++i) {
        sample_uniform_code(rng, 5, code, steps);
        obs[index.at(serialize_code(code))]++;
    }
    const double expect = double(N) / double(shapes.size());
    double chi2 = 0;
    for (int o : obs) chi2 += (o - expect) * (o - expect) / expect;
    const double pval = boost::math::gamma_q((shapes.size() - 1) / 2.0, chi2 / 2.0);
    std::cout << "  - chi-square over " << shapes.size() << " shapes: " << chi2
              << ", p-value " << pval << "\n";
    ok = ok && pval > 0.001;
    REQUIRE(announce(7, "rotation bijection and sampler uniformity", ok));
}

TEST_CASE("two cars on two vertices", "[criterion-8]") {
    const auto est = estimate_finite_parking_prob(2, parse_alpha("1"), 100000, kSeed, 1);
    const double sigma = std::sqrt(0.75 * 0.25 / 100000.0);
    std::cout << "  - estimate " << est.estimate << ", exact 0.75, four sigma "
              << 4 * sigma << "\n";
    REQUIRE(announce(8, "two cars on two vertices", std::fabs(est.estimate - 0.75) < 4 * sigma));
}

TEST_CASE("conjectured mean formula in the proven setup", "[criterion-9]") {
    const auto rep = conjecture_probe(GeometricHalfOffspring{}, ArrivalFamily::Poisson,
                                      {0.1, 0.2, 0.3}, 400, 1e-12);
    bool ok = true;
    for (const auto& row : rep.rows) {
        const double proven =
            (1 + row.alpha - std::sqrt(1 - 2 * row.alpha - row.alpha * row.alpha)) / 2;
        const bool row_ok = row.rde_converged && std::fabs(row.rde_mean - proven) < 1e-4;
        std::cout << "  - alpha " << row.alpha << ": fixed-point mean " << row.rde_mean
                  << ", formula " << proven << (row_ok ? "" : "  <-- off") << "\n";
        ok = ok && row_ok;
    }
    REQUIRE(announce(9, "conjectured mean formula in the proven setup", ok));
}

TEST_CASE("byte-identical reruns of every command", "[criterion-10]") {
    const char* bin = std::getenv("TREEPARK_CLI");
    REQUIRE(bin != nullptr);
    const fs::path dir = fs::temp_directory_path() / "treepark_acceptance";
    fs::create_directories(dir);

    auto run = [&](const std::string& args, int idx, int round) {
        const fs::path o = dir / ("out." + std::to_string(idx) + "." + std::to_string(round));
        const std::string cmd =
            std::string("\"") + bin + "\" " + args + " > " + o.string() + " 2> /dev/null";
        const int rc = std::system(cmd.c_str());
        const int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
        return std::pair<int, std::string>(code, slurp(o));
    };

    const fs::path phase_prefix = dir / "phase";
    const std::vector<std::string> commands = {
        "exact --alpha 0,0.2,0.41421356,0.5,1 --seed 11",
        "simulate-finite --n 300 --alpha 0.3,0.5 --trials 400 --seed 11",
        "simulate-limit --alpha 0.25,0.6 --horizon 2000 --trials 300 --seed 11",
        "rde --alpha 0.5 --K 200 --tol 1e-8 --max-iter 800 --seed 11",
        "conjecture --alpha 0.1,0.2 --offspring geometric-half --arrival-family poisson "
        "--K 150 --seed 11",
        "phase-diagram --alpha 0.3 --n 120 --trials 80 --curve-step 0.01 --seed 11 --out " +
            phase_prefix.string(),
    };

    bool ok = true;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const auto first = run(commands[i], int(i), 1);
        std::string curve1, mc1;
        if (commands[i].rfind("phase-diagram", 0) == 0) {
            curve1 = slurp(phase_prefix.string() + "_curve.csv");
            mc1 = slurp(phase_prefix.string() + "_mc.csv");
        }
        const auto second = run(commands[i], int(i), 2);
        bool same = first.first == 0 && second.first == 0 && first.second == second.second;
        if (commands[i].rfind("phase-diagram", 0) == 0) {
            same = same && curve1 == slurp(phase_prefix.string() + "_curve.csv") &&
                   mc1 == slurp(phase_prefix.string() + "_mc.csv");
        }
        std::cout << "  - " << commands[i].substr(0, commands[i].find(' ')) << ": "
                  << (same ? "identical" : "DIFFERS") << "\n";
        ok = ok && same;
    }
    REQUIRE(announce(10, "byte-identical reruns of every command", ok));
}
