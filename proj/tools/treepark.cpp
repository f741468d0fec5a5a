// treepark: simulator and exact-analytics toolkit for the parking process on
// random plane trees and its local limit.
//
// Subcommands:
//   exact           closed-form profile per arrival density
//   simulate-finite Monte Carlo on uniform n-vertex trees
//   simulate-limit  Monte Carlo on the limit tree (spare-capacity walk)
//   rde             distributional fixed point, dumped as JSON
//   phase-diagram   closed-form curve plus a finite-size Monte Carlo sweep
//   conjecture      fixed-point means vs the conjectured universal formula
//
// Output is deterministic for a fixed seed and config: one config line, one
// header, then data rows; every double is printed shortest-round-trip. The
// only timestamp ever written goes to a .meta.json sidecar next to --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "treepark/alpha.hpp"
#include "treepark/analytics.hpp"
#include "treepark/conjecture.hpp"
#include "treepark/limit.hpp"
#include "treepark/parking.hpp"
#include "treepark/rde.hpp"
#include "treepark/serialize.hpp"

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// Where rows go: stdout by default, the --out file otherwise. The sidecar
// holds the timestamp so the primary output stays byte-stable.
struct Output {
    std::ostream* os = &std::cout;
    std::ofstream file;

    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output file: " + path);
        os = &file;
        std::ofstream meta(path + ".meta.json", std::ios::binary);
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        json j;
        j["written_unix_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
        meta << j.dump() << "\n";
    }
};

struct CommonOpts {
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string out_path;
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "master seed (every trial derives from it)")
        ->required();
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", c.out_path, "write primary output to this file");
    cmd->add_option("--threads", c.threads, "worker threads, 0 = all cores")
        ->capture_default_str();
}

std::string config_echo(const std::string& cmd,
                        const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string line = "treepark " + cmd;
    for (const auto& [k, v] : kv) line += " " + k + "=" + v;
    return line;
}

// emits the config as a comment (csv) or a first json object (json lines)
void emit_config(Output& out, const std::string& format, const std::string& cmd,
                 const std::vector<std::pair<std::string, std::string>>& kv) {
    if (format == "csv") {
        *out.os << "# " << config_echo(cmd, kv) << "\n";
    } else {
        json j;
        j["type"] = "config";
        j["command"] = cmd;
        for (const auto& [k, v] : kv) j[k] = v;
        *out.os << j.dump() << "\n";
    }
}

struct RowSink {
    Output* out;
    std::string format;
    std::vector<std::string> columns;
    int errors = 0;

    void header() {
        if (format != "csv") return;
        for (std::size_t i = 0; i < columns.size(); ++i)
            *out->os << (i ? "," : "") << columns[i];
        *out->os << "\n";
    }

    void row(const std::vector<std::string>& vals) {
        if (format == "csv") {
            for (std::size_t i = 0; i < vals.size(); ++i)
                *out->os << (i ? "," : "") << csv_escape(vals[i]);
            *out->os << "\n";
        } else {
            json j;
            j["type"] = "row";
            for (std::size_t i = 0; i < columns.size() && i < vals.size(); ++i)
                j[columns[i]] = vals[i];
            *out->os << j.dump() << "\n";
        }
    }

    void error_row(std::vector<std::string> vals, const std::string& what) {
        ++errors;
        vals.back() = what;
        row(vals);
        std::cerr << "row error: " << what << "\n";
    }
};

std::string ext_real_str(const treepark::ExtReal& x) {
    return x.finite ? fmt(x.value) : "inf";
}

// ---------------------------------------------------------------- exact ----

int cmd_exact(const std::vector<std::string>& alpha_texts, const CommonOpts& c) {
    Output out;
    out.open(c.out_path);
    std::vector<std::pair<std::string, std::string>> kv = {
        {"alpha", ""}, {"seed", std::to_string(c.seed)}, {"format", c.format}};
    for (const auto& a : alpha_texts) kv[0].second += (kv[0].second.empty() ? "" : ",") + a;
    emit_config(out, c.format, "exact", kv);

    RowSink sink{&out, c.format,
                 {"alpha", "regime", "p", "s_switch", "mean_X", "mean_Y",
                  "limit_prob", "error"}};
    sink.header();
    for (const auto& text : alpha_texts) {
        try {
            const treepark::Alpha a = treepark::parse_alpha(text);
            const auto pr = treepark::alpha_profile(a.value);
            sink.row({text, treepark::regime_name(pr.regime), fmt(pr.p),
                      pr.switch_point ? fmt(*pr.switch_point) : "",
                      ext_real_str(pr.ex), ext_real_str(pr.ey), fmt(pr.limit_prob), ""});
        } catch (const std::exception& e) {
            sink.error_row({text, "", "", "", "", "", "", ""}, e.what());
        }
    }
    return sink.errors ? 1 : 0;
}

// ------------------------------------------------------- simulate-finite ----

int cmd_simulate_finite(const std::vector<std::string>& alpha_texts,
                        const std::vector<std::uint64_t>& ns, std::uint64_t trials,
                        const CommonOpts& c) {
    Output out;
    out.open(c.out_path);
    std::vector<std::pair<std::string, std::string>> kv;
    {
        std::string alpha_join, n_join;
        for (const auto& a : alpha_texts) alpha_join += (alpha_join.empty() ? "" : ",") + a;
        for (auto n : ns) n_join += (n_join.empty() ? "" : ",") + std::to_string(n);
        kv = {{"n", n_join},
              {"alpha", alpha_join},
              {"trials", std::to_string(trials)},
              {"seed", std::to_string(c.seed)},
              {"threads", std::to_string(c.threads)},
              {"format", c.format}};
    }
    emit_config(out, c.format, "simulate-finite", kv);

    RowSink sink{&out, c.format,
                 {"n", "alpha", "cars", "trials", "estimate", "std_error",
                  "limit_prob", "error"}};
    sink.header();
    std::size_t done = 0;
    const std::size_t total = ns.size() * alpha_texts.size();
    // one derived-seed block per (n, alpha) cell keeps rows independent of
    // the grid layout: cell (i, j) always replays identically
    std::uint64_t cell = 0;
    for (auto n : ns) {
        for (const auto& text : alpha_texts) {
            const std::uint64_t cell_seed = c.seed ^ (0x51eadbeefULL + cell * 0x9e3779b97f4a7c15ULL);
            ++cell;
            try {
                const treepark::Alpha a = treepark::parse_alpha(text);
                if (n == 0 || n > 100000000)
                    throw std::invalid_argument("n outside [1, 1e8]");
                const auto est = treepark::estimate_finite_parking_prob(
                    static_cast<std::uint32_t>(n), a, trials, cell_seed, c.threads);
                sink.row({std::to_string(n), text, std::to_string(est.cars),
                          std::to_string(est.trials), fmt(est.estimate),
                          fmt(est.std_error), fmt(treepark::limit_parking_prob(a.value)),
                          ""});
            } catch (const std::exception& e) {
                sink.error_row({std::to_string(n), text, "", "", "", "", "", ""}, e.what());
            }
            ++done;
            std::cerr << "simulate-finite: " << done << "/" << total << " cells\n";
        }
    }
    return sink.errors ? 1 : 0;
}

// -------------------------------------------------------- simulate-limit ----

int cmd_simulate_limit(const std::vector<std::string>& alpha_texts, std::uint64_t horizon,
                       std::uint64_t trials, std::uint64_t size_cap, bool no_early_accept,
                       const std::string& trace_path, const CommonOpts& c) {
    Output out;
    out.open(c.out_path);
    std::vector<std::pair<std::string, std::string>> kv;
    {
        std::string alpha_join;
        for (const auto& a : alpha_texts) alpha_join += (alpha_join.empty() ? "" : ",") + a;
        kv = {{"alpha", alpha_join},
              {"horizon", std::to_string(horizon)},
              {"trials", std::to_string(trials)},
              {"size_cap", std::to_string(size_cap)},
              {"early_accept", no_early_accept ? "0" : "1"},
              {"seed", std::to_string(c.seed)},
              {"threads", std::to_string(c.threads)},
              {"format", c.format}};
    }
    emit_config(out, c.format, "simulate-limit", kv);

    RowSink sink{&out, c.format,
                 {"alpha", "horizon", "trials", "estimate", "std_error", "limit_prob",
                  "cap_exceeded", "restarted_trials", "early_accepted",
                  "accept_threshold", "error"}};
    sink.header();
    std::size_t done = 0;
    std::uint64_t cell = 0;
    for (const auto& text : alpha_texts) {
        const std::uint64_t cell_seed = c.seed ^ (0xcafef00dULL + cell * 0x9e3779b97f4a7c15ULL);
        ++cell;
        try {
            const treepark::Alpha a = treepark::parse_alpha(text);
            treepark::SpineOptions opt;
            opt.size_cap = size_cap;
            opt.early_accept = !no_early_accept;
            opt.threads = c.threads;
            const auto res = treepark::spine_survival_estimate(a.value, horizon, trials,
                                                               cell_seed, opt);
            sink.row({text, std::to_string(res.horizon), std::to_string(res.trials),
                      fmt(res.estimate), fmt(res.std_error),
                      fmt(treepark::limit_parking_prob(a.value)),
                      std::to_string(res.cap_exceeded_events),
                      std::to_string(res.restarted_trials),
                      std::to_string(res.early_accepted),
                      res.accept_threshold ? std::to_string(*res.accept_threshold) : "",
                      ""});
        } catch (const std::exception& e) {
            sink.error_row({text, std::to_string(horizon), std::to_string(trials), "", "",
                            "", "", "", "", "", ""},
                           e.what());
        }
        ++done;
        std::cerr << "simulate-limit: " << done << "/" << alpha_texts.size() << " rows\n";
    }

    if (!trace_path.empty() && !alpha_texts.empty()) {
        // one illustrative walk for the first alpha, trial 0
        const treepark::Alpha a = treepark::parse_alpha(alpha_texts.front());
        const std::uint64_t trace_horizon = std::min<std::uint64_t>(horizon, 1000000);
        const auto trace =
            treepark::simulate_spine_trace(a.value, trace_horizon, c.seed, 0, size_cap);
        std::ofstream tf(trace_path, std::ios::binary);
        if (!tf) throw std::runtime_error("cannot open trace file: " + trace_path);
        tf << "# treepark simulate-limit trace alpha=" << a.text << " seed=" << c.seed
           << " trial=0\n";
        tf << "n,capacity\n";
        for (std::size_t i = 0; i < trace.capacity.size(); ++i)
            tf << (i + 1) << "," << trace.capacity[i] << "\n";
    }
    return sink.errors ? 1 : 0;
}

// ------------------------------------------------------------------ rde ----

treepark::OffspringSpec parse_offspring_arg(const std::string& arg) {
    if (arg.empty() || arg == "geometric-half") return treepark::GeometricHalfOffspring{};
    if (arg == "poisson-one") return treepark::PoissonOneOffspring{};
    std::ifstream in(arg);
    if (!in) throw std::runtime_error("offspring spec: no such builtin or file: " + arg);
    json j;
    in >> j;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "geometric-half") return treepark::GeometricHalfOffspring{};
    if (kind == "poisson-one") return treepark::PoissonOneOffspring{};
    if (kind == "explicit")
        return treepark::ExplicitOffspring{j.at("mass").get<std::vector<double>>()};
    throw std::runtime_error("offspring spec: unknown kind '" + kind + "'");
}

int cmd_rde(const std::string& alpha_text, std::size_t K, double tol, std::uint64_t max_iter,
            const std::string& offspring_arg, const CommonOpts& c) {
    Output out;
    out.open(c.out_path);
    const treepark::Alpha a = treepark::parse_alpha(alpha_text);
    const treepark::OffspringSpec offspring = parse_offspring_arg(offspring_arg);
    const bool plane_tree_case =
        std::holds_alternative<treepark::GeometricHalfOffspring>(offspring);

    const auto fp = treepark::rde_fixed_point(treepark::PoissonArrivals{a.value}, offspring,
                                              K, tol, max_iter);
    const auto mean = treepark::pmf_mean(fp.pmf);

    json doc;
    doc["config"] = {{"command", "rde"},
                     {"alpha", a.text},
                     {"K", K},
                     {"tol", tol},
                     {"max_iter", max_iter},
                     {"offspring", offspring_arg.empty() ? "geometric-half" : offspring_arg},
                     {"seed", c.seed}};
    doc["pmf"] = treepark::pmf_to_json(fp.pmf);
    doc["p"] = fp.pmf.mass[0];
    doc["truncated_mean"] = mean.mean_lower;
    doc["iterations"] = fp.iterations;
    doc["residual"] = fp.residual;
    doc["converged"] = fp.converged;

    if (plane_tree_case) {
        json table = json::array();
        for (int i = 1; i <= 19; ++i) {
            const double s = 0.05 * i;
            const auto gv = treepark::pmf_pgf_eval(fp.pmf, s);
            json row;
            row["s"] = s;
            row["G_pmf"] = gv.value;
            row["tail_bound"] = gv.tail_bound;
            try {
                const double closed = treepark::gen_fn(s, a.value);
                row["G_closed"] = closed;
                row["abs_diff"] = std::fabs(closed - gv.value);
                if (treepark::classify_regime(a.value) == treepark::Regime::Supercritical) {
                    const double p = treepark::p_zero(a.value);
                    row["branch"] = s < treepark::s_switch(a.value, p) ? "Q+" : "Q-";
                } else {
                    row["branch"] = "Q+";
                }
            } catch (const std::exception& e) {
                row["closed_form_error"] = e.what();
            }
            table.push_back(row);
        }
        doc["branch_table"] = table;
    }
    *out.os << doc.dump(2) << "\n";
    return 0;
}

// -------------------------------------------------------- phase-diagram ----

int cmd_phase_diagram(const std::vector<std::string>& alpha_texts,
                      const std::vector<std::uint64_t>& ns, std::uint64_t trials,
                      double curve_step, double curve_max, const CommonOpts& c) {
    if (c.out_path.empty())
        throw std::runtime_error("phase-diagram: --out PREFIX is required (two files)");

    {  // closed-form curve, densely sampled
        Output curve;
        curve.open(c.out_path + "_curve.csv");
        *curve.os << "# "
                  << config_echo("phase-diagram",
                                 {{"curve_step", fmt(curve_step)},
                                  {"curve_max", fmt(curve_max)},
                                  {"seed", std::to_string(c.seed)}})
                  << "\n";
        *curve.os << "alpha,limit_prob\n";
        for (std::uint64_t i = 0;; ++i) {
            const double alpha = curve_step * static_cast<double>(i);
            if (alpha > curve_max + 1e-12) break;
            *curve.os << fmt(alpha) << "," << fmt(treepark::limit_parking_prob(alpha)) << "\n";
        }
    }

    CommonOpts mc = c;
    mc.out_path = c.out_path + "_mc.csv";
    mc.format = "csv";
    return cmd_simulate_finite(alpha_texts, ns, trials, mc);
}

// ----------------------------------------------------------- conjecture ----

int cmd_conjecture(const std::string& offspring_arg, const std::string& family_name,
                   const std::vector<std::string>& alpha_texts, std::size_t K, double tol,
                   std::uint64_t max_iter, double compare_tol, const CommonOpts& c) {
    Output out;
    out.open(c.out_path);
    const treepark::OffspringSpec offspring = parse_offspring_arg(offspring_arg);
    const treepark::ArrivalFamily family = family_name == "two-point"
                                               ? treepark::ArrivalFamily::TwoPoint
                                               : treepark::ArrivalFamily::Poisson;
    std::vector<double> alphas;
    for (const auto& t : alpha_texts) alphas.push_back(treepark::parse_alpha(t).value);

    const auto rep = treepark::conjecture_probe(offspring, family, alphas, K, tol, max_iter,
                                                compare_tol);
    std::vector<std::pair<std::string, std::string>> kv = {
        {"offspring", offspring_arg.empty() ? "geometric-half" : offspring_arg},
        {"arrival_family", family_name},
        {"var_n", fmt(rep.var_n)},
        {"conjectured_alpha_c", fmt(rep.conjectured_alpha_c)},
        {"K", std::to_string(K)},
        {"seed", std::to_string(c.seed)},
        {"format", c.format}};
    emit_config(out, c.format, "conjecture", kv);

    RowSink sink{&out, c.format,
                 {"alpha", "rde_mean", "rde_converged", "conjectured_mean", "abs_diff",
                  "within_tol", "error"}};
    sink.header();
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        sink.row({alpha_texts[i], fmt(r.rde_mean), r.rde_converged ? "1" : "0",
                  r.conjectured_mean ? fmt(*r.conjectured_mean) : "",
                  r.conjectured_mean ? fmt(r.abs_diff) : "",
                  r.conjectured_mean ? (r.within_tol ? "1" : "0") : "", ""});
    }
    return sink.errors ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parking processes on random plane trees: simulation and exact analytics"};
    app.require_subcommand(1);

    // exact
    auto* exact = app.add_subcommand("exact", "closed-form profiles per alpha");
    std::string exact_alpha;
    CommonOpts exact_c;
    exact->add_option("--alpha", exact_alpha, "comma-separated arrival densities")->required();
    add_common(exact, exact_c);

    // simulate-finite
    auto* simf = app.add_subcommand("simulate-finite", "Monte Carlo on uniform n-vertex trees");
    std::string simf_alpha;
    std::string simf_n;
    std::uint64_t simf_trials = 1000;
    CommonOpts simf_c;
    simf->add_option("--alpha", simf_alpha, "comma-separated arrival densities")->required();
    simf->add_option("--n", simf_n, "comma-separated tree sizes")->required();
    simf->add_option("--trials", simf_trials, "trials per (n, alpha) cell")
        ->capture_default_str();
    add_common(simf, simf_c);

    // simulate-limit
    auto* siml = app.add_subcommand("simulate-limit", "Monte Carlo on the limit tree");
    std::string siml_alpha;
    std::uint64_t siml_horizon = 100000, siml_trials = 1000, siml_cap = 10000000;
    bool siml_no_accept = false;
    std::string siml_trace;
    CommonOpts siml_c;
    siml->add_option("--alpha", siml_alpha, "comma-separated arrival densities")->required();
    siml->add_option("--horizon", siml_horizon, "walk steps per trial")->capture_default_str();
    siml->add_option("--trials", siml_trials, "walks per alpha")->capture_default_str();
    siml->add_option("--size-cap", siml_cap, "per-tree vertex cap")->capture_default_str();
    siml->add_flag("--no-early-accept", siml_no_accept,
                   "disable the certified early acceptance below alpha_c");
    siml->add_option("--trace", siml_trace, "write one walk's (n, C_n) CSV here");
    add_common(siml, siml_c);

    // rde
    auto* rde = app.add_subcommand("rde", "distributional fixed point (JSON output)");
    std::string rde_alpha, rde_offspring;
    std::size_t rde_K = 400;
    double rde_tol = 1e-12;
    std::uint64_t rde_max_iter = 100000;
    CommonOpts rde_c;
    rde->add_option("--alpha", rde_alpha, "arrival density")->required();
    rde->add_option("--K", rde_K, "truncation index")->capture_default_str();
    rde->add_option("--tol", rde_tol, "sup-norm stopping tolerance")->capture_default_str();
    rde->add_option("--max-iter", rde_max_iter, "iteration budget")->capture_default_str();
    rde->add_option("--offspring", rde_offspring,
                    "geometric-half, poisson-one, or a JSON spec file");
    add_common(rde, rde_c);

    // phase-diagram
    auto* phase = app.add_subcommand("phase-diagram",
                                     "dense closed-form curve + Monte Carlo sweep");
    std::string phase_alpha, phase_n;
    std::uint64_t phase_trials = 1000;
    double phase_step = 0.002, phase_max = 0.6;
    CommonOpts phase_c;
    phase->add_option("--alpha", phase_alpha, "comma-separated densities for the MC sweep")
        ->required();
    phase->add_option("--n", phase_n, "comma-separated tree sizes for the MC sweep")
        ->required();
    phase->add_option("--trials", phase_trials, "trials per cell")->capture_default_str();
    phase->add_option("--curve-step", phase_step, "alpha spacing of the closed-form curve")
        ->capture_default_str();
    phase->add_option("--curve-max", phase_max, "last alpha of the closed-form curve")
        ->capture_default_str();
    add_common(phase, phase_c);

    // conjecture
    auto* conj = app.add_subcommand("conjecture",
                                    "fixed-point means vs the conjectured closed form");
    std::string conj_alpha, conj_offspring, conj_family = "poisson";
    std::size_t conj_K = 400;
    double conj_tol = 1e-12, conj_cmp = 1e-4;
    std::uint64_t conj_max_iter = 100000;
    CommonOpts conj_c;
    conj->add_option("--alpha", conj_alpha, "comma-separated arrival densities")->required();
    conj->add_option("--offspring", conj_offspring,
                     "geometric-half, poisson-one, or a JSON spec file");
    conj->add_option("--arrival-family", conj_family, "poisson or two-point")
        ->check(CLI::IsMember({"poisson", "two-point"}))
        ->capture_default_str();
    conj->add_option("--K", conj_K, "truncation index")->capture_default_str();
    conj->add_option("--tol", conj_tol, "fixed-point tolerance")->capture_default_str();
    conj->add_option("--max-iter", conj_max_iter, "iteration budget")->capture_default_str();
    conj->add_option("--compare-tol", conj_cmp, "disagreement threshold")
        ->capture_default_str();
    add_common(conj, conj_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // 2 flags a usage problem, 1 is for row errors
    }

    try {
        if (exact->parsed()) return cmd_exact(split_list(exact_alpha), exact_c);
        if (simf->parsed()) {
            std::vector<std::uint64_t> ns;
            for (const auto& t : split_list(simf_n)) ns.push_back(std::stoull(t));
            return cmd_simulate_finite(split_list(simf_alpha), ns, simf_trials, simf_c);
        }
        if (siml->parsed())
            return cmd_simulate_limit(split_list(siml_alpha), siml_horizon, siml_trials,
                                      siml_cap, siml_no_accept, siml_trace, siml_c);
        if (rde->parsed())
            return cmd_rde(rde_alpha, rde_K, rde_tol, rde_max_iter, rde_offspring, rde_c);
        if (phase->parsed()) {
            std::vector<std::uint64_t> ns;
            for (const auto& t : split_list(phase_n)) ns.push_back(std::stoull(t));
            return cmd_phase_diagram(split_list(phase_alpha), ns, phase_trials, phase_step,
                                     phase_max, phase_c);
        }
        if (conj->parsed()) {
            return cmd_conjecture(conj_offspring, conj_family, split_list(conj_alpha), conj_K,
                                  conj_tol, conj_max_iter, conj_cmp, conj_c);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
