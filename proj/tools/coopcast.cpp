// coopcast — rate regions and a decode-and-forward simulator for discrete
// memoryless broadcast channels with conferencing decoders.
//
// Subcommands:
//   check degraded <channel>            physical-degradedness test
//   region degraded <channel>           degraded-BC region (conference link C12)
//   region marton <channel>             Marton baseline (no conferencing)
//   region marton-coop <channel>        Marton region with conferencing
//   bound cutset <channel>              cut-set outer bound
//   rate common <channel>               common-message rates and bounds (JSON)
//   curve common <channel> --c-grid ..  R(C) for the two-step scheme (CSV)
//   simulate df <channel> --r1 --r2     block-Markov decode-and-forward runs
//   audit <frontier.csv> <witnesses.json>  re-check emitted rows
//
// Channels are JSON files or builtins (builtin:bsbc?p1=&p2=, builtin:bsbc2?p=).
// Frontiers print as CSV on stdout; diagnostics go to stderr. All randomness
// flows from --seed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coopcast/common_message.hpp"
#include "coopcast/degraded.hpp"
#include "coopcast/df_sim.hpp"
#include "coopcast/general.hpp"
#include "coopcast/io.hpp"
#include "coopcast/prob.hpp"

namespace {

using coopcast::json;

struct CommonOpts {
    std::string channel_spec;
    std::optional<double> c12, c21;
    coopcast::OptBudget budget;
    std::string witness_path;
    int card_u = 0, card_v = 0;  // 0 = default |X|
    double tol = 1e-9;
};

void add_channel_arg(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("channel", o.channel_spec,
                    "channel spec file or builtin:... pseudo-path")
        ->required();
    cmd->add_option("--c12", o.c12, "override conference capacity 1->2 (bits/use)");
    cmd->add_option("--c21", o.c21, "override conference capacity 2->1 (bits/use)");
}

void add_budget_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--lambda-count", o.budget.lambda_count, "sweep directions (default 65)");
    cmd->add_option("--grid-res", o.budget.grid_res, "seeding grid resolution (default 9)");
    cmd->add_option("--restarts", o.budget.restarts, "ascent restarts (default 16)");
    cmd->add_option("--tol", o.tol, "numeric tolerance (default 1e-9)");
    cmd->add_option("--seed", o.budget.seed, "PRNG seed (default 0)");
    cmd->add_option("--witnesses", o.witness_path, "write the witness JSON file here");
}

coopcast::BroadcastChannel resolve_channel(const CommonOpts& o) {
    auto ch = coopcast::load_channel(o.channel_spec);
    return ch.with_links(o.c12.value_or(ch.c12), o.c21.value_or(ch.c21));
}

template <class Witness>
void emit_frontier(const coopcast::RateFrontier<Witness>& f, const std::string& region,
                   const coopcast::BroadcastChannel& ch, const CommonOpts& o,
                   const json& params) {
    std::fputs(coopcast::frontier_to_csv(f).c_str(), stdout);
    if (!o.witness_path.empty()) {
        std::ofstream out(o.witness_path);
        if (!out) throw coopcast::parse_error("cannot write '" + o.witness_path + "'");
        out << coopcast::witness_file_json(f, region, ch, params).dump(2) << "\n";
    }
}

json budget_params(const coopcast::OptBudget& b) {
    json p;
    p["lambda_count"] = b.lambda_count;
    p["grid_res"] = b.grid_res;
    p["restarts"] = b.restarts;
    p["seed"] = b.seed;
    return p;
}

std::vector<double> parse_grid(const std::string& s) {
    // "a:b:step" inclusive
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw coopcast::parse_error("--c-grid expects start:stop:step");
    double a, b, step;
    try {
        a = std::stod(s.substr(0, c1));
        b = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
        step = std::stod(s.substr(c2 + 1));
    } catch (...) {
        throw coopcast::parse_error("--c-grid expects numeric start:stop:step");
    }
    if (step <= 0 || b < a) throw coopcast::parse_error("--c-grid: empty grid");
    std::vector<double> g;
    for (double c = a; c <= b + 1e-12; c += step) g.push_back(c);
    return g;
}

std::vector<double> parse_csv_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const std::string tok =
            s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw coopcast::parse_error(std::string(what) + ": bad number '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

json sim_report_json(const coopcast::DfSimReport& r) {
    json j;
    j["n"] = r.n;
    j["m1"] = r.m1;
    j["m2"] = r.m2;
    j["m_r"] = r.m_r;
    j["nominal_r1"] = r.nominal_r1;
    j["nominal_r2"] = r.nominal_r2;
    j["realized_r1"] = r.realized_r1;
    j["realized_r2"] = r.realized_r2;
    j["samples"] = r.samples;
    j["err1"] = r.err1;
    j["err2"] = r.err2;
    j["err_joint"] = r.err_joint;
    j["pe1"] = r.pe1();
    j["pe2"] = r.pe2();
    j["pe"] = r.pe();
    const auto w1 = coopcast::wilson95(r.err1, r.samples);
    const auto w2 = coopcast::wilson95(r.err2, r.samples);
    const auto wj = coopcast::wilson95(r.err_joint, r.samples);
    j["pe1_wilson95"] = json::array({w1.lo, w1.hi});
    j["pe2_wilson95"] = json::array({w2.lo, w2.hi});
    j["pe_wilson95"] = json::array({wj.lo, wj.hi});
    j["pe2_solo"] = r.pe2_solo();
    j["i_u_y2"] = r.i_u_y2;
    if (r.typicality) {
        j["mean_list_size"] = r.mean_list_size();
        j["list_bound"] = r.list_bound();
        j["epsilon"] = r.epsilon;
    }
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"rate regions of broadcast channels with conferencing decoders"};
    app.require_subcommand(1);

    CommonOpts o;

    // --- check degraded
    auto* check = app.add_subcommand("check", "channel property checks");
    check->require_subcommand(1);
    auto* check_deg = check->add_subcommand("degraded", "physical degradedness test");
    add_channel_arg(check_deg, o);
    check_deg->add_option("--tol", o.tol, "fit tolerance (default 1e-9)");

    // --- region ...
    auto* region = app.add_subcommand("region", "trace an achievable-region frontier (CSV)");
    region->require_subcommand(1);
    auto* reg_deg = region->add_subcommand("degraded", "degraded-BC capacity region");
    auto* reg_marton = region->add_subcommand("marton", "Marton baseline region");
    auto* reg_marton_coop =
        region->add_subcommand("marton-coop", "Marton region with conferencing");
    for (auto* cmd : {reg_deg, reg_marton, reg_marton_coop}) {
        add_channel_arg(cmd, o);
        add_budget_flags(cmd, o);
    }
    for (auto* cmd : {reg_marton, reg_marton_coop}) {
        cmd->add_option("--card-u", o.card_u, "auxiliary |U| (default |X|)");
        cmd->add_option("--card-v", o.card_v, "auxiliary |V| (default |X|)");
    }

    // --- bound cutset
    auto* bound = app.add_subcommand("bound", "outer bounds");
    bound->require_subcommand(1);
    auto* bound_cutset = bound->add_subcommand("cutset", "cut-set outer bound");
    add_channel_arg(bound_cutset, o);
    add_budget_flags(bound_cutset, o);

    // --- rate common
    auto* rate = app.add_subcommand("rate", "scalar rates (JSON)");
    rate->require_subcommand(1);
    auto* rate_common = rate->add_subcommand("common", "common-message rates and bounds");
    add_channel_arg(rate_common, o);
    add_budget_flags(rate_common, o);

    // --- curve common
    auto* curve = app.add_subcommand("curve", "rate-vs-capacity curves (CSV)");
    curve->require_subcommand(1);
    auto* curve_common = curve->add_subcommand("common", "two-step common-message R(C)");
    add_channel_arg(curve_common, o);
    add_budget_flags(curve_common, o);
    std::string scheme = "two-step";
    std::string c_grid_spec;
    curve_common->add_option("--scheme", scheme, "scheme (two-step)");
    curve_common->add_option("--c-grid", c_grid_spec, "conference grid start:stop:step")
        ->required();

    // --- simulate df
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulators (JSON)");
    simulate->require_subcommand(1);
    auto* sim_df = simulate->add_subcommand("df", "decode-and-forward block-Markov scheme");
    add_channel_arg(sim_df, o);
    double sim_r1 = 0.0, sim_r2 = 0.0, sim_eps = 0.05;
    int sim_blocks = 8, sim_trials = 1000;
    std::uint64_t sim_seed = 0;
    std::string sim_ngrid = "4,8,12,16", sim_decoder = "ml", sim_pu, sim_pxu;
    bool sim_strict = false;
    sim_df->add_option("--r1", sim_r1, "private rate to receiver 1 (bits/use)")->required();
    sim_df->add_option("--r2", sim_r2, "rate to receiver 2 (bits/use)")->required();
    sim_df->add_option("--n-grid", sim_ngrid, "blocklengths, comma separated (default 4,8,12,16)");
    sim_df->add_option("--blocks", sim_blocks, "blocks B per trial (default 8)");
    sim_df->add_option("--trials", sim_trials, "Monte Carlo trials (default 1000)");
    sim_df->add_option("--seed", sim_seed, "PRNG seed (default 0)");
    sim_df->add_option("--decoder", sim_decoder, "ml | typicality (default ml)");
    sim_df->add_option("--eps", sim_eps, "typicality slack (default 0.05)");
    sim_df->add_flag("--strict", sim_strict, "declare errors on non-unique candidate sets");
    sim_df->add_option("--pu", sim_pu, "auxiliary pmf p(u), comma separated (default uniform)");
    sim_df->add_option("--pxu", sim_pxu,
                       "rows of p(x|u), ';' between rows (default identity)");

    // --- audit
    auto* audit = app.add_subcommand("audit", "re-check an emitted frontier");
    std::string audit_csv, audit_witnesses;
    audit->add_option("frontier", audit_csv, "frontier CSV path")->required();
    audit->add_option("witnesses", audit_witnesses, "witness JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 64;
    }

    o.budget.tol = o.tol;

    if (check_deg->parsed()) {
        const auto ch = resolve_channel(o);
        const auto res = coopcast::is_physically_degraded(ch, o.tol);
        std::fprintf(stderr, "residual %.3e (tol %.3e)\n", res.residual, o.tol);
        std::printf("degraded: %s\n", res.degraded ? "yes" : "no");
        return 0;
    }
    if (reg_deg->parsed()) {
        const auto ch = resolve_channel(o);
        const auto f = coopcast::degraded_region(ch, o.budget);
        emit_frontier(f, "degraded", ch, o, budget_params(o.budget));
        return 0;
    }
    if (reg_marton->parsed() || reg_marton_coop->parsed()) {
        const auto ch = resolve_channel(o);
        const int cu = o.card_u > 0 ? o.card_u : ch.x_size;
        const int cv = o.card_v > 0 ? o.card_v : ch.x_size;
        json params = budget_params(o.budget);
        params["card_u"] = cu;
        params["card_v"] = cv;
        if (reg_marton_coop->parsed()) {
            const auto f = coopcast::marton_coop_region(ch, cu, cv, o.budget);
            emit_frontier(f, "marton-coop", ch, o, params);
        } else {
            const auto f = coopcast::marton_nocoop_region(ch, cu, cv, o.budget);
            emit_frontier(f, "marton", ch, o, params);
        }
        return 0;
    }
    if (bound_cutset->parsed()) {
        const auto ch = resolve_channel(o);
        const auto f = coopcast::cutset_bound(ch, o.budget);
        emit_frontier(f, "cutset", ch, o, budget_params(o.budget));
        return 0;
    }
    if (rate_common->parsed()) {
        const auto ch = resolve_channel(o);
        json out;
        out["channel"] = ch.name.empty() ? o.channel_spec : ch.name;
        out["c12"] = ch.c12;
        out["c21"] = ch.c21;
        coopcast::Pmf arg;
        out["nocoop"] = coopcast::nocoop_common_capacity(ch, o.budget);
        out["upper"] = coopcast::common_upper_bound(ch, o.budget, &arg);
        out["upper_maximizer_px"] = coopcast::pmf_to_json(arg);
        const auto ss = coopcast::single_step_identity_optimized(ch, o.budget, &arg);
        out["single_step"] = {{"rate", ss.rate},
                              {"feasible", ss.feasible},
                              {"slack12", ss.slack12},
                              {"slack21", ss.slack21},
                              {"p_x", coopcast::pmf_to_json(arg)}};
        const auto ts = coopcast::two_step_identity_optimized(ch, o.budget, &arg);
        out["two_step"] = {{"rate", ts.rate},
                           {"scheme", coopcast::to_string(ts.scheme)},
                           {"feasible", ts.feasible},
                           {"p_x", coopcast::pmf_to_json(arg)}};
        const auto smc = coopcast::strong_more_capable_check(ch, o.budget);
        out["strong_more_capable"] = {{"holds", smc.holds},
                                      {"capacity_if_holds", smc.capacity_if_holds},
                                      {"window_ok", smc.window_ok},
                                      {"min_margin", smc.min_margin}};
        std::printf("%s\n", out.dump(2).c_str());
        return 0;
    }
    if (curve_common->parsed()) {
        if (scheme != "two-step")
            throw coopcast::infeasible_error("curve common: unknown scheme '" + scheme + "'");
        const auto ch = resolve_channel(o);
        const auto grid = parse_grid(c_grid_spec);
        // builtins of the two-independent-BSC family use the closed form
        double bsbc2_p = -1.0;
        if (o.channel_spec.rfind("builtin:bsbc2?", 0) == 0) {
            const auto params = coopcast::detail::parse_query(o.channel_spec.substr(14));
            bsbc2_p = coopcast::detail::parse_double(params.at("p"), "p");
        }
        const auto curve_pts = coopcast::corollary_two_step_curve(ch, grid, o.budget, bsbc2_p);
        std::string csv = "c,rate,scheme\n";
        for (const auto& pt : curve_pts) {
            csv += coopcast::format_g17(pt.c);
            csv += ',';
            csv += coopcast::format_g17(pt.rate);
            csv += ',';
            csv += coopcast::to_string(pt.scheme);
            csv += '\n';
        }
        std::fputs(csv.c_str(), stdout);
        return 0;
    }
    if (sim_df->parsed()) {
        const auto ch = resolve_channel(o);
        coopcast::Pmf p_u = sim_pu.empty()
                                ? coopcast::Pmf::uniform(ch.x_size)
                                : coopcast::Pmf(parse_csv_doubles(sim_pu, "--pu"));
        coopcast::Kernel p_x_given_u = coopcast::Kernel::identity(ch.x_size);
        if (!sim_pxu.empty()) {
            std::vector<double> rows;
            int row_len = -1, nrows = 0;
            std::size_t pos = 0;
            while (pos <= sim_pxu.size()) {
                const auto semi = sim_pxu.find(';', pos);
                const auto row = parse_csv_doubles(
                    sim_pxu.substr(pos, semi == std::string::npos ? std::string::npos
                                                                  : semi - pos),
                    "--pxu");
                if (row_len < 0) row_len = static_cast<int>(row.size());
                if (static_cast<int>(row.size()) != row_len)
                    throw coopcast::parse_error("--pxu: ragged rows");
                rows.insert(rows.end(), row.begin(), row.end());
                ++nrows;
                if (semi == std::string::npos) break;
                pos = semi + 1;
            }
            p_x_given_u = coopcast::Kernel(nrows, row_len, std::move(rows));
        }
        coopcast::SimConfig cfg;
        cfg.blocks = sim_blocks;
        cfg.trials = sim_trials;
        cfg.seed = sim_seed;
        cfg.epsilon = sim_eps;
        cfg.strict_ties = sim_strict;
        if (sim_decoder == "ml")
            cfg.decoder = coopcast::SimConfig::Decoder::ml;
        else if (sim_decoder == "typicality")
            cfg.decoder = coopcast::SimConfig::Decoder::typicality;
        else
            throw coopcast::parse_error("--decoder must be ml or typicality");

        json out;
        out["channel"] = ch.name.empty() ? o.channel_spec : ch.name;
        out["c12"] = ch.c12;
        out["r1"] = sim_r1;
        out["r2"] = sim_r2;
        out["blocks"] = cfg.blocks;
        out["trials"] = cfg.trials;
        out["seed"] = sim_seed;
        out["decoder"] = sim_decoder;
        json reports = json::array();
        for (double nd : parse_csv_doubles(sim_ngrid, "--n-grid")) {
            const int n = static_cast<int>(nd);
            if (n < 1 || nd != n) throw coopcast::parse_error("--n-grid: blocklengths must be positive integers");
            auto code = coopcast::generate_code(p_u, p_x_given_u, n, sim_r1, sim_r2, ch.c12,
                                                coopcast::mix_seed(sim_seed, 0xC0DE, n));
            if (code.size_ceiled)
                std::fprintf(stderr,
                             "n=%d: non-integer codebook size ceiled (realized rates %.6f/%.6f)\n",
                             n, code.realized_r1, code.realized_r2);
            reports.push_back(sim_report_json(coopcast::run_df(code, ch, cfg)));
        }
        out["reports"] = std::move(reports);
        std::printf("%s\n", out.dump(2).c_str());
        return 0;
    }
    if (audit->parsed()) {
        std::ifstream csv_in(audit_csv);
        if (!csv_in) throw coopcast::parse_error("cannot open '" + audit_csv + "'");
        std::stringstream ss;
        ss << csv_in.rdbuf();
        std::ifstream wit_in(audit_witnesses);
        if (!wit_in) throw coopcast::parse_error("cannot open '" + audit_witnesses + "'");
        json wj;
        try {
            wit_in >> wj;
        } catch (const json::exception& e) {
            throw coopcast::parse_error(std::string("witness file: ") + e.what());
        }
        const auto res = coopcast::audit_frontier(ss.str(), wj);
        json out;
        out["ok"] = res.ok;
        out["rows"] = res.rows;
        if (!res.ok) out["error"] = res.message;
        std::printf("%s\n", out.dump(2).c_str());
        return res.ok ? 0 : 1;
    }
    return 64;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const coopcast::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const coopcast::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const coopcast::infeasible_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 65;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
