#include "pvgame/cli.hpp"

#include "pvgame/abstraction.hpp"
#include "pvgame/comodel.hpp"
#include "pvgame/errors.hpp"
#include "pvgame/io.hpp"
#include "pvgame/oracle.hpp"
#include "pvgame/random_games.hpp"
#include "pvgame/solver.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <ostream>
#include <set>

namespace pvgame {

namespace {

struct Common {
    std::string spec_path;
    bool no_residual = false;
    std::optional<double> beta;
    std::optional<std::size_t> tie_cap;
    std::optional<double> epsilon;
    std::optional<std::size_t> max_iter;
    std::string mode = "nes";
};

void add_spec(CLI::App* cmd, Common& c)
{
    cmd->add_option("spec", c.spec_path, "game spec (JSON)")->required();
    cmd->add_flag("--no-residual", c.no_residual, "do not complete missing row mass with a self-loop");
}

void add_solver_flags(CLI::App* cmd, Common& c)
{
    cmd->add_option("--beta", c.beta, "discount factor in (0,1); overrides the spec");
    cmd->add_option("--mode", c.mode, "nes or sos")->check(CLI::IsMember({"nes", "sos"}));
    cmd->add_option("--tie-cap", c.tie_cap, "maximum number of global strategies");
    cmd->add_option("--epsilon", c.epsilon, "fixpoint tolerance");
    cmd->add_option("--max-iter", c.max_iter, "value-iteration limit");
}

LoadedSpec load(const Common& c, std::ostream& err)
{
    LoadOptions lo;
    if (c.no_residual)
        lo.residual_completion = false;
    LoadedSpec ls = load_game_spec(c.spec_path, lo);
    if (c.beta) {
        if (!(*c.beta > 0.0 && *c.beta < 1.0))
            throw ValidationError("--beta", "discount factor must lie in (0, 1)");
        ls.spec.beta = *c.beta;
    }
    for (const auto& w : ls.warnings)
        err << "warning: " << w << "\n";
    return ls;
}

SolverOptions solver_options(const GameSpec& spec, const Common& c)
{
    SolverOptions o;
    o.tie_cap = c.tie_cap.value_or(spec.options.tie_cap);
    o.epsilon_fix = c.epsilon.value_or(spec.options.epsilon_fix);
    o.max_iter = c.max_iter.value_or(spec.options.max_iter);
    return o;
}

SolveResult run_mode(const std::string& mode, const ConTSGraph& g, double beta, const SolverOptions& o)
{
    const AbsDag abs = build_abstraction(g);
    return mode == "sos" ? alg_sos(abs, g, beta, o) : alg_nes(abs, g, beta, o);
}

std::vector<std::string> keys_of(const ConTSGraph& g, const std::vector<std::vector<std::size_t>>& choices)
{
    std::vector<std::string> out;
    for (const auto& c : choices)
        out.push_back(strategy_key(g, c));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> keys_of(const ConTSGraph& g, const SolveResult& r)
{
    std::vector<std::vector<std::size_t>> c;
    for (const auto& s : r.strategies)
        c.push_back(s.choice);
    return keys_of(g, c);
}

std::string numbered(const std::string& path, std::size_t k, std::size_t total)
{
    if (total == 1)
        return path;
    const auto dot = path.rfind('.');
    const std::string suffix = "-" + std::to_string(k + 1);
    return dot == std::string::npos ? path + suffix : path.substr(0, dot) + suffix + path.substr(dot);
}

int cmd_validate(const Common& c, std::ostream& out, std::ostream& err)
{
    const LoadedSpec ls = load(c, err);
    out << "ok: " << ls.spec.states.size() << " states, beta=" << ls.spec.beta << "\n";
    return exit_code::ok;
}

int cmd_build(const Common& c, const std::string& dot, std::ostream& out, std::ostream& err)
{
    const LoadedSpec ls = load(c, err);
    const SemanticPipeline p = build_conts_semantic(ls.spec);
    out << "game states: " << ls.spec.states.size() << "\n";
    out << "transition system: " << p.ts.lts.lts.num_states() << " states, " << p.ts.lts.lts.transitions().size()
        << " transitions, " << p.partition.num_blocks() << " bisimulation blocks\n";
    out << "merged:";
    const auto merged = merged_states(p.graph);
    if (merged.empty())
        out << " none";
    for (const auto& grp : merged) {
        out << " {";
        for (std::size_t k = 0; k < grp.size(); ++k)
            out << (k ? "," : "") << grp[k];
        out << "}";
    }
    out << "\nConTS: " << p.graph.num_vertices() << " vertices, " << p.graph.num_edges() << " edges\n";
    if (!dot.empty())
        export_dot(p.graph, dot);
    return exit_code::ok;
}

int cmd_solve(const Common& c, const std::string& out_path, const std::string& format, const std::string& dot,
              std::ostream& out, std::ostream& err)
{
    const LoadedSpec ls = load(c, err);
    const ConTSGraph g = build_conts_semantic(ls.spec).graph;
    const SolveResult r = run_mode(c.mode, g, ls.spec.beta, solver_options(ls.spec, c));
    for (const auto& w : r.warnings)
        err << "warning: " << w << "\n";
    const auto reports = make_reports(g, r, c.mode, ls.spec.beta);
    const ReportFormat f = format == "text" ? ReportFormat::text : ReportFormat::json;
    if (out_path.empty()) {
        out << (f == ReportFormat::json ? strategies_to_json(reports) : strategies_to_text(reports));
    } else {
        export_strategy(reports, out_path, f);
        out << r.strategies.size() << " " << c.mode << " strateg" << (r.strategies.size() == 1 ? "y" : "ies")
            << " written to " << out_path << "\n";
    }
    if (!dot.empty()) {
        for (std::size_t k = 0; k < r.strategies.size(); ++k)
            export_dot(g, numbered(dot, k, r.strategies.size()), &r.strategies[k].choice);
    }
    return exit_code::ok;
}

int cmd_oracle_spec(const Common& c, std::ostream& out, std::ostream& err)
{
    const LoadedSpec ls = load(c, err);
    const ConTSGraph g = build_conts_semantic(ls.spec).graph;
    const double beta = ls.spec.beta;
    const auto oracle = c.mode == "sos" ? oracle_sos(g, beta) : oracle_nes(g, beta);
    SolveResult as_result;
    for (const auto& ch : oracle) {
        StrategyMap s;
        s.choice = ch;
        s.payoff = policy_payoffs(g, ch, beta);
        s.social = policy_social(g, ch, beta);
        s.lineage = "oracle";
        as_result.strategies.push_back(std::move(s));
    }
    out << strategies_to_text(make_reports(g, as_result, c.mode, beta));
    return exit_code::ok;
}

int cmd_oracle_fuzz(const Common& c, std::uint64_t seed, std::size_t count, std::ostream& out)
{
    std::mt19937_64 rng(seed);
    const double beta = c.beta.value_or(0.9);
    SolverOptions o;
    o.tie_cap = c.tie_cap.value_or(1u << 20);
    o.epsilon_fix = c.epsilon.value_or(o.epsilon_fix);
    o.max_iter = c.max_iter.value_or(o.max_iter);
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const ConTSGraph g = random_conts(rng);
        std::string verdict;
        try {
            const auto got = keys_of(g, run_mode(c.mode, g, beta, o));
            const auto want = keys_of(g, c.mode == "sos" ? oracle_sos(g, beta) : oracle_nes(g, beta));
            if (got == want)
                continue;
            verdict = std::includes(want.begin(), want.end(), got.begin(), got.end()) ? "solver misses strategies"
                                                                                          : "solver emits non-equilibria";
            verdict += " (" + std::to_string(got.size()) + " vs oracle " + std::to_string(want.size()) + ")";
        } catch (const InvariantViolation& e) {
            verdict = e.what();
        }
        ++mismatches;
        out << "instance " << k << ": " << verdict << "\n";
    }
    out << count - mismatches << "/" << count << " instances agree (" << c.mode << ", seed " << seed << ")\n";
    return mismatches == 0 ? exit_code::ok : exit_code::invariant;
}

int cmd_pipeline_check(const Common& c, std::ostream& out, std::ostream& err)
{
    const LoadedSpec ls = load(c, err);
    const ConTSGraph semantic = build_conts_semantic(ls.spec).graph;
    const ConTSGraph direct = build_conts_direct(ls.spec);
    if (find_isomorphism(semantic, direct)) {
        out << "equivalent: " << semantic.num_vertices() << " vertices, " << semantic.num_edges() << " edges\n";
        return exit_code::ok;
    }
    out << "NOT equivalent: semantic " << semantic.num_vertices() << "/" << semantic.num_edges() << ", direct "
        << direct.num_vertices() << "/" << direct.num_edges() << "\n";
    return exit_code::invariant;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Attack-defence games: model building, bisimulation reduction and equilibrium strategies"};
    app.name("pvgame");
    app.require_subcommand(1);

    Common c;
    std::string dot, out_path, format = "json";
    std::optional<std::uint64_t> seed;
    std::size_t count = 200;

    auto* validate = app.add_subcommand("validate", "check a spec file");
    add_spec(validate, c);

    auto* build = app.add_subcommand("build", "build the ConTS and report the bisimulation");
    add_spec(build, c);
    build->add_option("--dot", dot, "write the ConTS as DOT");

    auto* solve = app.add_subcommand("solve", "compute NES or SOS");
    add_spec(solve, c);
    add_solver_flags(solve, c);
    solve->add_option("--out", out_path, "write strategies here instead of stdout");
    solve->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    solve->add_option("--dot", dot, "write each strategy over the ConTS as DOT");

    auto* oracle = app.add_subcommand("oracle", "brute-force strategies of a spec, or fuzz the solver with --seed");
    oracle->add_option("spec", c.spec_path, "game spec (JSON)");
    oracle->add_flag("--no-residual", c.no_residual, "do not complete missing row mass with a self-loop");
    add_solver_flags(oracle, c);
    oracle->add_option("--seed", seed, "fuzz mode: compare solver and oracle on random graphs");
    oracle->add_option("--count", count, "fuzz mode: number of random graphs");

    auto* check = app.add_subcommand("pipeline-check", "compare the process-based and direct ConTS");
    add_spec(check, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_code::usage;
    }

    try {
        if (*validate)
            return cmd_validate(c, out, err);
        if (*build)
            return cmd_build(c, dot, out, err);
        if (*solve)
            return cmd_solve(c, out_path, format, dot, out, err);
        if (*oracle) {
            if (seed)
                return cmd_oracle_fuzz(c, *seed, count, out);
            if (c.spec_path.empty()) {
                err << "error: oracle needs a spec or --seed\n" << oracle->help();
                return exit_code::usage;
            }
            return cmd_oracle_spec(c, out, err);
        }
        if (*check)
            return cmd_pipeline_check(c, out, err);
    } catch (const ValidationError& e) {
        err << "invalid input:\n";
        for (const auto& d : e.diagnostics())
            err << "  " << d << "\n";
        return exit_code::validation;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return exit_code::validation;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::invariant;
    }
    return exit_code::usage;
}

} // namespace pvgame
