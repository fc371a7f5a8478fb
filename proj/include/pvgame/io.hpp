#pragma once

#include "pvgame/conts.hpp"
#include "pvgame/game_spec.hpp"
#include "pvgame/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pvgame {

inline constexpr const char* spec_schema = "pvgame-spec/1";

struct LoadOptions {
    /// Overrides the document's options.residual_completion when set.
    std::optional<bool> residual_completion;
};

struct LoadedSpec {
    GameSpec spec;
    std::vector<std::string> warnings;
};

/// Parses a spec document (JSON, comments allowed). Wildcards are expanded,
/// residual mass completed if enabled, and every GameSpec invariant checked.
/// Throws ValidationError with one "path: message" diagnostic per problem.
LoadedSpec parse_game_spec(const std::string& text, const LoadOptions& opts = {});
LoadedSpec load_game_spec(const std::string& path, const LoadOptions& opts = {});

/// Normal form: explicit matrices and one record per (from, u, v, to).
std::string game_spec_to_json(const GameSpec& spec);

/// One strategy as reported: per vertex the chosen action pair by name.
struct StrategyReport {
    struct StateChoice {
        int state = 0;            // vertex id (least member state id)
        std::vector<int> members; // merged state ids
        std::string attacker;
        std::string defender;
        int next = 0;             // successor vertex id
        double prob = 0.0;
        PayoffPair payoff;
        double social = 0.0;

        bool operator==(const StateChoice&) const = default;
    };

    std::string mode; // "nes" or "sos"
    double beta = 0.0;
    std::string lineage;
    bool truncated = false;
    std::vector<StateChoice> states; // ascending state id

    bool operator==(const StrategyReport&) const = default;
};

std::vector<StrategyReport> make_reports(const ConTSGraph& g, const SolveResult& result, const std::string& mode,
                                         double beta);

enum class ReportFormat { json, text };

/// Strategies in lineage order; "[]" when empty.
std::string strategies_to_json(const std::vector<StrategyReport>& reports);
std::string strategies_to_text(const std::vector<StrategyReport>& reports);
std::vector<StrategyReport> parse_strategy_reports(const std::string& json);

void export_strategy(const std::vector<StrategyReport>& reports, const std::string& path, ReportFormat format);
std::vector<StrategyReport> load_strategy_reports(const std::string& path);

/// GraphViz digraph; edges labelled "u/v p=.. r=(a,d)". With a choice, the
/// chosen edge of every vertex is bold and the others grey.
std::string conts_to_dot(const ConTSGraph& g, const std::vector<std::size_t>* choice = nullptr);
void export_dot(const ConTSGraph& g, const std::string& path, const std::vector<std::size_t>* choice = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace pvgame
