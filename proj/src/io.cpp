#include "pvgame/io.hpp"

#include "pvgame/comodel.hpp"
#include "pvgame/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pvgame {

using nlohmann::json;

namespace {

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

class Reader {
public:
    std::vector<std::string> diagnostics;

    void error(const std::string& path, const std::string& message) { diagnostics.push_back(path + ": " + message); }

    // Complains about keys outside `allowed`.
    void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed)
    {
        for (const auto& [k, v] : obj.items()) {
            bool ok = false;
            for (const char* a : allowed)
                ok = ok || k == a;
            if (!ok)
                error(path + "." + k, "unknown field");
        }
    }

    const json* field(const json& obj, const std::string& path, const char* key, bool required = true)
    {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required)
                error(path + "." + key, "missing");
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const json& j, const std::string& path)
    {
        if (!j.is_number()) {
            error(path, "expected a number");
            return std::nullopt;
        }
        return j.get<double>();
    }

    std::optional<int> integer(const json& j, const std::string& path)
    {
        if (!j.is_number_integer()) {
            error(path, "expected an integer");
            return std::nullopt;
        }
        return j.get<int>();
    }

    std::optional<std::string> string(const json& j, const std::string& path)
    {
        if (!j.is_string()) {
            error(path, "expected a string");
            return std::nullopt;
        }
        return j.get<std::string>();
    }

    // A number, or a string "a/b" with decimal a and b.
    std::optional<double> probability(const json& j, const std::string& path)
    {
        double p = 0.0;
        if (j.is_number()) {
            p = j.get<double>();
        } else if (j.is_string()) {
            const std::string s = j.get<std::string>();
            const auto slash = s.find('/');
            try {
                std::size_t used = 0;
                if (slash == std::string::npos) {
                    p = std::stod(s, &used);
                    if (used != s.size())
                        throw std::invalid_argument(s);
                } else {
                    const std::string num = s.substr(0, slash);
                    const std::string den = s.substr(slash + 1);
                    std::size_t un = 0;
                    std::size_t ud = 0;
                    const double a = std::stod(num, &un);
                    const double b = std::stod(den, &ud);
                    if (un != num.size() || ud != den.size() || b == 0.0)
                        throw std::invalid_argument(s);
                    p = a / b;
                }
            } catch (const std::exception&) {
                error(path, "malformed probability '" + s + "'");
                return std::nullopt;
            }
        } else {
            error(path, "expected a probability (number or \"a/b\")");
            return std::nullopt;
        }
        if (!(p >= 0.0 && p <= 1.0)) {
            error(path, "probability " + fmt(p) + " outside [0, 1]");
            return std::nullopt;
        }
        return p;
    }

    std::vector<std::string> names(const json& j, const std::string& path)
    {
        std::vector<std::string> out;
        if (!j.is_array()) {
            error(path, "expected an array of action names");
            return out;
        }
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (auto s = string(j[k], path + "[" + std::to_string(k) + "]"))
                out.push_back(*s);
        }
        return out;
    }
};

struct MatrixRef {
    bool negate = false;
    int state = 0;
    std::string player;
};

struct RawState {
    int id = 0;
    std::string name;
    std::vector<std::string> attacker, defender;
    // Literal matrices, or references resolved after all states are read.
    std::optional<std::vector<std::vector<double>>> matrix[2];
    std::optional<MatrixRef> ref[2];
};

const char* player_key(int k) { return k == 0 ? "attacker" : "defender"; }

void read_matrix(Reader& r, const json& j, const std::string& path, std::size_t rows, std::size_t cols,
                 RawState& st, int k)
{
    if (j.is_object()) {
        r.keys(j, path, {"negate", "copy", "state"});
        const bool neg = j.contains("negate");
        const bool copy = j.contains("copy");
        if (neg == copy) {
            r.error(path, "reference needs exactly one of \"negate\" or \"copy\"");
            return;
        }
        MatrixRef ref;
        ref.negate = neg;
        auto player = r.string(j.at(neg ? "negate" : "copy"), path + (neg ? ".negate" : ".copy"));
        if (!player)
            return;
        if (*player != "attacker" && *player != "defender") {
            r.error(path, "reference must name \"attacker\" or \"defender\"");
            return;
        }
        ref.player = *player;
        ref.state = st.id;
        if (const json* s = r.field(j, path, "state", false)) {
            if (auto id = r.integer(*s, path + ".state"))
                ref.state = *id;
        }
        st.ref[k] = ref;
        return;
    }
    if (!j.is_array()) {
        r.error(path, "expected a matrix (array of rows) or a reference object");
        return;
    }
    if (j.size() != rows) {
        r.error(path, "expected " + std::to_string(rows) + " rows (one per attacker action), got " +
                          std::to_string(j.size()));
        return;
    }
    std::vector<std::vector<double>> m(rows);
    for (std::size_t u = 0; u < rows; ++u) {
        const std::string rp = path + "[" + std::to_string(u) + "]";
        if (j[u].is_number()) {
            m[u].assign(cols, j[u].get<double>());
            continue;
        }
        if (!j[u].is_array() || j[u].size() != cols) {
            r.error(rp, "expected " + std::to_string(cols) + " entries (one per defender action) or one number");
            return;
        }
        for (std::size_t v = 0; v < cols; ++v) {
            auto x = r.number(j[u][v], rp + "[" + std::to_string(v) + "]");
            if (!x)
                return;
            m[u].push_back(*x);
        }
    }
    st.matrix[k] = std::move(m);
}

// Action index (1-based in the document) or the wildcard.
std::optional<std::vector<std::size_t>> read_action(Reader& r, const json& j, const std::string& path,
                                                    std::size_t count)
{
    if (j.is_string() && (j.get<std::string>() == "*" || j.get<std::string>() == "·")) {
        std::vector<std::size_t> all(count);
        for (std::size_t k = 0; k < count; ++k)
            all[k] = k;
        return all;
    }
    if (!j.is_number_integer()) {
        r.error(path, "expected an action number (1-based) or \"*\"");
        return std::nullopt;
    }
    const int k = j.get<int>();
    if (k < 1 || static_cast<std::size_t>(k) > count) {
        r.error(path, "action " + std::to_string(k) + " out of range 1.." + std::to_string(count));
        return std::nullopt;
    }
    return std::vector<std::size_t>{static_cast<std::size_t>(k - 1)};
}

} // namespace

LoadedSpec parse_game_spec(const std::string& text, const LoadOptions& opts)
{
    json doc;
    try {
        doc = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ValidationError("$", std::string("malformed JSON: ") + e.what());
    }
    Reader r;
    if (!doc.is_object())
        throw ValidationError("$", "expected an object");
    r.keys(doc, "$", {"schema", "description", "beta", "options", "states", "transitions"});
    if (const json* s = r.field(doc, "$", "schema")) {
        if (!s->is_string() || s->get<std::string>() != spec_schema)
            r.error("$.schema", std::string("expected \"") + spec_schema + "\"");
    }

    LoadedSpec out;
    GameSpec& spec = out.spec;
    if (const json* b = r.field(doc, "$", "beta", false)) {
        if (auto x = r.number(*b, "$.beta")) {
            if (!(*x > 0.0 && *x < 1.0))
                r.error("$.beta", "discount factor must lie in (0, 1)");
            spec.beta = *x;
        }
    }
    if (const json* o = r.field(doc, "$", "options", false)) {
        if (!o->is_object()) {
            r.error("$.options", "expected an object");
        } else {
            r.keys(*o, "$.options", {"residual_completion", "tie_cap", "epsilon_sum", "epsilon_fix", "max_iter"});
            if (o->contains("residual_completion")) {
                if (!o->at("residual_completion").is_boolean())
                    r.error("$.options.residual_completion", "expected a boolean");
                else
                    spec.options.residual_completion = o->at("residual_completion").get<bool>();
            }
            for (const char* k : {"tie_cap", "max_iter"}) {
                if (!o->contains(k))
                    continue;
                auto x = r.integer(o->at(k), std::string("$.options.") + k);
                if (x && *x < 1)
                    r.error(std::string("$.options.") + k, "must be positive");
                else if (x)
                    (std::string(k) == "tie_cap" ? spec.options.tie_cap : spec.options.max_iter) =
                        static_cast<std::size_t>(*x);
            }
            for (const char* k : {"epsilon_sum", "epsilon_fix"}) {
                if (!o->contains(k))
                    continue;
                auto x = r.number(o->at(k), std::string("$.options.") + k);
                if (x && !(*x > 0.0))
                    r.error(std::string("$.options.") + k, "must be positive");
                else if (x)
                    (std::string(k) == "epsilon_sum" ? spec.options.epsilon_sum : spec.options.epsilon_fix) = *x;
            }
        }
    }
    if (opts.residual_completion)
        spec.options.residual_completion = *opts.residual_completion;

    std::vector<RawState> raw;
    std::map<int, std::size_t> by_id;
    if (const json* states = r.field(doc, "$", "states")) {
        if (!states->is_array() || states->empty())
            r.error("$.states", "expected a non-empty array");
        else {
            for (std::size_t i = 0; i < states->size(); ++i) {
                const std::string path = "states[" + std::to_string(i) + "]";
                const json& js = (*states)[i];
                if (!js.is_object()) {
                    r.error(path, "expected an object");
                    continue;
                }
                r.keys(js, path, {"id", "name", "attacker_actions", "defender_actions", "payoff"});
                RawState st;
                if (const json* id = r.field(js, path, "id")) {
                    if (auto x = r.integer(*id, path + ".id")) {
                        st.id = *x;
                        if (!by_id.emplace(st.id, i).second)
                            r.error(path + ".id", "duplicate state id " + std::to_string(st.id));
                    }
                }
                if (const json* n = r.field(js, path, "name"))
                    st.name = r.string(*n, path + ".name").value_or("");
                if (const json* a = r.field(js, path, "attacker_actions"))
                    st.attacker = r.names(*a, path + ".attacker_actions");
                if (const json* d = r.field(js, path, "defender_actions"))
                    st.defender = r.names(*d, path + ".defender_actions");
                if (const json* p = r.field(js, path, "payoff")) {
                    if (!p->is_object()) {
                        r.error(path + ".payoff", "expected an object");
                    } else {
                        r.keys(*p, path + ".payoff", {"attacker", "defender"});
                        for (int k = 0; k < 2; ++k) {
                            const std::string mp = path + ".payoff." + player_key(k);
                            if (const json* m = r.field(*p, path + ".payoff", player_key(k)))
                                read_matrix(r, *m, mp, st.attacker.size(), st.defender.size(), st, k);
                        }
                    }
                }
                raw.push_back(std::move(st));
            }
        }
    }

    // Resolve matrix references; chains are followed, cycles reported.
    for (std::size_t pass = 0; pass <= 2 * raw.size(); ++pass) {
        bool progress = false;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            for (int k = 0; k < 2; ++k) {
                if (raw[i].matrix[k] || !raw[i].ref[k])
                    continue;
                const MatrixRef& ref = *raw[i].ref[k];
                auto it = by_id.find(ref.state);
                const std::string path = "states[" + std::to_string(i) + "].payoff." + player_key(k);
                if (it == by_id.end()) {
                    r.error(path, "reference to unknown state " + std::to_string(ref.state));
                    raw[i].ref[k].reset();
                    continue;
                }
                const int src = ref.player == "attacker" ? 0 : 1;
                const auto& m = raw[it->second].matrix[src];
                if (!m)
                    continue;
                if (m->size() != raw[i].attacker.size() ||
                    (!m->empty() && m->front().size() != raw[i].defender.size())) {
                    r.error(path, "referenced matrix has the wrong dimensions");
                    raw[i].ref[k].reset();
                    continue;
                }
                auto copy = *m;
                if (ref.negate) {
                    for (auto& row : copy)
                        for (auto& x : row)
                            x = -x;
                }
                raw[i].matrix[k] = std::move(copy);
                progress = true;
            }
        }
        if (!progress)
            break;
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
        for (int k = 0; k < 2; ++k) {
            if (!raw[i].matrix[k] && raw[i].ref[k])
                r.error("states[" + std::to_string(i) + "].payoff." + player_key(k), "circular matrix reference");
        }
    }

    for (const auto& st : raw) {
        GameState s;
        s.id = st.id;
        s.name = st.name;
        s.attacker_actions = st.attacker;
        s.defender_actions = st.defender;
        s.payoff.assign(st.attacker.size(), std::vector<PayoffPair>(st.defender.size()));
        s.transitions.assign(st.attacker.size(), std::vector<std::vector<Outcome>>(st.defender.size()));
        for (std::size_t u = 0; u < st.attacker.size(); ++u) {
            for (std::size_t v = 0; v < st.defender.size(); ++v) {
                if (st.matrix[0] && u < st.matrix[0]->size() && v < (*st.matrix[0])[u].size())
                    s.payoff[u][v].attacker = (*st.matrix[0])[u][v];
                if (st.matrix[1] && u < st.matrix[1]->size() && v < (*st.matrix[1])[u].size())
                    s.payoff[u][v].defender = (*st.matrix[1])[u][v];
            }
        }
        spec.states.push_back(std::move(s));
    }

    if (const json* ts = r.field(doc, "$", "transitions")) {
        if (!ts->is_array()) {
            r.error("$.transitions", "expected an array");
        } else {
            for (std::size_t t = 0; t < ts->size(); ++t) {
                const std::string path = "transitions[" + std::to_string(t) + "]";
                const json& jt = (*ts)[t];
                if (!jt.is_object()) {
                    r.error(path, "expected an object");
                    continue;
                }
                r.keys(jt, path, {"from", "attacker", "defender", "to", "p"});
                const json* from = r.field(jt, path, "from");
                const json* to = r.field(jt, path, "to");
                const json* a = r.field(jt, path, "attacker");
                const json* d = r.field(jt, path, "defender");
                const json* p = r.field(jt, path, "p");
                if (!from || !to || !a || !d || !p)
                    continue;
                auto fid = r.integer(*from, path + ".from");
                auto tid = r.integer(*to, path + ".to");
                if (!fid || !tid)
                    continue;
                auto fi = by_id.find(*fid);
                auto ti = by_id.find(*tid);
                if (fi == by_id.end()) {
                    r.error(path + ".from", "unknown state " + std::to_string(*fid));
                    continue;
                }
                if (ti == by_id.end()) {
                    r.error(path + ".to", "unknown state " + std::to_string(*tid));
                    continue;
                }
                GameState& s = spec.states[fi->second];
                auto us = read_action(r, *a, path + ".attacker", s.num_attacker());
                auto vs = read_action(r, *d, path + ".defender", s.num_defender());
                auto prob = r.probability(*p, path + ".p");
                if (!us || !vs || !prob)
                    continue;
                if (*prob == 0.0)
                    continue;
                for (std::size_t u : *us)
                    for (std::size_t v : *vs)
                        add_outcome(s, u, v, ti->second, *prob);
            }
        }
    }

    if (!r.diagnostics.empty())
        throw ValidationError(r.diagnostics);
    if (spec.options.residual_completion)
        complete_residual_mass(spec);
    validate_game_spec(spec, true);
    out.warnings = weight_convention_warnings(build_conts_direct(spec));
    return out;
}

LoadedSpec load_game_spec(const std::string& path, const LoadOptions& opts)
{
    return parse_game_spec(read_file(path), opts);
}

std::string game_spec_to_json(const GameSpec& spec)
{
    json doc;
    doc["schema"] = spec_schema;
    doc["beta"] = spec.beta;
    doc["options"] = {{"residual_completion", spec.options.residual_completion},
                      {"tie_cap", spec.options.tie_cap},
                      {"epsilon_sum", spec.options.epsilon_sum},
                      {"epsilon_fix", spec.options.epsilon_fix},
                      {"max_iter", spec.options.max_iter}};
    json states = json::array();
    json transitions = json::array();
    for (const auto& s : spec.states) {
        json a = json::array();
        json d = json::array();
        for (std::size_t u = 0; u < s.num_attacker(); ++u) {
            json ra = json::array();
            json rd = json::array();
            for (std::size_t v = 0; v < s.num_defender(); ++v) {
                ra.push_back(s.payoff[u][v].attacker);
                rd.push_back(s.payoff[u][v].defender);
                for (const auto& o : s.transitions[u][v])
                    transitions.push_back({{"from", s.id},
                                           {"attacker", u + 1},
                                           {"defender", v + 1},
                                           {"to", spec.states[o.target].id},
                                           {"p", o.prob}});
            }
            a.push_back(ra);
            d.push_back(rd);
        }
        states.push_back({{"id", s.id},
                          {"name", s.name},
                          {"attacker_actions", s.attacker_actions},
                          {"defender_actions", s.defender_actions},
                          {"payoff", {{"attacker", a}, {"defender", d}}}});
    }
    doc["states"] = states;
    doc["transitions"] = transitions;
    return doc.dump(2) + "\n";
}

std::vector<StrategyReport> make_reports(const ConTSGraph& g, const SolveResult& result, const std::string& mode,
                                         double beta)
{
    std::vector<StrategyReport> out;
    for (const auto& s : result.strategies) {
        StrategyReport r;
        r.mode = mode;
        r.beta = beta;
        r.lineage = s.lineage;
        r.truncated = result.truncated;
        for (std::size_t v = 0; v < g.num_vertices(); ++v) {
            const auto& e = g.edge(s.choice[v]);
            StrategyReport::StateChoice c;
            c.state = g.vertex(v).id;
            c.members = g.vertex(v).members;
            c.attacker = g.attacker_name(e);
            c.defender = g.defender_name(e);
            c.next = g.vertex(e.dst).id;
            c.prob = e.prob;
            c.payoff = s.payoff[v];
            c.social = s.social[v];
            r.states.push_back(std::move(c));
        }
        std::sort(r.states.begin(), r.states.end(),
                  [](const auto& a, const auto& b) { return a.state < b.state; });
        out.push_back(std::move(r));
    }
    return out;
}

std::string strategies_to_json(const std::vector<StrategyReport>& reports)
{
    json arr = json::array();
    for (const auto& r : reports) {
        json states = json::array();
        for (const auto& c : r.states)
            states.push_back({{"state", c.state},
                              {"members", c.members},
                              {"attacker", c.attacker},
                              {"defender", c.defender},
                              {"next", c.next},
                              {"p", c.prob},
                              {"payoff", {{"attacker", c.payoff.attacker}, {"defender", c.payoff.defender}}},
                              {"social", c.social}});
        arr.push_back({{"mode", r.mode},
                       {"beta", r.beta},
                       {"lineage", r.lineage},
                       {"truncated", r.truncated},
                       {"states", states}});
    }
    return arr.empty() ? std::string("[]\n") : arr.dump(2) + "\n";
}

std::string strategies_to_text(const std::vector<StrategyReport>& reports)
{
    std::ostringstream os;
    if (reports.empty())
        os << "no strategies\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
        const auto& r = reports[k];
        os << "strategy " << k + 1 << " (" << r.mode << ", beta=" << fmt(r.beta) << ", lineage " << r.lineage
           << (r.truncated ? ", truncated" : "") << ")\n";
        for (const auto& c : r.states) {
            os << "  state " << c.state;
            if (c.members.size() > 1) {
                os << " {";
                for (std::size_t m = 0; m < c.members.size(); ++m)
                    os << (m ? "," : "") << c.members[m];
                os << "}";
            }
            os << ": " << c.attacker << " / " << c.defender << " -> " << c.next << " [p=" << fmt(c.prob)
               << "] payoff=(" << fmt(c.payoff.attacker) << ", " << fmt(c.payoff.defender)
               << ") social=" << fmt(c.social) << "\n";
        }
    }
    return os.str();
}

std::vector<StrategyReport> parse_strategy_reports(const std::string& text)
{
    std::vector<StrategyReport> out;
    try {
        const json arr = json::parse(text);
        if (!arr.is_array())
            throw ValidationError("$", "expected an array of strategies");
        for (const auto& j : arr) {
            StrategyReport r;
            r.mode = j.at("mode").get<std::string>();
            r.beta = j.at("beta").get<double>();
            r.lineage = j.at("lineage").get<std::string>();
            r.truncated = j.at("truncated").get<bool>();
            for (const auto& s : j.at("states")) {
                StrategyReport::StateChoice c;
                c.state = s.at("state").get<int>();
                c.members = s.at("members").get<std::vector<int>>();
                c.attacker = s.at("attacker").get<std::string>();
                c.defender = s.at("defender").get<std::string>();
                c.next = s.at("next").get<int>();
                c.prob = s.at("p").get<double>();
                c.payoff = {s.at("payoff").at("attacker").get<double>(), s.at("payoff").at("defender").get<double>()};
                c.social = s.at("social").get<double>();
                r.states.push_back(std::move(c));
            }
            out.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw ValidationError("$", std::string("malformed strategy report: ") + e.what());
    }
    return out;
}

void export_strategy(const std::vector<StrategyReport>& reports, const std::string& path, ReportFormat format)
{
    write_file(path, format == ReportFormat::json ? strategies_to_json(reports) : strategies_to_text(reports));
}

std::vector<StrategyReport> load_strategy_reports(const std::string& path)
{
    return parse_strategy_reports(read_file(path));
}

namespace {

std::string dot_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string conts_to_dot(const ConTSGraph& g, const std::vector<std::size_t>* choice)
{
    std::ostringstream os;
    os << "digraph conts {\n  node [shape=circle];\n";
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        const auto& vx = g.vertex(v);
        std::string members;
        for (std::size_t m = 0; m < vx.members.size(); ++m)
            members += (m ? "," : "") + std::to_string(vx.members[m]);
        os << "  s" << vx.id << " [label=\"" << members << "\\n" << dot_escape(vx.name) << "\"];\n";
    }
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        const auto& e = g.edge(i);
        os << "  s" << g.vertex(e.src).id << " -> s" << g.vertex(e.dst).id << " [label=\"" << e.attacker + 1 << "/"
           << e.defender + 1 << " p=" << fmt(e.prob) << " r=(" << fmt(e.weight.attacker) << ","
           << fmt(e.weight.defender) << ")\"";
        if (choice != nullptr)
            os << ((*choice)[e.src] == i ? ", style=bold" : ", color=grey, fontcolor=grey");
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

void export_dot(const ConTSGraph& g, const std::string& path, const std::vector<std::size_t>* choice)
{
    write_file(path, conts_to_dot(g, choice));
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    out << content;
    if (!out)
        throw Error("write failed: " + path);
}

} // namespace pvgame
