#include "pvgame/parser.hpp"

#include "pvgame/errors.hpp"

#include <cctype>
#include <cstdlib>

namespace pvgame {

namespace {

enum class Tok {
    ident,
    number,
    lparen,
    rparen,
    lbracket,
    rbracket,
    lbrace,
    rbrace,
    comma,
    dot,
    plus,
    bar,
    backslash,
    quote,
    at,
    eq,
    ne,
    and_,
    or_,
    bang,
    slash,
    minus,
    defines,
    semicolon,
    end
};

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::vector<Token> lex(std::string_view src)
{
    std::vector<Token> out;
    std::size_t i = 0;
    std::size_t line = 1;
    std::size_t col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
            while (i < src.size() && src[i] != '\n')
                advance(1);
            continue;
        }
        const std::size_t l = line;
        const std::size_t cl = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            out.push_back({Tok::ident, std::string(src.substr(i, j - i)), l, cl});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                ++j;
            if (j < src.size() && src[j] == '.' && j + 1 < src.size()
                && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                    ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-'))
                    ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                        ++j;
                }
            }
            out.push_back({Tok::number, std::string(src.substr(i, j - i)), l, cl});
            advance(j - i);
            continue;
        }
        auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
        Tok kind;
        std::size_t len = 1;
        if (two('!', '=')) {
            kind = Tok::ne;
            len = 2;
        } else if (two('&', '&')) {
            kind = Tok::and_;
            len = 2;
        } else if (two('|', '|')) {
            kind = Tok::or_;
            len = 2;
        } else if (two(':', '=')) {
            kind = Tok::defines;
            len = 2;
        } else {
            switch (c) {
            case '(': kind = Tok::lparen; break;
            case ')': kind = Tok::rparen; break;
            case '[': kind = Tok::lbracket; break;
            case ']': kind = Tok::rbracket; break;
            case '{': kind = Tok::lbrace; break;
            case '}': kind = Tok::rbrace; break;
            case ',': kind = Tok::comma; break;
            case '.': kind = Tok::dot; break;
            case '+': kind = Tok::plus; break;
            case '|': kind = Tok::bar; break;
            case '\\': kind = Tok::backslash; break;
            case '\'': kind = Tok::quote; break;
            case '@': kind = Tok::at; break;
            case '=': kind = Tok::eq; break;
            case '!': kind = Tok::bang; break;
            case '/': kind = Tok::slash; break;
            case '-': kind = Tok::minus; break;
            case ';': kind = Tok::semicolon; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
            }
        }
        out.push_back({kind, std::string(src.substr(i, len)), l, cl});
        advance(len);
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

bool is_keyword(const std::string& s)
{
    return s == "Nil" || s == "tau" || s == "if" || s == "then" || s == "else" || s == "true" || s == "false";
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    Term whole_process()
    {
        Term t = process();
        expect(Tok::end, "end of input");
        return t;
    }

    ValueExpr whole_value()
    {
        ValueExpr v = value();
        expect(Tok::end, "end of input");
        return v;
    }

    BoolExpr whole_guard()
    {
        BoolExpr b = guard();
        expect(Tok::end, "end of input");
        return b;
    }

    DefinitionEnv definitions()
    {
        DefinitionEnv env;
        while (!at(Tok::end)) {
            const Token& name = expect(Tok::ident, "definition name");
            std::vector<std::string> params;
            if (accept(Tok::lparen)) {
                if (!at(Tok::rparen)) {
                    do {
                        params.push_back(expect(Tok::ident, "parameter name").text);
                    } while (accept(Tok::comma));
                }
                expect(Tok::rparen, "')'");
            }
            expect(Tok::defines, "':='");
            Term body = process();
            expect(Tok::semicolon, "';'");
            try {
                env.define(name.text, std::move(params), std::move(body));
            } catch (const ValidationError& e) {
                throw ParseError(e.what(), name.line, name.column);
            }
        }
        return env;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_ident(const char* word) const { return at(Tok::ident) && peek().text == word; }

    bool accept(Tok k)
    {
        if (!at(k))
            return false;
        ++pos_;
        return true;
    }

    const Token& expect(Tok k, const char* what)
    {
        if (!at(k))
            fail(std::string("expected ") + what + ", found '" + peek().text + "'");
        return toks_[pos_++];
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ParseError(msg, peek().line, peek().column);
    }

    void expect_word(const char* word)
    {
        if (!at_ident(word))
            fail(std::string("expected '") + word + "', found '" + peek().text + "'");
        ++pos_;
    }

    // process ::= restr ('|' restr)*
    Term process()
    {
        Term t = restr();
        while (accept(Tok::bar))
            t = parallel(t, restr());
        return t;
    }

    // restr ::= prim ('\' '{' ident (',' ident)* '}')*
    Term restr()
    {
        Term t = prim();
        while (accept(Tok::backslash)) {
            expect(Tok::lbrace, "'{'");
            std::vector<std::string> chans;
            do {
                chans.push_back(expect(Tok::ident, "channel name").text);
            } while (accept(Tok::comma));
            expect(Tok::rbrace, "'}'");
            t = restrict(t, std::move(chans));
        }
        return t;
    }

    bool starts_summand() const
    {
        if (at(Tok::lbracket) || at(Tok::quote))
            return true;
        if (!at(Tok::ident))
            return false;
        const std::string& w = peek().text;
        if (w == "tau")
            return true;
        if (is_keyword(w))
            return false;
        if (peek(1).kind == Tok::dot)
            return true;
        if (peek(1).kind == Tok::lparen) {
            // a(x). is an input prefix, A(args) a call.
            std::size_t k = 2;
            int depth = 1;
            while (peek(k).kind != Tok::end && depth > 0) {
                if (peek(k).kind == Tok::lparen)
                    ++depth;
                else if (peek(k).kind == Tok::rparen)
                    --depth;
                ++k;
            }
            return peek(k).kind == Tok::dot;
        }
        return false;
    }

    Term prim()
    {
        if (starts_summand())
            return summation();
        return atom_term();
    }

    // Terms allowed bare after a prefix dot or as if-branches.
    Term cont()
    {
        if (starts_summand()) {
            const Token& start = peek();
            Summand s = summand();
            return build_sum({std::move(s)}, start);
        }
        return atom_term();
    }

    Term atom_term()
    {
        if (at_ident("Nil")) {
            ++pos_;
            return nil();
        }
        if (at_ident("if")) {
            ++pos_;
            BoolExpr g = guard();
            expect_word("then");
            Term a = cont();
            expect_word("else");
            Term b = cont();
            return conditional(std::move(g), std::move(a), std::move(b));
        }
        if (accept(Tok::lparen)) {
            Term t = process();
            expect(Tok::rparen, "')'");
            return t;
        }
        if (at(Tok::ident) && !is_keyword(peek().text)) {
            std::string name = toks_[pos_++].text;
            std::vector<ValueExpr> args;
            if (accept(Tok::lparen)) {
                if (!at(Tok::rparen)) {
                    do {
                        args.push_back(value());
                    } while (accept(Tok::comma));
                }
                expect(Tok::rparen, "')'");
            }
            return call(std::move(name), std::move(args));
        }
        fail("expected a process, found '" + peek().text + "'");
    }

    struct Summand {
        std::optional<double> prob;
        ActionLabel action;
        Term next;
        std::size_t line, column;
    };

    Term summation()
    {
        const Token& start = peek();
        std::vector<Summand> parts;
        parts.push_back(summand());
        while (accept(Tok::plus)) {
            if (!starts_summand())
                fail("expected a prefixed summand after '+'");
            parts.push_back(summand());
        }
        return build_sum(std::move(parts), start);
    }

    Summand summand()
    {
        Summand s;
        s.line = peek().line;
        s.column = peek().column;
        if (accept(Tok::lbracket)) {
            s.prob = probability();
            expect(Tok::rbracket, "']'");
        }
        s.action = action();
        expect(Tok::dot, "'.'");
        s.next = cont();
        return s;
    }

    double probability()
    {
        double p = number();
        if (accept(Tok::slash)) {
            const double q = number();
            if (q == 0.0)
                fail("division by zero in probability");
            p /= q;
        }
        return p;
    }

    double number()
    {
        const Token& t = expect(Tok::number, "number");
        return std::strtod(t.text.c_str(), nullptr);
    }

    ActionLabel action()
    {
        if (at_ident("tau")) {
            ++pos_;
            return ActionLabel::tau();
        }
        if (accept(Tok::quote)) {
            std::string chan = expect(Tok::ident, "channel name").text;
            if (!accept(Tok::lparen))
                return ActionLabel::output(std::move(chan));
            std::vector<ValueExpr> vals;
            if (!at(Tok::rparen)) {
                do {
                    vals.push_back(value());
                } while (accept(Tok::comma));
            }
            expect(Tok::rparen, "')'");
            if (vals.size() == 1)
                return ActionLabel::output(std::move(chan), std::move(vals.front()));
            if (vals.empty())
                return ActionLabel::output(std::move(chan));
            return ActionLabel::output(std::move(chan), ValueExpr::tuple(std::move(vals)));
        }
        std::string chan = expect(Tok::ident, "action").text;
        if (accept(Tok::lparen)) {
            std::string var = expect(Tok::ident, "bound variable").text;
            if (is_keyword(var))
                fail("keyword '" + var + "' cannot be a variable");
            expect(Tok::rparen, "')' (an input binds exactly one variable)");
            return ActionLabel::input(std::move(chan), std::move(var));
        }
        // Bare `a.P` abbreviates the value-less output `'a.P`.
        return ActionLabel::output(std::move(chan));
    }

    Term build_sum(std::vector<Summand> parts, const Token& start)
    {
        std::vector<Group> groups;
        std::vector<bool> implicit;
        for (auto& s : parts) {
            std::size_t gi = groups.size();
            for (std::size_t k = 0; k < groups.size(); ++k) {
                if (groups[k].action == s.action) {
                    gi = k;
                    break;
                }
            }
            if (gi < groups.size() && (implicit[gi] || !s.prob))
                throw ParseError("duplicate action prefix '" + s.action.to_string() + "' in one summation", s.line,
                                 s.column);
            if (gi == groups.size()) {
                groups.push_back(Group{s.action, {}});
                implicit.push_back(!s.prob);
            }
            groups[gi].branches.push_back({s.prob.value_or(1.0), std::move(s.next)});
        }
        try {
            return sum(std::move(groups));
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), start.line, start.column);
        }
    }

    // value ::= number | '-' number | '@' ident | ident | '(' [value (',' value)*] ')'
    ValueExpr value()
    {
        if (accept(Tok::minus))
            return ValueExpr(Value::number(-number()));
        if (at(Tok::number))
            return ValueExpr(Value::number(number()));
        if (accept(Tok::at))
            return ValueExpr(Value::atom(expect(Tok::ident, "atom name").text));
        if (accept(Tok::lparen)) {
            std::vector<ValueExpr> vals;
            if (!at(Tok::rparen)) {
                do {
                    vals.push_back(value());
                } while (accept(Tok::comma));
            }
            expect(Tok::rparen, "')'");
            if (vals.size() == 1)
                return std::move(vals.front());
            return tuple_or_constant(std::move(vals));
        }
        if (at(Tok::ident) && !is_keyword(peek().text))
            return ValueExpr::variable(toks_[pos_++].text);
        fail("expected a value, found '" + peek().text + "'");
    }

    // Tuples of constants fold to a constant so printing round-trips.
    static ValueExpr tuple_or_constant(std::vector<ValueExpr> vals)
    {
        std::vector<Value> consts;
        for (const auto& v : vals) {
            if (!v.is_constant())
                return ValueExpr::tuple(std::move(vals));
            consts.push_back(v.constant());
        }
        return ValueExpr(Value::tuple(std::move(consts)));
    }

    BoolExpr guard()
    {
        BoolExpr b = conjunct();
        while (accept(Tok::or_))
            b = BoolExpr::disjunction(std::move(b), conjunct());
        return b;
    }

    BoolExpr conjunct()
    {
        BoolExpr b = unary();
        while (accept(Tok::and_))
            b = BoolExpr::conjunction(std::move(b), unary());
        return b;
    }

    BoolExpr unary()
    {
        if (accept(Tok::bang))
            return BoolExpr::negate(unary());
        if (at_ident("true")) {
            ++pos_;
            return BoolExpr::literal(true);
        }
        if (at_ident("false")) {
            ++pos_;
            return BoolExpr::literal(false);
        }
        if (at(Tok::lparen)) {
            const std::size_t saved = pos_;
            try {
                return comparison();
            } catch (const ParseError&) {
                pos_ = saved;
            }
            ++pos_;
            BoolExpr b = guard();
            expect(Tok::rparen, "')'");
            return b;
        }
        return comparison();
    }

    BoolExpr comparison()
    {
        ValueExpr lhs = value();
        if (accept(Tok::eq))
            return BoolExpr::equal(std::move(lhs), value());
        if (accept(Tok::ne))
            return BoolExpr::not_equal(std::move(lhs), value());
        fail("expected '=' or '!=' in guard");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace

Term parse_process(std::string_view text)
{
    return Parser(text).whole_process();
}

Term parse_process(std::string_view text, const DefinitionEnv& env)
{
    Term t = parse_process(text);
    try {
        check_calls_resolve(t, env);
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), 1, 1);
    }
    return t;
}

DefinitionEnv parse_definitions(std::string_view text)
{
    return Parser(text).definitions();
}

ValueExpr parse_value(std::string_view text)
{
    return Parser(text).whole_value();
}

BoolExpr parse_guard(std::string_view text)
{
    return Parser(text).whole_guard();
}

} // namespace pvgame
