#include "pvgame/value.hpp"

#include "pvgame/errors.hpp"

#include <cmath>
#include <cstdio>

namespace pvgame {

std::string format_number(double x)
{
    if (x == 0.0)
        return "0"; // folds -0
    if (std::nearbyint(x) == x && std::fabs(x) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", x);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool Value::is_unit() const noexcept
{
    const auto* v = std::get_if<std::vector<Value>>(&data_);
    return v != nullptr && v->empty();
}

std::string Value::to_string() const
{
    switch (kind()) {
    case Kind::atom:
        return "@" + as_atom();
    case Kind::number:
        return format_number(as_number());
    case Kind::tuple: {
        std::string out = "(";
        bool first = true;
        for (const auto& e : elements()) {
            if (!first)
                out += ", ";
            first = false;
            out += e.to_string();
        }
        return out + ")";
    }
    }
    return {};
}

// ---------------------------------------------------------------------------

bool ValueExpr::is_closed() const
{
    if (is_variable())
        return false;
    if (is_tuple()) {
        for (const auto& e : elements())
            if (!e.is_closed())
                return false;
    }
    return true;
}

bool ValueExpr::mentions(const std::string& var) const
{
    if (is_variable())
        return variable_name() == var;
    if (is_tuple()) {
        for (const auto& e : elements())
            if (e.mentions(var))
                return true;
    }
    return false;
}

Value ValueExpr::evaluate() const
{
    if (is_variable())
        throw SemanticError("free variable '" + variable_name() + "' in value expression");
    if (is_constant())
        return constant();
    std::vector<Value> out;
    out.reserve(elements().size());
    for (const auto& e : elements())
        out.push_back(e.evaluate());
    return Value::tuple(std::move(out));
}

ValueExpr ValueExpr::substitute(const Substitution& s) const
{
    if (is_variable()) {
        auto it = s.find(variable_name());
        return it == s.end() ? *this : ValueExpr(it->second);
    }
    if (is_constant())
        return *this;
    std::vector<ValueExpr> out;
    out.reserve(elements().size());
    for (const auto& e : elements())
        out.push_back(e.substitute(s));
    return ValueExpr::tuple(std::move(out));
}

std::string ValueExpr::to_string(const std::map<std::string, std::string>* bound) const
{
    if (is_variable()) {
        if (bound != nullptr) {
            auto it = bound->find(variable_name());
            if (it != bound->end())
                return it->second;
        }
        return variable_name();
    }
    if (is_constant())
        return constant().to_string();
    std::string out = "(";
    bool first = true;
    for (const auto& e : elements()) {
        if (!first)
            out += ", ";
        first = false;
        out += e.to_string(bound);
    }
    return out + ")";
}

// ---------------------------------------------------------------------------

BoolExpr BoolExpr::literal(bool b)
{
    BoolExpr e;
    e.op_ = Op::literal;
    e.literal_ = b;
    return e;
}

BoolExpr BoolExpr::equal(ValueExpr lhs, ValueExpr rhs)
{
    BoolExpr e;
    e.op_ = Op::eq;
    e.values_ = {std::move(lhs), std::move(rhs)};
    return e;
}

BoolExpr BoolExpr::not_equal(ValueExpr lhs, ValueExpr rhs)
{
    BoolExpr e = equal(std::move(lhs), std::move(rhs));
    e.op_ = Op::ne;
    return e;
}

BoolExpr BoolExpr::negate(BoolExpr b)
{
    BoolExpr e;
    e.op_ = Op::not_;
    e.children_ = {std::make_shared<const BoolExpr>(std::move(b))};
    return e;
}

BoolExpr BoolExpr::conjunction(BoolExpr lhs, BoolExpr rhs)
{
    BoolExpr e;
    e.op_ = Op::and_;
    e.children_ = {std::make_shared<const BoolExpr>(std::move(lhs)),
                   std::make_shared<const BoolExpr>(std::move(rhs))};
    return e;
}

BoolExpr BoolExpr::disjunction(BoolExpr lhs, BoolExpr rhs)
{
    BoolExpr e = conjunction(std::move(lhs), std::move(rhs));
    e.op_ = Op::or_;
    return e;
}

bool BoolExpr::is_closed() const
{
    for (const auto& v : values_)
        if (!v.is_closed())
            return false;
    for (const auto& c : children_)
        if (!c->is_closed())
            return false;
    return true;
}

bool BoolExpr::mentions(const std::string& var) const
{
    for (const auto& v : values_)
        if (v.mentions(var))
            return true;
    for (const auto& c : children_)
        if (c->mentions(var))
            return true;
    return false;
}

bool BoolExpr::evaluate() const
{
    switch (op_) {
    case Op::literal:
        return literal_;
    case Op::eq:
        return lhs_value().evaluate() == rhs_value().evaluate();
    case Op::ne:
        return !(lhs_value().evaluate() == rhs_value().evaluate());
    case Op::not_:
        return !lhs().evaluate();
    case Op::and_:
        return lhs().evaluate() && rhs().evaluate();
    case Op::or_:
        return lhs().evaluate() || rhs().evaluate();
    }
    return false;
}

BoolExpr BoolExpr::substitute(const Substitution& s) const
{
    BoolExpr e = *this;
    for (auto& v : e.values_)
        v = v.substitute(s);
    for (auto& c : e.children_)
        c = std::make_shared<const BoolExpr>(c->substitute(s));
    return e;
}

std::string BoolExpr::to_string(const std::map<std::string, std::string>* bound) const
{
    auto wrap = [&](const BoolExpr& b) {
        const bool atomic = b.op_ == Op::literal || b.op_ == Op::eq || b.op_ == Op::ne || b.op_ == Op::not_;
        return atomic ? b.to_string(bound) : "(" + b.to_string(bound) + ")";
    };
    switch (op_) {
    case Op::literal:
        return literal_ ? "true" : "false";
    case Op::eq:
        return lhs_value().to_string(bound) + " = " + rhs_value().to_string(bound);
    case Op::ne:
        return lhs_value().to_string(bound) + " != " + rhs_value().to_string(bound);
    case Op::not_:
        return "!" + wrap(lhs());
    case Op::and_:
        return wrap(lhs()) + " && " + wrap(rhs());
    case Op::or_:
        return wrap(lhs()) + " || " + wrap(rhs());
    }
    return {};
}

bool operator==(const BoolExpr& lhs, const BoolExpr& rhs)
{
    if (lhs.op_ != rhs.op_ || lhs.literal_ != rhs.literal_ || lhs.values_ != rhs.values_)
        return false;
    if (lhs.children_.size() != rhs.children_.size())
        return false;
    for (std::size_t i = 0; i < lhs.children_.size(); ++i)
        if (!(*lhs.children_[i] == *rhs.children_[i]))
            return false;
    return true;
}

} // namespace pvgame
