#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pvgame {

/// Symbolic constant such as an action code. Written `@name` in the grammar.
struct Atom {
    std::string name;
    auto operator<=>(const Atom&) const = default;
};

/// Closed value: an atom, a real number, or a tuple of values.
class Value {
public:
    enum class Kind { atom, number, tuple };

    Value() : data_(std::vector<Value>{}) {}

    static Value atom(std::string name) { return Value(Atom{std::move(name)}); }
    static Value number(double x) { return Value(x); }
    static Value tuple(std::vector<Value> elements) { return Value(std::move(elements)); }
    static Value pair(double first, double second)
    {
        return tuple({number(first), number(second)});
    }
    static Value unit() { return Value(); }

    Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
    bool is_unit() const noexcept;

    const std::string& as_atom() const { return std::get<Atom>(data_).name; }
    double as_number() const { return std::get<double>(data_); }
    const std::vector<Value>& elements() const { return std::get<std::vector<Value>>(data_); }

    /// Concrete syntax, e.g. `@a1`, `-10`, `(10, -10)`. Numbers use %.17g.
    std::string to_string() const;

    friend bool operator==(const Value& lhs, const Value& rhs) { return lhs.data_ == rhs.data_; }
    friend bool operator<(const Value& lhs, const Value& rhs) { return lhs.data_ < rhs.data_; }

private:
    explicit Value(Atom a) : data_(std::move(a)) {}
    explicit Value(double x) : data_(x) {}
    explicit Value(std::vector<Value> v) : data_(std::move(v)) {}

    std::variant<Atom, double, std::vector<Value>> data_;
};

std::string format_number(double x);

using Substitution = std::map<std::string, Value>;

/// Value expression over variables, constants and tuples.
class ValueExpr {
public:
    struct Var {
        std::string name;
        bool operator==(const Var&) const = default;
    };

    ValueExpr() : node_(Value::unit()) {}
    ValueExpr(Value constant) : node_(std::move(constant)) {}

    static ValueExpr variable(std::string name) { return ValueExpr(Var{std::move(name)}); }
    static ValueExpr tuple(std::vector<ValueExpr> elements) { return ValueExpr(std::move(elements)); }

    bool is_variable() const noexcept { return std::holds_alternative<Var>(node_); }
    bool is_constant() const noexcept { return std::holds_alternative<Value>(node_); }
    bool is_tuple() const noexcept { return std::holds_alternative<std::vector<ValueExpr>>(node_); }

    const std::string& variable_name() const { return std::get<Var>(node_).name; }
    const Value& constant() const { return std::get<Value>(node_); }
    const std::vector<ValueExpr>& elements() const { return std::get<std::vector<ValueExpr>>(node_); }

    bool is_closed() const;
    bool mentions(const std::string& var) const;

    /// Evaluates a closed expression; throws SemanticError on a free variable.
    Value evaluate() const;

    ValueExpr substitute(const Substitution& s) const;

    /// Concrete syntax. `bound` maps variable names to replacement spellings
    /// (used for alpha-canonical printing).
    std::string to_string(const std::map<std::string, std::string>* bound = nullptr) const;

    friend bool operator==(const ValueExpr& lhs, const ValueExpr& rhs) { return lhs.node_ == rhs.node_; }

private:
    explicit ValueExpr(Var v) : node_(std::move(v)) {}
    explicit ValueExpr(std::vector<ValueExpr> v) : node_(std::move(v)) {}

    std::variant<Value, Var, std::vector<ValueExpr>> node_;
};

/// Boolean guard: literals, (in)equality tests, negation, conjunction and
/// disjunction.
class BoolExpr {
public:
    enum class Op { literal, eq, ne, not_, and_, or_ };

    static BoolExpr literal(bool b);
    static BoolExpr equal(ValueExpr lhs, ValueExpr rhs);
    static BoolExpr not_equal(ValueExpr lhs, ValueExpr rhs);
    static BoolExpr negate(BoolExpr b);
    static BoolExpr conjunction(BoolExpr lhs, BoolExpr rhs);
    static BoolExpr disjunction(BoolExpr lhs, BoolExpr rhs);

    Op op() const noexcept { return op_; }
    bool literal_value() const noexcept { return literal_; }
    const ValueExpr& lhs_value() const { return values_.at(0); }
    const ValueExpr& rhs_value() const { return values_.at(1); }
    const BoolExpr& lhs() const { return *children_.at(0); }
    const BoolExpr& rhs() const { return *children_.at(1); }

    bool is_closed() const;
    bool mentions(const std::string& var) const;
    bool evaluate() const;
    BoolExpr substitute(const Substitution& s) const;
    std::string to_string(const std::map<std::string, std::string>* bound = nullptr) const;

    friend bool operator==(const BoolExpr& lhs, const BoolExpr& rhs);

private:
    BoolExpr() = default;

    Op op_ = Op::literal;
    bool literal_ = true;
    std::vector<ValueExpr> values_;
    std::vector<std::shared_ptr<const BoolExpr>> children_;
};

} // namespace pvgame
