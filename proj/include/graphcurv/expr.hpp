#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graphcurv/jet.hpp"

namespace graphcurv {

enum class Func { Sin, Cos, Tan, Exp, Ln, Sqrt, Sinh, Cosh, Tanh };

const char* func_name(Func f);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree over variables x1..xn. Power nodes carry a
/// constant exponent by construction.
struct Expr {
    enum class Kind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

    Kind kind;
    double constant = 0.0;  // Kind::Constant
    int var = -1;           // Kind::Variable, 0-based
    Func func = Func::Sin;  // Kind::Call
    ExprPtr lhs, rhs;       // children; unary nodes use lhs only

    static ExprPtr make_constant(double v);
    static ExprPtr make_variable(int var);
    static ExprPtr make_negate(ExprPtr a);
    static ExprPtr make_binary(Kind op, ExprPtr a, ExprPtr b);
    static ExprPtr make_call(Func f, ExprPtr a);
};

/// Parses the expression grammar
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := ("-")? power
///   power  := atom ("^" number)?
///   atom   := number | ident | ident "(" expr ")" | "(" expr ")"
///   ident  := "x" digit+ | function-name | "pi" | "e"
/// over variables x1..x`vars`. Whitespace-insensitive, case-sensitive.
/// Throws ParseError with the byte offset of the offending token.
ExprPtr parse(std::string_view text, int vars);

/// Taylor coefficients of the expression at x, exact to `order`.
/// Throws DomainError naming the offending sub-expression and point.
Jet eval_jet(const Expr& e, std::span<const double> x, int order);

/// Plain value evaluation (no derivative bookkeeping).
double eval_value(const Expr& e, std::span<const double> x);

/// Grammar-conform rendering with minimal parentheses.
std::string to_string(const Expr& e);

bool structurally_equal(const Expr& a, const Expr& b);

/// Clone with every variable x_{i+1} replaced by replacements[i].
ExprPtr substitute_variables(const ExprPtr& e,
                             const std::vector<ExprPtr>& replacements);

}  // namespace graphcurv
