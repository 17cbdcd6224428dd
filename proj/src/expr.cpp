#include "graphcurv/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "graphcurv/errors.hpp"

namespace graphcurv {

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Sqrt: return "sqrt";
        case Func::Sinh: return "sinh";
        case Func::Cosh: return "cosh";
        case Func::Tanh: return "tanh";
    }
    return "?";
}

ExprPtr Expr::make_constant(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Constant;
    e->constant = v;
    return e;
}

ExprPtr Expr::make_variable(int var) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Variable;
    e->var = var;
    return e;
}

ExprPtr Expr::make_negate(ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Negate;
    e->lhs = std::move(a);
    return e;
}

ExprPtr Expr::make_binary(Kind op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

ExprPtr Expr::make_call(Func f, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Call;
    e->func = f;
    e->lhs = std::move(a);
    return e;
}

namespace {

struct Token {
    enum Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Type type;
    double num = 0.0;
    std::string text;
    std::size_t offset = 0;
};

class Lexer {
public:
    Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        tok_.offset = pos_;
        if (pos_ >= text_.size()) {
            tok_.type = Token::End;
            return;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                    text_[pos_] == '_'))
                ++pos_;
            tok_.type = Token::Ident;
            tok_.text.assign(text_.substr(start, pos_ - start));
            return;
        }
        ++pos_;
        switch (c) {
            case '+': tok_.type = Token::Plus; return;
            case '-': tok_.type = Token::Minus; return;
            case '*': tok_.type = Token::Star; return;
            case '/': tok_.type = Token::Slash; return;
            case '^': tok_.type = Token::Caret; return;
            case '(': tok_.type = Token::LParen; return;
            case ')': tok_.type = Token::RParen; return;
        }
        throw ParseError(ParseError::Kind::Syntax,
                         std::string("unexpected character '") + c + "'",
                         tok_.offset);
    }

    void lex_number() {
        std::size_t end = pos_;
        while (end < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[end])))
            ++end;
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            while (end < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[end])))
                ++end;
        }
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t mark = end + 1;
            if (mark < text_.size() && (text_[mark] == '+' || text_[mark] == '-'))
                ++mark;
            if (mark < text_.size() &&
                std::isdigit(static_cast<unsigned char>(text_[mark]))) {
                end = mark;
                while (end < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[end])))
                    ++end;
            }
        }
        double value = 0.0;
        auto res = std::from_chars(text_.data() + pos_, text_.data() + end, value);
        if (res.ec != std::errc())
            throw ParseError(ParseError::Kind::Syntax, "malformed number", pos_);
        tok_.type = Token::Number;
        tok_.num = value;
        pos_ = end;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    Token tok_;
};

class Parser {
public:
    Parser(std::string_view text, int vars) : lex_(text), vars_(vars) {}

    ExprPtr run() {
        ExprPtr e = parse_expr();
        if (lex_.peek().type != Token::End)
            throw ParseError(ParseError::Kind::Syntax, "unexpected trailing input",
                             lex_.peek().offset);
        return e;
    }

private:
    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        while (lex_.peek().type == Token::Plus ||
               lex_.peek().type == Token::Minus) {
            Token op = lex_.take();
            ExprPtr r = parse_term();
            e = Expr::make_binary(op.type == Token::Plus ? Expr::Kind::Add
                                                         : Expr::Kind::Sub,
                                  std::move(e), std::move(r));
        }
        return e;
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        while (lex_.peek().type == Token::Star ||
               lex_.peek().type == Token::Slash) {
            Token op = lex_.take();
            ExprPtr r = parse_factor();
            e = Expr::make_binary(op.type == Token::Star ? Expr::Kind::Mul
                                                         : Expr::Kind::Div,
                                  std::move(e), std::move(r));
        }
        return e;
    }

    ExprPtr parse_factor() {
        if (lex_.peek().type == Token::Minus) {
            lex_.take();
            ExprPtr inner = parse_power();
            if (inner->kind == Expr::Kind::Constant)
                return Expr::make_constant(-inner->constant);
            return Expr::make_negate(std::move(inner));
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        if (lex_.peek().type == Token::Caret) {
            lex_.take();
            if (lex_.peek().type != Token::Number)
                throw ParseError(ParseError::Kind::NonConstantExponent,
                                 "exponent must be a numeric constant",
                                 lex_.peek().offset);
            Token num = lex_.take();
            base = Expr::make_binary(Expr::Kind::Pow, std::move(base),
                                     Expr::make_constant(num.num));
        }
        return base;
    }

    ExprPtr parse_atom() {
        const Token& t = lex_.peek();
        switch (t.type) {
            case Token::Number:
                return Expr::make_constant(lex_.take().num);
            case Token::LParen: {
                lex_.take();
                ExprPtr e = parse_expr();
                if (lex_.peek().type != Token::RParen)
                    throw ParseError(ParseError::Kind::Syntax, "expected ')'",
                                     lex_.peek().offset);
                lex_.take();
                return e;
            }
            case Token::Ident:
                return parse_ident(lex_.take());
            default:
                throw ParseError(ParseError::Kind::Syntax,
                                 "expected number, identifier or '('", t.offset);
        }
    }

    ExprPtr parse_ident(const Token& t) {
        if (t.text == "pi") return Expr::make_constant(std::numbers::pi);
        if (t.text == "e") return Expr::make_constant(std::numbers::e);
        if (t.text.size() >= 2 && t.text[0] == 'x' &&
            std::isdigit(static_cast<unsigned char>(t.text[1]))) {
            long long idx = 0;
            auto res = std::from_chars(t.text.data() + 1,
                                       t.text.data() + t.text.size(), idx);
            if (res.ec == std::errc() && res.ptr == t.text.data() + t.text.size()) {
                if (idx < 1 || idx > vars_)
                    throw ParseError(ParseError::Kind::VariableOutOfRange,
                                     "variable " + t.text +
                                         " out of range for dimension " +
                                         std::to_string(vars_),
                                     t.offset);
                return Expr::make_variable(static_cast<int>(idx) - 1);
            }
        }
        static const std::pair<const char*, Func> kFuncs[] = {
            {"sin", Func::Sin},   {"cos", Func::Cos},   {"tan", Func::Tan},
            {"exp", Func::Exp},   {"ln", Func::Ln},     {"sqrt", Func::Sqrt},
            {"sinh", Func::Sinh}, {"cosh", Func::Cosh}, {"tanh", Func::Tanh},
        };
        for (const auto& [name, f] : kFuncs) {
            if (t.text == name) {
                if (lex_.peek().type != Token::LParen)
                    throw ParseError(ParseError::Kind::Syntax,
                                     "expected '(' after function name",
                                     lex_.peek().offset);
                lex_.take();
                ExprPtr arg = parse_expr();
                if (lex_.peek().type != Token::RParen)
                    throw ParseError(ParseError::Kind::Syntax, "expected ')'",
                                     lex_.peek().offset);
                lex_.take();
                return Expr::make_call(f, std::move(arg));
            }
        }
        throw ParseError(ParseError::Kind::UnknownIdentifier,
                         "unknown identifier '" + t.text + "'", t.offset);
    }

    Lexer lex_;
    int vars_;
};

std::string point_string(std::span<const double> x) {
    std::string s = "(";
    char buf[32];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.6g", x[i]);
        if (i) s += ", ";
        s += buf;
    }
    s += ")";
    return s;
}

[[noreturn]] void rethrow_with_context(const DomainError& err, const Expr& e,
                                       std::span<const double> x) {
    throw DomainError(std::string(err.what()) + " in '" + to_string(e) +
                      "' at x = " + point_string(x));
}

}  // namespace

ExprPtr parse(std::string_view text, int vars) {
    if (text.empty())
        throw ParseError(ParseError::Kind::Syntax, "empty expression", 0);
    return Parser(text, vars).run();
}

Jet eval_jet(const Expr& e, std::span<const double> x, int order) {
    const int n = static_cast<int>(x.size());
    switch (e.kind) {
        case Expr::Kind::Constant:
            return Jet::constant(n, order, e.constant);
        case Expr::Kind::Variable:
            return Jet::variable(n, order, e.var, x[e.var]);
        case Expr::Kind::Negate:
            return -eval_jet(*e.lhs, x, order);
        case Expr::Kind::Add:
            return eval_jet(*e.lhs, x, order) + eval_jet(*e.rhs, x, order);
        case Expr::Kind::Sub:
            return eval_jet(*e.lhs, x, order) - eval_jet(*e.rhs, x, order);
        case Expr::Kind::Mul:
            return eval_jet(*e.lhs, x, order) * eval_jet(*e.rhs, x, order);
        case Expr::Kind::Div: {
            Jet a = eval_jet(*e.lhs, x, order);
            Jet b = eval_jet(*e.rhs, x, order);
            try {
                return a / b;
            } catch (const DomainError& err) {
                rethrow_with_context(err, e, x);
            }
        }
        case Expr::Kind::Pow: {
            Jet a = eval_jet(*e.lhs, x, order);
            try {
                return pow(a, e.rhs->constant);
            } catch (const DomainError& err) {
                rethrow_with_context(err, e, x);
            }
        }
        case Expr::Kind::Call: {
            Jet a = eval_jet(*e.lhs, x, order);
            try {
                switch (e.func) {
                    case Func::Sin: return sin(a);
                    case Func::Cos: return cos(a);
                    case Func::Tan: return tan(a);
                    case Func::Exp: return exp(a);
                    case Func::Ln: return log(a);
                    case Func::Sqrt: return sqrt(a);
                    case Func::Sinh: return sinh(a);
                    case Func::Cosh: return cosh(a);
                    case Func::Tanh: return tanh(a);
                }
            } catch (const DomainError& err) {
                rethrow_with_context(err, e, x);
            }
        }
    }
    throw std::logic_error("corrupt expression node");
}

double eval_value(const Expr& e, std::span<const double> x) {
    switch (e.kind) {
        case Expr::Kind::Constant:
            return e.constant;
        case Expr::Kind::Variable:
            return x[e.var];
        case Expr::Kind::Negate:
            return -eval_value(*e.lhs, x);
        case Expr::Kind::Add:
            return eval_value(*e.lhs, x) + eval_value(*e.rhs, x);
        case Expr::Kind::Sub:
            return eval_value(*e.lhs, x) - eval_value(*e.rhs, x);
        case Expr::Kind::Mul:
            return eval_value(*e.lhs, x) * eval_value(*e.rhs, x);
        case Expr::Kind::Div: {
            double b = eval_value(*e.rhs, x);
            if (b == 0.0)
                throw DomainError("division by zero in '" + to_string(e) +
                                  "' at x = " + point_string(x));
            return eval_value(*e.lhs, x) / b;
        }
        case Expr::Kind::Pow: {
            double a = eval_value(*e.lhs, x);
            double p = e.rhs->constant;
            double r = std::pow(a, p);
            if (!std::isfinite(r) || std::isnan(r))
                throw DomainError("power out of domain in '" + to_string(e) +
                                  "' at x = " + point_string(x));
            return r;
        }
        case Expr::Kind::Call: {
            double a = eval_value(*e.lhs, x);
            switch (e.func) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Tan: return std::tan(a);
                case Func::Exp: return std::exp(a);
                case Func::Ln:
                    if (a <= 0.0)
                        throw DomainError("log of non-positive value in '" +
                                          to_string(e) + "' at x = " +
                                          point_string(x));
                    return std::log(a);
                case Func::Sqrt:
                    if (a < 0.0)
                        throw DomainError("sqrt of negative value in '" +
                                          to_string(e) + "' at x = " +
                                          point_string(x));
                    return std::sqrt(a);
                case Func::Sinh: return std::sinh(a);
                case Func::Cosh: return std::cosh(a);
                case Func::Tanh: return std::tanh(a);
            }
        }
    }
    throw std::logic_error("corrupt expression node");
}

namespace {

int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Add:
        case Expr::Kind::Sub: return 1;
        case Expr::Kind::Mul:
        case Expr::Kind::Div: return 2;
        case Expr::Kind::Negate: return 3;
        case Expr::Kind::Pow: return 4;
        case Expr::Kind::Constant:
            // negative literals print with a leading minus, binding like
            // a negation
            return e.constant < 0 ? 3 : 5;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void render(const Expr& e, int min_prec, std::string& out) {
    const int prec = precedence(e);
    const bool parens = prec < min_prec;
    if (parens) out += "(";
    switch (e.kind) {
        case Expr::Kind::Constant:
            out += format_number(e.constant);
            break;
        case Expr::Kind::Variable:
            out += "x" + std::to_string(e.var + 1);
            break;
        case Expr::Kind::Negate:
            out += "-";
            render(*e.lhs, 4, out);
            break;
        case Expr::Kind::Add:
            render(*e.lhs, 1, out);
            out += " + ";
            render(*e.rhs, 2, out);
            break;
        case Expr::Kind::Sub:
            render(*e.lhs, 1, out);
            out += " - ";
            render(*e.rhs, 2, out);
            break;
        case Expr::Kind::Mul:
            render(*e.lhs, 2, out);
            out += " * ";
            render(*e.rhs, 3, out);
            break;
        case Expr::Kind::Div:
            render(*e.lhs, 2, out);
            out += " / ";
            render(*e.rhs, 3, out);
            break;
        case Expr::Kind::Pow:
            render(*e.lhs, 5, out);
            out += "^";
            out += format_number(e.rhs->constant);
            break;
        case Expr::Kind::Call:
            out += func_name(e.func);
            out += "(";
            render(*e.lhs, 0, out);
            out += ")";
            break;
    }
    if (parens) out += ")";
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    render(e, 0, out);
    return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Expr::Kind::Constant: return a.constant == b.constant;
        case Expr::Kind::Variable: return a.var == b.var;
        case Expr::Kind::Negate: return structurally_equal(*a.lhs, *b.lhs);
        case Expr::Kind::Call:
            return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
        default:
            return structurally_equal(*a.lhs, *b.lhs) &&
                   structurally_equal(*a.rhs, *b.rhs);
    }
}

ExprPtr substitute_variables(const ExprPtr& e,
                             const std::vector<ExprPtr>& replacements) {
    switch (e->kind) {
        case Expr::Kind::Constant:
            return e;
        case Expr::Kind::Variable:
            return replacements.at(e->var);
        case Expr::Kind::Negate:
            return Expr::make_negate(substitute_variables(e->lhs, replacements));
        case Expr::Kind::Call:
            return Expr::make_call(e->func,
                                   substitute_variables(e->lhs, replacements));
        default:
            return Expr::make_binary(e->kind,
                                     substitute_variables(e->lhs, replacements),
                                     substitute_variables(e->rhs, replacements));
    }
}

}  // namespace graphcurv
