#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace graphcurv {

/// Shared coefficient layout for all jets with the same (vars, order):
/// the multi-indices of total degree <= order in graded-lexicographic
/// order (degree blocks, descending lex inside a block), a position
/// lookup, and precomputed multiplication / derivative tables.
/// Layouts are interned; jets compare layouts by pointer.
class JetLayout {
public:
    static constexpr int kMaxOrder = 4;
    static constexpr int kMaxVars = 8;

    /// Interned layout for `vars` variables truncated at total degree
    /// `order`. Thread-safe; the returned reference lives forever.
    static const JetLayout& get(int vars, int order);

    int vars() const { return vars_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(degree_.size()); }

    /// Exponent vector of the multi-index stored at `pos`.
    std::span<const std::uint8_t> exponents(int pos) const {
        return {exps_.data() + static_cast<std::size_t>(pos) * vars_,
                static_cast<std::size_t>(vars_)};
    }
    int degree(int pos) const { return degree_[pos]; }

    /// Position of a multi-index, or -1 when its degree exceeds `order`.
    int position(std::span<const int> gamma) const;

    struct MulTriple {
        std::int32_t a, b, c;  // result[c] += lhs[a] * rhs[b]
    };
    const std::vector<MulTriple>& mul_triples() const { return mul_; }

    /// Derivative map for variable `var`: entry t of the returned list is
    /// the source position whose coefficient feeds position t of the
    /// (order-1) layout, with the matching scale factor.
    struct DerivEntry {
        std::int32_t src;
        double factor;
    };
    std::span<const DerivEntry> derivative_map(int var) const {
        const auto& m = deriv_[var];
        return {m.data(), m.size()};
    }

private:
    JetLayout(int vars, int order);

    int vars_, order_;
    std::vector<std::uint8_t> exps_;  // size() * vars_, graded-lex
    std::vector<std::uint8_t> degree_;
    std::vector<std::int32_t> pos_by_key_;  // dense packed-exponent lookup
    std::vector<MulTriple> mul_;
    std::vector<std::vector<DerivEntry>> deriv_;

    std::size_t key_of(std::span<const std::uint8_t> g) const;
};

/// Truncated multivariate Taylor expansion: coefficient c_gamma equals
/// the partial derivative over gamma! (Taylor convention), densely
/// stored for all |gamma| <= order. Value type; all operations are pure.
class Jet {
public:
    Jet() : lay_(nullptr) {}
    Jet(int vars, int order)
        : lay_(&JetLayout::get(vars, order)), c_(lay_->size(), 0.0) {}

    static Jet constant(int vars, int order, double value);
    /// Seed jet of the coordinate function x_{var} (0-based) at a point
    /// where it takes `value`.
    static Jet variable(int vars, int order, int var, double value);

    int vars() const { return lay_->vars(); }
    int order() const { return lay_->order(); }
    const JetLayout& layout() const { return *lay_; }

    double value() const { return c_[0]; }
    double coeff(int pos) const { return c_[pos]; }
    double& coeff(int pos) { return c_[pos]; }
    double coeff(std::span<const int> gamma) const;
    const std::vector<double>& coeffs() const { return c_; }

    /// gamma! * coeff(gamma) = the partial derivative for gamma.
    double partial(std::span<const int> gamma) const;

    /// First-order coefficient for variable `var` (the gradient entry).
    double gradient(int var) const { return c_[1 + var]; }

    Jet truncated(int new_order) const;
    /// Jet of the partial derivative with respect to `var`, one order lower.
    Jet derivative(int var) const;

    Jet& operator+=(const Jet& rhs);
    Jet& operator-=(const Jet& rhs);
    Jet& operator+=(double s) { c_[0] += s; return *this; }
    Jet& operator-=(double s) { c_[0] -= s; return *this; }
    Jet& operator*=(double s);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a -= s; }
    friend Jet operator-(double s, const Jet& a);
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }
    friend Jet operator-(const Jet& a);

    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);

private:
    const JetLayout* lay_;
    std::vector<double> c_;

    friend void require_same_layout(const Jet& a, const Jet& b);
};

/// Taylor coefficients of f composed with `a`, where `outer[d]` is the
/// d-th derivative of f at a.value() divided by d! and covers degrees
/// 0..a.order().
Jet compose_univariate(std::span<const double> outer, const Jet& a);

Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet tanh(const Jet& a);
/// a raised to a constant exponent. Integer exponents work for any base
/// value (repeated multiplication); fractional exponents require a
/// positive base.
Jet pow(const Jet& a, double exponent);

}  // namespace graphcurv
