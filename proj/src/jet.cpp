#include "graphcurv/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "graphcurv/errors.hpp"

namespace graphcurv {

namespace {

constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0, 24.0};

// Appends all exponent vectors of total degree `deg` over `vars` slots in
// descending lexicographic order.
void emit_degree_block(int vars, int deg, std::vector<std::uint8_t>& prefix,
                       std::vector<std::uint8_t>& out) {
    if (static_cast<int>(prefix.size()) == vars - 1) {
        for (std::uint8_t e : prefix) out.push_back(e);
        out.push_back(static_cast<std::uint8_t>(deg));
        return;
    }
    for (int e = deg; e >= 0; --e) {
        prefix.push_back(static_cast<std::uint8_t>(e));
        emit_degree_block(vars, deg - e, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::size_t JetLayout::key_of(std::span<const std::uint8_t> g) const {
    std::size_t key = 0;
    for (int i = vars_ - 1; i >= 0; --i) key = key * 5 + g[i];
    return key;
}

JetLayout::JetLayout(int vars, int order) : vars_(vars), order_(order) {
    std::vector<std::uint8_t> prefix;
    for (int d = 0; d <= order; ++d) emit_degree_block(vars, d, prefix, exps_);
    const int count = static_cast<int>(exps_.size()) / vars;
    degree_.resize(count);
    std::size_t key_space = 1;
    for (int i = 0; i < vars; ++i) key_space *= 5;
    pos_by_key_.assign(key_space, -1);
    for (int p = 0; p < count; ++p) {
        auto g = exponents(p);
        int deg = 0;
        for (std::uint8_t e : g) deg += e;
        degree_[p] = static_cast<std::uint8_t>(deg);
        pos_by_key_[key_of(g)] = p;
    }

    std::vector<std::uint8_t> sum(vars);
    for (int p = 0; p < count; ++p) {
        for (int q = 0; q < count; ++q) {
            if (degree_[p] + degree_[q] > order) continue;
            auto gp = exponents(p);
            auto gq = exponents(q);
            for (int i = 0; i < vars; ++i)
                sum[i] = static_cast<std::uint8_t>(gp[i] + gq[i]);
            mul_.push_back({p, q, pos_by_key_[key_of(sum)]});
        }
    }

    deriv_.resize(vars);
    if (order >= 1) {
        const JetLayout& target = JetLayout::get(vars, order - 1);
        std::vector<std::uint8_t> src(vars);
        for (int i = 0; i < vars; ++i) {
            deriv_[i].resize(target.size());
            for (int t = 0; t < target.size(); ++t) {
                auto g = target.exponents(t);
                std::copy(g.begin(), g.end(), src.begin());
                src[i] = static_cast<std::uint8_t>(src[i] + 1);
                deriv_[i][t] = {pos_by_key_[key_of(src)],
                                static_cast<double>(g[i] + 1)};
            }
        }
    }
}

const JetLayout& JetLayout::get(int vars, int order) {
    if (vars < 1 || vars > kMaxVars)
        throw std::invalid_argument("jet variable count out of range");
    if (order < 0 || order > kMaxOrder)
        throw std::invalid_argument("jet order out of range");
    static std::recursive_mutex mtx;
    static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
    std::lock_guard<std::recursive_mutex> lock(mtx);
    auto& slot = cache[{vars, order}];
    if (!slot) slot.reset(new JetLayout(vars, order));
    return *slot;
}

int JetLayout::position(std::span<const int> gamma) const {
    if (static_cast<int>(gamma.size()) != vars_)
        throw std::invalid_argument("multi-index length mismatch");
    int deg = 0;
    for (int e : gamma) {
        if (e < 0) throw std::invalid_argument("negative multi-index entry");
        deg += e;
    }
    if (deg > order_) return -1;
    std::size_t key = 0;
    for (int i = vars_ - 1; i >= 0; --i) key = key * 5 + gamma[i];
    return pos_by_key_[key];
}

void require_same_layout(const Jet& a, const Jet& b) {
    if (a.lay_ != b.lay_)
        throw std::invalid_argument("jet dimension/order mismatch");
}

Jet Jet::constant(int vars, int order, double value) {
    Jet j(vars, order);
    j.c_[0] = value;
    return j;
}

Jet Jet::variable(int vars, int order, int var, double value) {
    if (var < 0 || var >= vars)
        throw std::invalid_argument("jet variable index out of range");
    Jet j(vars, order);
    j.c_[0] = value;
    if (order >= 1) j.c_[1 + var] = 1.0;
    return j;
}

double Jet::coeff(std::span<const int> gamma) const {
    int pos = lay_->position(gamma);
    if (pos < 0)
        throw std::invalid_argument("multi-index degree exceeds jet order");
    return c_[pos];
}

double Jet::partial(std::span<const int> gamma) const {
    int pos = lay_->position(gamma);
    if (pos < 0)
        throw std::invalid_argument("multi-index degree exceeds jet order");
    double fact = 1.0;
    for (int e : gamma) fact *= kFactorial[e];
    return fact * c_[pos];
}

Jet Jet::truncated(int new_order) const {
    if (new_order < 0 || new_order > order())
        throw std::invalid_argument("invalid truncation order");
    Jet r(vars(), new_order);
    std::copy(c_.begin(), c_.begin() + r.lay_->size(), r.c_.begin());
    return r;
}

Jet Jet::derivative(int var) const {
    if (order() < 1)
        throw std::invalid_argument("cannot differentiate an order-0 jet");
    if (var < 0 || var >= vars())
        throw std::invalid_argument("jet variable index out of range");
    Jet r(vars(), order() - 1);
    auto map = lay_->derivative_map(var);
    for (std::size_t t = 0; t < map.size(); ++t)
        r.c_[t] = map[t].factor * c_[map[t].src];
    return r;
}

Jet& Jet::operator+=(const Jet& rhs) {
    require_same_layout(*this, rhs);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += rhs.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
    require_same_layout(*this, rhs);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= rhs.c_[i];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

Jet operator-(const Jet& a) {
    Jet r = a;
    for (double& v : r.c_) v = -v;
    return r;
}

Jet operator-(double s, const Jet& a) {
    Jet r = -a;
    r.c_[0] += s;
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    require_same_layout(a, b);
    Jet r(a.vars(), a.order());
    for (const auto& t : a.lay_->mul_triples())
        r.c_[t.c] += a.c_[t.a] * b.c_[t.b];
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    require_same_layout(a, b);
    const double b0 = b.value();
    if (b0 == 0.0)
        throw DomainError("division by jet with zero constant term");
    std::vector<double> recip(b.order() + 1);
    recip[0] = 1.0 / b0;
    for (int d = 1; d <= b.order(); ++d) recip[d] = -recip[d - 1] / b0;
    return a * compose_univariate(recip, b);
}

Jet compose_univariate(std::span<const double> outer, const Jet& a) {
    const int order = a.order();
    if (static_cast<int>(outer.size()) < order + 1)
        throw std::invalid_argument("outer Taylor table too short");
    Jet u = a;
    u.coeff(0) = 0.0;
    Jet r = Jet::constant(a.vars(), order, outer[order]);
    for (int d = order - 1; d >= 0; --d) {
        r = r * u;
        r += outer[d];
    }
    return r;
}

namespace {

Jet compose_table(const Jet& a, std::span<const double> table) {
    return compose_univariate(table, a);
}

}  // namespace

Jet exp(const Jet& a) {
    const double e0 = std::exp(a.value());
    double table[JetLayout::kMaxOrder + 1];
    for (int d = 0; d <= a.order(); ++d) table[d] = e0 / kFactorial[d];
    return compose_table(a, {table, static_cast<std::size_t>(a.order() + 1)});
}

Jet log(const Jet& a) {
    const double a0 = a.value();
    if (a0 <= 0.0) throw DomainError("log of non-positive value");
    double table[JetLayout::kMaxOrder + 1];
    table[0] = std::log(a0);
    double p = 1.0;
    for (int d = 1; d <= a.order(); ++d) {
        p /= a0;
        table[d] = (d % 2 ? p : -p) / d;
    }
    return compose_table(a, {table, static_cast<std::size_t>(a.order() + 1)});
}

Jet sqrt(const Jet& a) {
    const double a0 = a.value();
    if (a0 < 0.0) throw DomainError("sqrt of negative value");
    if (a0 == 0.0 && a.order() >= 1)
        throw DomainError("sqrt at zero has no Taylor expansion");
    double table[JetLayout::kMaxOrder + 1];
    table[0] = std::sqrt(a0);
    for (int d = 1; d <= a.order(); ++d)
        table[d] = table[d - 1] * (0.5 - (d - 1)) / (d * a0);
    return compose_table(a, {table, static_cast<std::size_t>(a.order() + 1)});
}

Jet sin(const Jet& a) {
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    const double cycle[4] = {s, c, -s, -c};
    double table[JetLayout::kMaxOrder + 1];
    for (int d = 0; d <= a.order(); ++d) table[d] = cycle[d % 4] / kFactorial[d];
    return compose_table(a, {table, static_cast<std::size_t>(a.order() + 1)});
}

Jet cos(const Jet& a) {
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    const double cycle[4] = {c, -s, -c, s};
    double table[JetLayout::kMaxOrder + 1];
    for (int d = 0; d <= a.order(); ++d) table[d] = cycle[d % 4] / kFactorial[d];
    return compose_table(a, {table, static_cast<std::size_t>(a.order() + 1)});
}

Jet tan(const Jet& a) { return sin(a) / cos(a); }

Jet sinh(const Jet& a) {
    const double sh = std::sinh(a.value());
    const double ch = std::cosh(a.value());
    double table[JetLayout::kMaxOrder + 1];
    for (int d = 0; d <= a.order(); ++d)
        table[d] = (d % 2 ? ch : sh) / kFactorial[d];
    return compose_table(a, {table, static_cast<std::size_t>(a.order() + 1)});
}

Jet cosh(const Jet& a) {
    const double sh = std::sinh(a.value());
    const double ch = std::cosh(a.value());
    double table[JetLayout::kMaxOrder + 1];
    for (int d = 0; d <= a.order(); ++d)
        table[d] = (d % 2 ? sh : ch) / kFactorial[d];
    return compose_table(a, {table, static_cast<std::size_t>(a.order() + 1)});
}

Jet tanh(const Jet& a) { return sinh(a) / cosh(a); }

Jet pow(const Jet& a, double exponent) {
    const double rounded = std::nearbyint(exponent);
    if (std::abs(exponent - rounded) < 1e-12 && std::abs(rounded) <= 64.0) {
        long long e = static_cast<long long>(rounded);
        Jet base = a;
        if (e < 0) {
            base = Jet::constant(a.vars(), a.order(), 1.0) / a;
            e = -e;
        }
        Jet r = Jet::constant(a.vars(), a.order(), 1.0);
        while (e > 0) {
            if (e & 1) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }
    const double a0 = a.value();
    if (a0 <= 0.0)
        throw DomainError("fractional power of non-positive value");
    double table[JetLayout::kMaxOrder + 1];
    table[0] = std::pow(a0, exponent);
    for (int d = 1; d <= a.order(); ++d)
        table[d] = table[d - 1] * (exponent - (d - 1)) / (d * a0);
    return compose_table(a, {table, static_cast<std::size_t>(a.order() + 1)});
}

}  // namespace graphcurv
