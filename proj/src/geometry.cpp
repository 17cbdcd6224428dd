#include "graphcurv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>  // vendored single header
#endif

#include "graphcurv/errors.hpp"

namespace graphcurv {

namespace {

// ---------------------------------------------------------------------
// Small dense linear algebra over doubles (n <= 8 throughout).
// ---------------------------------------------------------------------

double det_double(std::vector<double> a, int n) {
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (a[piv * n + c] == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(a[piv * n + j], a[c * n + j]);
            det = -det;
        }
        det *= a[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            double f = a[r * n + c] / a[c * n + c];
            for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
        }
    }
    return det;
}

std::vector<double> invert_double(std::vector<double> a, int n) {
    std::vector<double> inv(n * n, 0.0);
    for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (a[piv * n + c] == 0.0) throw Error("singular metric");
        if (piv != c) {
            for (int j = 0; j < n; ++j) {
                std::swap(a[piv * n + j], a[c * n + j]);
                std::swap(inv[piv * n + j], inv[c * n + j]);
            }
        }
        double pinv = 1.0 / a[c * n + c];
        for (int j = 0; j < n; ++j) {
            a[c * n + j] *= pinv;
            inv[c * n + j] *= pinv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            double f = a[r * n + c];
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a[r * n + j] -= f * a[c * n + j];
                inv[r * n + j] -= f * inv[c * n + j];
            }
        }
    }
    return inv;
}

// Gauss-Jordan over jets; pivots by the magnitude of the constant term.
// Returns the inverse and writes det(constant part) to det_value.
std::vector<Jet> invert_jet_matrix(std::vector<Jet> a, int n,
                                   double& det_value) {
    const int vars = a[0].vars();
    const int order = a[0].order();
    std::vector<Jet> inv(n * n, Jet(vars, order));
    for (int i = 0; i < n; ++i) inv[i * n + i] = Jet::constant(vars, order, 1.0);
    const Jet one = Jet::constant(vars, order, 1.0);
    det_value = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c].value()) > std::abs(a[piv * n + c].value()))
                piv = r;
        if (a[piv * n + c].value() == 0.0) throw Error("singular metric");
        if (piv != c) {
            for (int j = 0; j < n; ++j) {
                std::swap(a[piv * n + j], a[c * n + j]);
                std::swap(inv[piv * n + j], inv[c * n + j]);
            }
            det_value = -det_value;
        }
        det_value *= a[c * n + c].value();
        Jet pinv = one / a[c * n + c];
        for (int j = 0; j < n; ++j) {
            a[c * n + j] = a[c * n + j] * pinv;
            inv[c * n + j] = inv[c * n + j] * pinv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            Jet f = a[r * n + c];
            for (int j = 0; j < n; ++j) {
                a[r * n + j] -= f * a[c * n + j];
                inv[r * n + j] -= f * inv[c * n + j];
            }
        }
    }
    return inv;
}

std::vector<double> default_reference(int n, int k) {
    std::vector<double> refs(static_cast<std::size_t>(k) * (n + k), 0.0);
    for (int a = 0; a < k; ++a) refs[a * (n + k) + n + a] = 1.0;
    return refs;
}

}  // namespace

// ---------------------------------------------------------------------
// GraphMap
// ---------------------------------------------------------------------

bool GraphMap::contains(std::span<const double> x, double margin) const {
    if (!domain) return true;
    for (int i = 0; i < n; ++i) {
        if (x[i] < (*domain)[i][0] + margin) return false;
        if (x[i] > (*domain)[i][1] - margin) return false;
    }
    return true;
}

std::vector<std::array<double, 2>> GraphMap::clip(
    const std::vector<std::array<double, 2>>& box) const {
    if (!domain) return box;
    std::vector<std::array<double, 2>> out(box);
    for (int i = 0; i < n; ++i) {
        out[i][0] = std::max(out[i][0], (*domain)[i][0]);
        out[i][1] = std::min(out[i][1], (*domain)[i][1]);
    }
    return out;
}

GraphMap graph_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid graph file: ") + e.what());
    }
    GraphMap g;
    try {
        g.n = j.at("n").get<int>();
        g.k = j.at("k").get<int>();
        if (g.n < 1 || g.n > JetLayout::kMaxVars)
            throw ConfigError("graph dimension n out of range");
        if (g.k < 1) throw ConfigError("codimension k must be positive");
        const auto& psi = j.at("psi");
        if (!psi.is_array() || static_cast<int>(psi.size()) != g.k)
            throw ConfigError("psi must list exactly k component expressions");
        for (const auto& s : psi)
            g.components.push_back(parse(s.get<std::string>(), g.n));
        if (j.contains("domain") && !j["domain"].is_null()) {
            const auto& dom = j["domain"];
            if (!dom.is_array() || static_cast<int>(dom.size()) != g.n)
                throw ConfigError("domain must list one interval per axis");
            std::vector<std::array<double, 2>> box;
            for (const auto& iv : dom) {
                double lo = iv.at(0).get<double>();
                double hi = iv.at(1).get<double>();
                if (!(lo < hi)) throw ConfigError("empty domain interval");
                box.push_back({lo, hi});
            }
            g.domain = std::move(box);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid graph file: ") + e.what());
    }
    return g;
}

GraphMap scale_graph(const GraphMap& graph, double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("scale factor must be positive");
    GraphMap out;
    out.n = graph.n;
    out.k = graph.k;
    std::vector<ExprPtr> repl;
    for (int i = 0; i < graph.n; ++i)
        repl.push_back(Expr::make_binary(Expr::Kind::Div,
                                         Expr::make_variable(i),
                                         Expr::make_constant(lambda)));
    for (const auto& c : graph.components)
        out.components.push_back(Expr::make_binary(
            Expr::Kind::Mul, Expr::make_constant(lambda),
            substitute_variables(c, repl)));
    if (graph.domain) {
        std::vector<std::array<double, 2>> dom;
        for (const auto& iv : *graph.domain)
            dom.push_back({lambda * iv[0], lambda * iv[1]});
        out.domain = std::move(dom);
    }
    return out;
}

// ---------------------------------------------------------------------
// PointGeometry construction
// ---------------------------------------------------------------------

PointGeometry build_point_geometry(const GraphMap& graph,
                                   std::span<const double> x, int depth) {
    return build_point_geometry(graph, x, depth, BuildOptions{});
}

PointGeometry build_point_geometry(const GraphMap& graph,
                                   std::span<const double> x, int depth,
                                   const BuildOptions& options) {
    if (depth < 2 || depth > 4)
        throw std::invalid_argument("derivative depth must be 2, 3 or 4");
    if (static_cast<int>(x.size()) != graph.n)
        throw std::invalid_argument("point dimension mismatch");
    if (!graph.contains(x))
        throw DomainError("point outside the chart domain");

    const int n = graph.n, k = graph.k, m = n + k;
    const int o1 = depth - 1, o2 = depth - 2;

    PointGeometry pg;
    pg.n = n;
    pg.k = k;
    pg.m = m;
    pg.depth = depth;
    pg.x.assign(x.begin(), x.end());

    // Ambient position as jets of the chart coordinates.
    std::vector<Jet> F;
    F.reserve(m);
    for (int i = 0; i < n; ++i) F.push_back(Jet::variable(n, depth, i, x[i]));
    for (int a = 0; a < k; ++a)
        F.push_back(eval_jet(*graph.components[a], x, depth));
    pg.f.resize(m);
    for (int a = 0; a < m; ++a) pg.f[a] = F[a].value();

    // Tangents and second chart derivatives.
    std::vector<Jet> t(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a) t[i * m + a] = F[a].derivative(i);
    pg.tangent.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) pg.tangent[i] = t[i].value();

    std::vector<Jet> d2f(static_cast<std::size_t>(n) * n * m);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int a = 0; a < m; ++a) {
                Jet d = t[i * m + a].derivative(j);
                d2f[(i * n + j) * m + a] = d;
                if (i != j) d2f[(j * n + i) * m + a] = d;
            }

    // Induced metric, inverse, volume element.
    std::vector<Jet> g(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            Jet s(n, o1);
            for (int a = 0; a < m; ++a) s += t[i * m + a] * t[j * m + a];
            g[i * n + j] = s;
            if (i != j) g[j * n + i] = s;
        }
    double det_g = 0.0;
    std::vector<Jet> ginv = invert_jet_matrix(g, n, det_g);
    if (!(det_g > 0.0)) throw Error("singular metric");
    pg.metric.resize(n * n);
    pg.metric_inv.resize(n * n);
    for (int i = 0; i < n * n; ++i) {
        pg.metric[i] = g[i].value();
        pg.metric_inv[i] = ginv[i].value();
    }
    pg.sqrt_g = std::sqrt(det_g);

    // Christoffel symbols (one derivative below the metric jets).
    std::vector<Jet> dg(static_cast<std::size_t>(n) * n * n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet d = g[i * n + j].derivative(l);
                dg[(l * n + i) * n + j] = d;
                if (i != j) dg[(l * n + j) * n + i] = d;
            }
    std::vector<Jet> ginv2(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n * n; ++i) ginv2[i] = ginv[i].truncated(o2);
    std::vector<Jet> gamma(static_cast<std::size_t>(n) * n * n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet s(n, o2);
                for (int p = 0; p < n; ++p) {
                    Jet inner = dg[(i * n + j) * n + p] + dg[(j * n + i) * n + p] -
                                dg[(p * n + i) * n + j];
                    s += ginv2[l * n + p] * inner;
                }
                s *= 0.5;
                gamma[(l * n + i) * n + j] = s;
                if (i != j) gamma[(l * n + j) * n + i] = s;
            }
    pg.christoffel.resize(gamma.size());
    for (std::size_t i = 0; i < gamma.size(); ++i)
        pg.christoffel[i] = gamma[i].value();

    // Orthonormal normal frame: project the reference directions onto the
    // normal space, then Gram-Schmidt in fixed index order.
    std::vector<double> refs;
    if (options.normal_reference) {
        if (static_cast<int>(options.normal_reference->size()) != k)
            throw std::invalid_argument("need k normal reference directions");
        for (const auto& r : *options.normal_reference) {
            if (static_cast<int>(r.size()) != m)
                throw std::invalid_argument("normal reference dimension mismatch");
            refs.insert(refs.end(), r.begin(), r.end());
        }
    } else {
        refs = default_reference(n, k);
    }
    std::vector<Jet> nu(static_cast<std::size_t>(k) * m);
    for (int a = 0; a < k; ++a) {
        std::vector<Jet> v(m);
        for (int c = 0; c < m; ++c)
            v[c] = Jet::constant(n, o1, refs[a * m + c]);
        std::vector<Jet> tdot(n, Jet(n, o1));
        for (int i = 0; i < n; ++i) {
            Jet s(n, o1);
            for (int c = 0; c < m; ++c) s += v[c] * t[i * m + c];
            tdot[i] = s;
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Jet coef = ginv[i * n + j] * tdot[i];
                for (int c = 0; c < m; ++c) v[c] -= coef * t[j * m + c];
            }
        for (int b = 0; b < a; ++b) {
            Jet c(n, o1);
            for (int cc = 0; cc < m; ++cc) c += v[cc] * nu[b * m + cc];
            for (int cc = 0; cc < m; ++cc) v[cc] -= c * nu[b * m + cc];
        }
        Jet n2(n, o1);
        for (int c = 0; c < m; ++c) n2 += v[c] * v[c];
        if (!(n2.value() > 1e-24))
            throw Error("normal frame Gram-Schmidt breakdown");
        Jet inv_len = Jet::constant(n, o1, 1.0) / sqrt(n2);
        for (int c = 0; c < m; ++c) nu[a * m + c] = v[c] * inv_len;
    }
    pg.normal.resize(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i) pg.normal[i] = nu[i].value();

    std::vector<Jet> nu2(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i) nu2[i] = nu[i].truncated(o2);

    // Second fundamental form, normal connection, mean curvature.
    std::vector<Jet> h(static_cast<std::size_t>(k) * n * n);
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet s(n, o2);
                for (int c = 0; c < m; ++c)
                    s += d2f[(i * n + j) * m + c] * nu2[a * m + c];
                h[(a * n + i) * n + j] = s;
                if (i != j) h[(a * n + j) * n + i] = s;
            }
    std::vector<Jet> omega(static_cast<std::size_t>(n) * k * k);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a) {
            std::vector<Jet> dnu(m);
            for (int c = 0; c < m; ++c) dnu[c] = nu[a * m + c].derivative(i);
            for (int b = 0; b < k; ++b) {
                Jet s(n, o2);
                for (int c = 0; c < m; ++c) s += dnu[c] * nu2[b * m + c];
                omega[(i * k + a) * k + b] = s;
            }
        }
    std::vector<Jet> hu(static_cast<std::size_t>(k) * n * n);  // one index up
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Jet s(n, o2);
                for (int p = 0; p < n; ++p)
                    s += ginv2[i * n + p] * h[(a * n + p) * n + j];
                hu[(a * n + i) * n + j] = s;
            }
    std::vector<Jet> Hj(k);
    for (int a = 0; a < k; ++a) {
        Jet s(n, o2);
        for (int i = 0; i < n; ++i) s += hu[(a * n + i) * n + i];
        Hj[a] = s;
    }
    Jet normA2j(n, o2);
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                normA2j += hu[(a * n + i) * n + j] * hu[(a * n + j) * n + i];

    pg.h.resize(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) pg.h[i] = h[i].value();
    pg.omega.resize(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) pg.omega[i] = omega[i].value();
    pg.H.resize(k);
    for (int a = 0; a < k; ++a) pg.H[a] = Hj[a].value();
    pg.normA2 = normA2j.value();

    // Curvature tensors from the surface equations.
    pg.riemann.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int kk = 0; kk < n; ++kk)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int a = 0; a < k; ++a)
                        s += pg.h_at(a, i, l) * pg.h_at(a, j, kk) -
                             pg.h_at(a, i, kk) * pg.h_at(a, j, l);
                    pg.riemann[((i * n + j) * n + kk) * n + l] = s;
                }
    pg.rperp.assign(static_cast<std::size_t>(n) * n * k * k, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) {
                    double s = 0.0;
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q)
                            s += pg.inv_at(p, q) *
                                 (pg.h_at(b, i, p) * pg.h_at(a, q, j) -
                                  pg.h_at(a, i, p) * pg.h_at(b, q, j));
                    pg.rperp[((i * n + j) * k + a) * k + b] = s;
                }
    {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q) {
                        double gip = pg.inv_at(i, p), gjq = pg.inv_at(j, q);
                        for (int a = 0; a < k; ++a)
                            for (int b = 0; b < k; ++b)
                                s += gip * gjq * pg.rperp_at(i, j, a, b) *
                                     pg.rperp_at(p, q, a, b);
                    }
        pg.normRperp2 = s;
    }

    // Orthonormal tangent frame (values only) for the volume-form data.
    {
        std::vector<double> e(pg.tangent);
        std::vector<double> B(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) B[i * n + i] = 1.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j) {
                double c = 0.0;
                for (int a = 0; a < m; ++a) c += e[i * m + a] * e[j * m + a];
                for (int a = 0; a < m; ++a) e[i * m + a] -= c * e[j * m + a];
                for (int a = 0; a < n; ++a) B[i * n + a] -= c * B[j * n + a];
            }
            double len2 = 0.0;
            for (int a = 0; a < m; ++a) len2 += e[i * m + a] * e[i * m + a];
            double inv_len = 1.0 / std::sqrt(len2);
            for (int a = 0; a < m; ++a) e[i * m + a] *= inv_len;
            for (int a = 0; a < n; ++a) B[i * n + a] *= inv_len;
        }
        pg.frame_coeff = B;

        std::vector<double> mat(static_cast<std::size_t>(n) * n);
        auto fill_rows = [&](int ia, int nu_row_a, int ib, int nu_row_b) {
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) mat[r * n + c] = e[r * m + c];
            if (ia >= 0)
                for (int c = 0; c < n; ++c)
                    mat[ia * n + c] = pg.normal[nu_row_a * m + c];
            if (ib >= 0)
                for (int c = 0; c < n; ++c)
                    mat[ib * n + c] = pg.normal[nu_row_b * m + c];
        };
        fill_rows(-1, 0, -1, 0);
        pg.w = det_double(mat, n);
        pg.omega_n1.assign(static_cast<std::size_t>(k) * n, 0.0);
        for (int a = 0; a < k; ++a)
            for (int i = 0; i < n; ++i) {
                fill_rows(i, a, -1, 0);
                pg.omega_n1[a * n + i] = det_double(mat, n);
            }
        pg.omega_n2.assign(static_cast<std::size_t>(k) * k * n * n, 0.0);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                if (a == b) continue;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        if (i == j) continue;
                        fill_rows(i, a, j, b);
                        pg.omega_n2[((a * k + b) * n + i) * n + j] =
                            det_double(mat, n);
                    }
            }
    }

    if (depth >= 3) {
        const int o3 = depth - 3;
        std::vector<Jet> gamma3(gamma.size());
        for (std::size_t i = 0; i < gamma.size(); ++i)
            gamma3[i] = gamma[i].truncated(o3);
        std::vector<Jet> omega3(omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i)
            omega3[i] = omega[i].truncated(o3);
        std::vector<Jet> h3(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) h3[i] = h[i].truncated(o3);
        std::vector<Jet> H3(k);
        for (int a = 0; a < k; ++a) H3[a] = Hj[a].truncated(o3);

        // Covariant derivative of the second fundamental form.
        std::vector<Jet> gradA(static_cast<std::size_t>(n) * k * n * n);
        for (int c = 0; c < n; ++c)
            for (int a = 0; a < k; ++a)
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) {
                        Jet s = h[(a * n + i) * n + j].derivative(c);
                        for (int l = 0; l < n; ++l) {
                            s -= gamma3[(l * n + c) * n + i] * h3[(a * n + l) * n + j];
                            s -= gamma3[(l * n + c) * n + j] * h3[(a * n + i) * n + l];
                        }
                        for (int b = 0; b < k; ++b)
                            s -= omega3[(c * k + a) * k + b] * h3[(b * n + i) * n + j];
                        gradA[((c * k + a) * n + i) * n + j] = s;
                        if (i != j) gradA[((c * k + a) * n + j) * n + i] = s;
                    }
        pg.gradA.emplace(gradA.size());
        for (std::size_t i = 0; i < gradA.size(); ++i)
            (*pg.gradA)[i] = gradA[i].value();

        // Covariant derivative of the mean curvature vector.
        std::vector<Jet> gradH(static_cast<std::size_t>(n) * k);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < k; ++a) {
                Jet s = Hj[a].derivative(i);
                for (int b = 0; b < k; ++b)
                    s -= omega3[(i * k + a) * k + b] * H3[b];
                gradH[i * k + a] = s;
            }
        pg.gradH.emplace(gradH.size());
        for (std::size_t i = 0; i < gradH.size(); ++i)
            (*pg.gradH)[i] = gradH[i].value();

        pg.grad_normA2.emplace(n);
        for (int i = 0; i < n; ++i) (*pg.grad_normA2)[i] = normA2j.gradient(i);

        // Curvature of the Levi-Civita connection from the Christoffel jets.
        std::vector<double> dgamma(static_cast<std::size_t>(n) * n * n * n);
        for (int c = 0; c < n; ++c)
            for (int l = 0; l < n; ++l)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        dgamma[((c * n + l) * n + i) * n + j] =
                            gamma[(l * n + i) * n + j].derivative(c).value();
        pg.riemann_chart.emplace(static_cast<std::size_t>(n) * n * n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int kk = 0; kk < n; ++kk)
                    for (int l = 0; l < n; ++l) {
                        double s = 0.0;
                        for (int p = 0; p < n; ++p) {
                            double term =
                                dgamma[((i * n + p) * n + j) * n + kk] -
                                dgamma[((j * n + p) * n + i) * n + kk];
                            for (int u = 0; u < n; ++u)
                                term += pg.gamma_at(u, j, kk) * pg.gamma_at(p, i, u) -
                                        pg.gamma_at(u, i, kk) * pg.gamma_at(p, j, u);
                            s += pg.metric_at(p, l) * term;
                        }
                        (*pg.riemann_chart)[((i * n + j) * n + kk) * n + l] = s;
                    }

        // Curvature of the normal connection from the omega jets.
        pg.rperp_chart.emplace(static_cast<std::size_t>(n) * n * k * k);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int a = 0; a < k; ++a)
                    for (int b = 0; b < k; ++b) {
                        double s = omega[(j * k + a) * k + b].derivative(i).value() -
                                   omega[(i * k + a) * k + b].derivative(j).value();
                        for (int c = 0; c < k; ++c)
                            s += pg.omega_at(j, a, c) * pg.omega_at(i, c, b) -
                                 pg.omega_at(i, a, c) * pg.omega_at(j, c, b);
                        (*pg.rperp_chart)[((i * n + j) * k + a) * k + b] = s;
                    }

        pg.K1 = std::max(0.0, pg.jacobi_forcing() / pg.w);

        if (depth == 4) {
            // Covariant Hessian of the mean curvature vector.
            pg.hessH.emplace(static_cast<std::size_t>(n) * n * k);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int a = 0; a < k; ++a) {
                        double s = gradH[j * k + a].derivative(i).value();
                        for (int b = 0; b < k; ++b)
                            s -= pg.omega_at(i, a, b) * gradH[j * k + b].value();
                        for (int l = 0; l < n; ++l)
                            s -= pg.gamma_at(l, i, j) * gradH[l * k + a].value();
                        (*pg.hessH)[(i * n + j) * k + a] = s;
                    }
            pg.hess_normA2.emplace(static_cast<std::size_t>(n) * n);
            std::vector<int> gam(n, 0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    std::fill(gam.begin(), gam.end(), 0);
                    gam[i] += 1;
                    gam[j] += 1;
                    (*pg.hess_normA2)[i * n + j] = normA2j.partial(gam);
                }

            double c = pg.h_dot_hessH();
            if (pg.normA2 > pg.normA2_cutoff())
                pg.K2 = std::max(0.0, -c / std::sqrt(pg.normA2));
            else
                pg.K2 = 0.0;
        }
    }

    return pg;
}

// ---------------------------------------------------------------------
// PointGeometry contractions
// ---------------------------------------------------------------------

double PointGeometry::normH2() const {
    double s = 0.0;
    for (int a = 0; a < k; ++a) s += H[a] * H[a];
    return s;
}

double PointGeometry::norm_gradA2() const {
    const auto& ga = *gradA;
    double total = 0.0;
    std::vector<double> up(static_cast<std::size_t>(n) * n * n);
    for (int a = 0; a < k; ++a) {
        for (int c = 0; c < n; ++c)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q)
                            s += inv_at(i, p) * inv_at(j, q) *
                                 ga[((c * k + a) * n + p) * n + q];
                    up[(c * n + i) * n + j] = s;
                }
        for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) {
                double gcd = inv_at(c, d);
                if (gcd == 0.0) continue;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        total += gcd * up[(c * n + i) * n + j] *
                                 ga[((d * k + a) * n + i) * n + j];
            }
    }
    return total;
}

double PointGeometry::norm_gradH2() const {
    double s = 0.0;
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                s += inv_at(i, j) * gradH_at(i, a) * gradH_at(j, a);
    return s;
}

double PointGeometry::norm_grad_absA2() const {
    if (normA2 <= normA2_cutoff()) return 0.0;
    const auto& d = *grad_normA2;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += inv_at(i, j) * d[i] * d[j];
    return s / (4.0 * normA2);
}

double PointGeometry::h_dot_hessH() const {
    double s = 0.0;
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q)
                        s += inv_at(i, p) * inv_at(j, q) * h_at(a, i, j) *
                             hessH_at(p, q, a);
    return s;
}

double PointGeometry::norm_hessH2() const {
    double s = 0.0;
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q)
                        s += inv_at(i, p) * inv_at(j, q) * hessH_at(i, j, a) *
                             hessH_at(p, q, a);
    return s;
}

std::vector<double> PointGeometry::shape_operator(int a) const {
    std::vector<double> S(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int p = 0; p < n; ++p) s += inv_at(i, p) * h_at(a, p, j);
            S[i * n + j] = s;
        }
    return S;
}

double PointGeometry::cubic_contraction() const {
    std::vector<std::vector<double>> S(k);
    for (int a = 0; a < k; ++a) S[a] = shape_operator(a);
    double total = 0.0;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            double tr = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int l = 0; l < n; ++l)
                        tr += S[a][i * n + j] * S[b][j * n + l] * S[b][l * n + i];
            total += H[a] * tr;
        }
    return total;
}

double PointGeometry::quartic_contraction() const {
    std::vector<std::vector<double>> S(k);
    for (int a = 0; a < k; ++a) S[a] = shape_operator(a);
    double total = 0.0;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            double tr = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) tr += S[a][i * n + j] * S[b][j * n + i];
            total += tr * tr;
        }
    return total;
}

double PointGeometry::commutator_norm2() const {
    std::vector<std::vector<double>> S(k);
    for (int a = 0; a < k; ++a) S[a] = shape_operator(a);
    double total = 0.0;
    std::vector<double> C(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l)
                        s += S[a][i * n + l] * S[b][l * n + j] -
                             S[b][i * n + l] * S[a][l * n + j];
                    C[i * n + j] = s;
                }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q)
                            total += C[i * n + j] * C[p * n + q] * metric_at(i, p) *
                                     inv_at(j, q);
        }
    return total;
}

double PointGeometry::jacobi_forcing() const {
    double s = 0.0;
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i) {
            double covH = 0.0;
            for (int j = 0; j < n; ++j)
                covH += frame_coeff[i * n + j] * gradH_at(j, a);
            s += omega_n1[a * n + i] * covH;
        }
    return s;
}

double PointGeometry::rperp_pairing() const {
    double s = 0.0;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    double r = 0.0;
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q)
                            r += frame_coeff[i * n + p] * frame_coeff[j * n + q] *
                                 rperp_at(p, q, a, b);
                    s += omega_n2[((a * k + b) * n + i) * n + j] * r;
                }
    return s;
}

double PointGeometry::sectional_curvature(int i, int j) const {
    double denom = metric_at(i, i) * metric_at(j, j) -
                   metric_at(i, j) * metric_at(i, j);
    return riemann_at(i, j, j, i) / denom;
}

double PointGeometry::normA2_cutoff() const {
    return 1e-20 * (1.0 + normH2());
}

// ---------------------------------------------------------------------
// Scalar fields and the chart Laplacian
// ---------------------------------------------------------------------

ScalarField scalar_field(const GraphMap& graph, const std::string& name) {
    auto make = [graph](int depth, auto extract) -> ScalarField {
        return [graph, depth, extract](std::span<const double> x) {
            PointGeometry pg = build_point_geometry(graph, x, depth);
            return extract(pg);
        };
    };
    if (name == "normA2")
        return make(2, [](const PointGeometry& p) { return p.normA2; });
    if (name == "w") return make(2, [](const PointGeometry& p) { return p.w; });
    if (name == "normH2")
        return make(2, [](const PointGeometry& p) { return p.normH2(); });
    if (name == "sqrtg")
        return make(2, [](const PointGeometry& p) { return p.sqrt_g; });
    if (name == "K1") return make(3, [](const PointGeometry& p) { return *p.K1; });
    if (name == "K2") return make(4, [](const PointGeometry& p) { return *p.K2; });
    if (name.size() >= 2 && name[0] == 'H') {
        int a = std::atoi(name.c_str() + 1);
        if (a >= 1 && a <= graph.k)
            return make(2, [a](const PointGeometry& p) { return p.H[a - 1]; });
    }
    throw std::invalid_argument("unknown field name '" + name + "'");
}

MetricData metric_at(const GraphMap& graph, std::span<const double> x) {
    const int n = graph.n, k = graph.k;
    std::vector<Jet> grad(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) grad[a] = eval_jet(*graph.components[a], x, 1);
    MetricData md;
    md.metric.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = (i == j) ? 1.0 : 0.0;
            for (int a = 0; a < k; ++a)
                s += grad[a].gradient(i) * grad[a].gradient(j);
            md.metric[i * n + j] = s;
        }
    double det = det_double(md.metric, n);
    if (!(det > 0.0)) throw Error("singular metric");
    md.sqrt_g = std::sqrt(det);
    md.metric_inv = invert_double(md.metric, n);
    return md;
}

LaplaceEstimate laplace_beltrami(const GraphMap& graph, const ScalarField& field,
                                 std::span<const double> x, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    if (!graph.contains(x, 2.0 * step))
        throw DomainError("point too close to domain boundary");
    const int n = graph.n;

    auto divergence_form = [&](double hh) {
        std::vector<double> y(x.begin(), x.end());
        auto flux = [&](int i, std::span<const double> p) {
            MetricData md = metric_at(graph, p);
            std::vector<double> q(p.begin(), p.end());
            double s = 0.0;
            for (int j = 0; j < n; ++j) {
                q[j] = p[j] + hh;
                double fp = field(q);
                q[j] = p[j] - hh;
                double fm = field(q);
                q[j] = p[j];
                s += md.metric_inv[i * n + j] * (fp - fm) / (2.0 * hh);
            }
            return md.sqrt_g * s;
        };
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            y[i] = x[i] + hh;
            double fp = flux(i, y);
            y[i] = x[i] - hh;
            double fm = flux(i, y);
            y[i] = x[i];
            total += (fp - fm) / (2.0 * hh);
        }
        return total / metric_at(graph, x).sqrt_g;
    };

    LaplaceEstimate est;
    est.step_value = divergence_form(step);
    est.half_step_value = divergence_form(step / 2.0);
    est.richardson = (4.0 * est.half_step_value - est.step_value) / 3.0;
    return est;
}

std::vector<std::vector<double>> grid_points(
    const std::vector<std::array<double, 2>>& box, int per_axis) {
    const int n = static_cast<int>(box.size());
    std::vector<std::vector<double>> pts;
    std::vector<int> idx(n, 0);
    const long total = static_cast<long>(std::pow(per_axis, n));
    pts.reserve(total);
    for (long c = 0; c < total; ++c) {
        long rem = c;
        std::vector<double> p(n);
        for (int i = n - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(rem % per_axis);
            rem /= per_axis;
        }
        for (int i = 0; i < n; ++i) {
            double width = (box[i][1] - box[i][0]) / per_axis;
            p[i] = box[i][0] + (idx[i] + 0.5) * width;
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

}  // namespace graphcurv
