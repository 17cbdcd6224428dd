#include "graphcurv/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "graphcurv/errors.hpp"

namespace graphcurv {

namespace {

// Relative residual with the scale floor guarding flat points.
double relative_residual(double abs_res, double left, double right,
                         double scale) {
    if (abs_res == 0.0) return 0.0;
    const double floor = std::numeric_limits<double>::epsilon() * 1e4 * scale;
    const double denom = std::max({std::abs(left), std::abs(right), floor});
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return abs_res / denom;
}

double contracted_norm2(const PointGeometry& pg, const std::vector<double>& r) {
    const int n = pg.n, k = pg.k;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    double gip = pg.inv_at(i, p), gjq = pg.inv_at(j, q);
                    for (int a = 0; a < k; ++a)
                        for (int b = 0; b < k; ++b)
                            s += gip * gjq * r[((i * n + j) * k + a) * k + b] *
                                 r[((p * n + q) * k + a) * k + b];
                }
    return s;
}

}  // namespace

double simons_inequality_constant(int n, double eps) {
    return (2.0 / (n + eps)) * (1.0 + (n - 1) / eps);
}

double subsolution_constant(int n) { return 2.0 * (1.0 + std::sqrt(double(n))); }

double flatness_threshold(const PointGeometry& pg) {
    return 1e-12 * (1.0 + pg.normA2 * pg.normA2);
}

void require_flat(const PointGeometry& pg) {
    if (pg.normRperp2 > flatness_threshold(pg))
        throw HypothesisError(
            "flat normal bundle required: shape operators do not commute at "
            "the evaluated point");
}

ResidualReport check_gauss(const PointGeometry& pg, double tol) {
    if (!pg.riemann_chart)
        throw std::invalid_argument(
            "check_gauss needs geometry built with depth >= 3");
    ResidualReport rep;
    rep.name = "gauss";
    rep.x = pg.x;
    rep.tolerance = tol;
    const int n = pg.n;
    double worst = -1.0, scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int kk = 0; kk < n; ++kk)
                for (int l = 0; l < n; ++l) {
                    double lhs = (*pg.riemann_chart)[((i * n + j) * n + kk) * n + l];
                    double rhs = pg.riemann_at(i, j, kk, l);
                    scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
                    double d = std::abs(lhs - rhs);
                    if (d > worst) {
                        worst = d;
                        rep.left = lhs;
                        rep.right = rhs;
                    }
                }
    rep.abs_residual = worst;
    rep.rel_residual = relative_residual(worst, scale, scale, scale);
    rep.pass = rep.rel_residual <= tol;
    return rep;
}

ResidualReport check_codazzi(const PointGeometry& pg, double tol) {
    if (!pg.gradA)
        throw std::invalid_argument(
            "check_codazzi needs geometry built with depth >= 3");
    ResidualReport rep;
    rep.name = "codazzi";
    rep.x = pg.x;
    rep.tolerance = tol;
    const int n = pg.n, k = pg.k;
    double worst = -1.0, dmag = 0.0, hmag = 0.0, gmag = 0.0, omag = 0.0;
    for (double v : *pg.gradA) dmag = std::max(dmag, std::abs(v));
    for (double v : pg.h) hmag = std::max(hmag, std::abs(v));
    for (double v : pg.christoffel) gmag = std::max(gmag, std::abs(v));
    for (double v : pg.omega) omag = std::max(omag, std::abs(v));
    for (int a = 0; a < k; ++a)
        for (int c = 0; c < n; ++c)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double lhs = pg.gradA_at(c, a, i, j);
                    double rhs = pg.gradA_at(i, a, c, j);
                    double d = std::abs(lhs - rhs);
                    if (d > worst) {
                        worst = d;
                        rep.left = lhs;
                        rep.right = rhs;
                    }
                }
    rep.abs_residual = worst;
    // Parallel second fundamental form (umbilic surfaces) makes this
    // 0/0: a residual below the roundoff bound of the covariant
    // derivative counts as exact.
    const double term_scale = dmag + hmag * (1.0 + 2.0 * gmag + omag);
    const double noise =
        512.0 * std::numeric_limits<double>::epsilon() * term_scale;
    const double scale = std::sqrt(std::max(pg.norm_gradA2(), 0.0));
    if (worst <= noise)
        rep.rel_residual = 0.0;
    else
        rep.rel_residual =
            relative_residual(worst, scale, scale, std::max(scale, 1.0));
    rep.pass = rep.rel_residual <= tol;
    return rep;
}

ResidualReport check_ricci(const PointGeometry& pg, double tol) {
    if (!pg.rperp_chart)
        throw std::invalid_argument(
            "check_ricci needs geometry built with depth >= 3");
    ResidualReport rep;
    rep.name = "ricci";
    rep.x = pg.x;
    rep.tolerance = tol;
    const int n = pg.n, k = pg.k;
    double worst = -1.0, scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) {
                    double lhs = (*pg.rperp_chart)[((i * n + j) * k + a) * k + b];
                    double rhs = pg.rperp_at(i, j, a, b);
                    scale = std::max({scale, std::abs(lhs), std::abs(rhs),
                                      pg.normA2});
                    double d = std::abs(lhs - rhs);
                    if (d > worst) {
                        worst = d;
                        rep.left = lhs;
                        rep.right = rhs;
                    }
                }
    rep.abs_residual = worst;
    rep.rel_residual = relative_residual(worst, scale, scale, scale);
    rep.pass = rep.rel_residual <= tol;
    return rep;
}

ResidualReport check_flatness(const GraphMap& graph,
                              const std::vector<std::vector<double>>& points,
                              double tol) {
    ResidualReport rep;
    rep.name = "flatness";
    rep.tolerance = tol;
    double sup_conn = 0.0, sup_comm = 0.0, sup_a2 = 0.0;
    for (const auto& p : points) {
        PointGeometry pg = build_point_geometry(graph, p, 3);
        double conn = std::sqrt(std::max(contracted_norm2(pg, *pg.rperp_chart), 0.0));
        double comm = std::sqrt(std::max(pg.commutator_norm2(), 0.0));
        sup_a2 = std::max(sup_a2, pg.normA2);
        if (conn > sup_conn) {
            sup_conn = conn;
            rep.x = p;
        }
        sup_comm = std::max(sup_comm, comm);
    }
    rep.left = sup_conn;
    rep.right = sup_comm;
    const double scale = std::max(1.0, sup_a2);
    rep.abs_residual = std::max(sup_conn, sup_comm);
    rep.rel_residual = rep.abs_residual / scale;
    rep.pass = rep.rel_residual <= tol;
    return rep;
}

ResidualReport check_simons_identity(const GraphMap& graph,
                                     std::span<const double> x, double step,
                                     double tol) {
    PointGeometry pg = build_point_geometry(graph, x, 4);
    LaplaceEstimate lap =
        laplace_beltrami(graph, scalar_field(graph, "normA2"), x, step);
    ResidualReport rep;
    rep.name = "simons_identity";
    rep.x.assign(x.begin(), x.end());
    rep.tolerance = tol;
    rep.left = 0.5 * lap.richardson;
    const double grad2 = pg.norm_gradA2();
    const double hess = pg.h_dot_hessH();
    const double cubic = pg.cubic_contraction();
    const double quartic = pg.quartic_contraction();
    rep.right = grad2 + hess + cubic - quartic - pg.normRperp2;
    rep.abs_residual = std::abs(rep.left - rep.right);
    // Both sides may cancel to zero (constant |A|^2), so the meaningful
    // denominator is the size of the terms being combined.
    const double scale = std::max({std::abs(rep.left), std::abs(rep.right),
                                   grad2, std::abs(hess), std::abs(cubic),
                                   quartic, pg.normRperp2});
    rep.rel_residual = scale > 0.0 ? rep.abs_residual / scale
                                   : (rep.abs_residual > 0.0 ? 1.0 : 0.0);
    rep.pass = rep.rel_residual <= tol;
    return rep;
}

ResidualReport check_jacobi(const GraphMap& graph, std::span<const double> x,
                            double step, double tol) {
    PointGeometry pg = build_point_geometry(graph, x, 3);
    LaplaceEstimate lap =
        laplace_beltrami(graph, scalar_field(graph, "w"), x, step);
    ResidualReport rep;
    rep.name = "jacobi";
    rep.x.assign(x.begin(), x.end());
    rep.tolerance = tol;
    rep.left = lap.richardson;
    const double forcing = pg.jacobi_forcing();
    const double pairing = pg.rperp_pairing();
    rep.right = forcing - pg.normA2 * pg.w - 2.0 * pairing;
    rep.abs_residual = std::abs(rep.left - rep.right);
    const double scale = std::max({std::abs(rep.left), std::abs(rep.right),
                                   pg.normA2 * pg.w, std::abs(forcing),
                                   2.0 * std::abs(pairing)});
    rep.rel_residual = scale > 0.0 ? rep.abs_residual / scale
                                   : (rep.abs_residual > 0.0 ? 1.0 : 0.0);
    rep.pass = rep.rel_residual <= tol;
    return rep;
}

ResidualReport check_simons_inequality(const PointGeometry& pg, double eps,
                                       double tol) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (!pg.hessH)
        throw std::invalid_argument(
            "check_simons_inequality needs geometry built with depth 4");
    require_flat(pg);
    ResidualReport rep;
    rep.name = "simons_inequality";
    rep.x = pg.x;
    if (pg.normA2 <= pg.normA2_cutoff()) {
        rep.skipped = true;
        rep.pass = true;
        rep.note = "skipped: |A| below cutoff (weak-sense point)";
        rep.margin = 0.0;
        return rep;
    }
    const int n = pg.n;
    const double grad2 = pg.norm_gradA2();
    const double hess = pg.h_dot_hessH();
    const double cubic = pg.cubic_contraction();
    const double quartic = pg.quartic_contraction();
    const double c_eps = simons_inequality_constant(n, eps);
    rep.left = grad2 + hess + cubic - quartic;
    rep.right = (1.0 + 2.0 / (n + eps)) * pg.norm_grad_absA2() + hess + cubic -
                pg.normA2 * pg.normA2 - c_eps * pg.norm_gradH2();
    rep.margin = rep.left - rep.right;
    const double scale = std::max({std::abs(rep.left), std::abs(rep.right),
                                   pg.normA2 * pg.normA2, grad2});
    rep.tolerance = tol * std::max(scale, 1.0);
    rep.abs_residual = std::max(0.0, -(*rep.margin));
    rep.rel_residual = scale > 0.0 ? rep.abs_residual / scale : 0.0;
    rep.pass = *rep.margin >= -rep.tolerance;
    return rep;
}

ResidualReport check_subsolution(const PointGeometry& pg, double tol) {
    if (!pg.hessH)
        throw std::invalid_argument(
            "check_subsolution needs geometry built with depth 4");
    require_flat(pg);
    ResidualReport rep;
    rep.name = "subsolution";
    rep.x = pg.x;
    const double delta_a2 = 2.0 * (pg.norm_gradA2() + pg.h_dot_hessH() +
                                   pg.cubic_contraction() -
                                   pg.quartic_contraction());
    const double k2 = pg.K2 ? *pg.K2 : 0.0;
    rep.left = delta_a2 + subsolution_constant(pg.n) * pg.normA2 * pg.normA2;
    rep.right = -2.0 * k2 * std::sqrt(std::max(pg.normA2, 0.0));
    rep.margin = rep.left - rep.right;
    const double scale = std::max({std::abs(rep.left), std::abs(rep.right),
                                   pg.normA2 * pg.normA2});
    rep.tolerance = tol * std::max(scale, 1.0);
    rep.abs_residual = std::max(0.0, -(*rep.margin));
    rep.rel_residual = scale > 0.0 ? rep.abs_residual / scale : 0.0;
    rep.pass = *rep.margin >= -rep.tolerance;
    return rep;
}

}  // namespace graphcurv
