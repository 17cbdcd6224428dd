#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "graphcurv/builtins.hpp"
#include "graphcurv/errors.hpp"
#include "graphcurv/identities.hpp"

using namespace graphcurv;

namespace {

GraphMap graph_of(int n, int k, std::vector<std::string> psi) {
    GraphMap g;
    g.n = n;
    g.k = k;
    for (const auto& s : psi) g.components.push_back(parse(s, n));
    return g;
}

// Random polynomial components of total degree <= 4 with small
// coefficients, so every chart point is usable.
GraphMap random_polynomial_graph(std::mt19937& rng, int n, int k) {
    std::uniform_real_distribution<double> cdist(-0.4, 0.4);
    GraphMap g;
    g.n = n;
    g.k = k;
    const Jet probe(n, 4);
    const auto& lay = probe.layout();
    for (int a = 0; a < k; ++a) {
        std::string text = "0";
        for (int p = 1; p < lay.size(); ++p) {
            if (rng() % 3 != 0) continue;
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", cdist(rng));
            std::string mono = std::string("(") + buf + ")";
            auto exps = lay.exponents(p);
            for (int v = 0; v < n; ++v)
                if (exps[v] > 0)
                    mono += " * x" + std::to_string(v + 1) + "^" +
                            std::to_string(static_cast<int>(exps[v]));
            text += " + " + mono;
        }
        g.components.push_back(parse(text, n));
    }
    return g;
}

std::vector<double> random_point(std::mt19937& rng, int n, double box) {
    std::uniform_real_distribution<double> dist(-box, box);
    std::vector<double> x(n);
    for (double& v : x) v = dist(rng);
    return x;
}

}  // namespace

TEST_CASE("gauss check on the builtins") {
    std::vector<double> x{0.1, -0.2};
    PointGeometry plane = build_point_geometry(builtin_graph("plane"), x, 3);
    ResidualReport r = check_gauss(plane);
    CHECK(r.pass);
    CHECK(r.abs_residual == 0.0);

    PointGeometry cap = build_point_geometry(builtin_graph("sphere-cap"), x, 3);
    ResidualReport rc = check_gauss(cap);
    CHECK(rc.pass);
    CHECK(rc.rel_residual < 1e-9);
    // both routes reproduce the constant sectional curvature
    CHECK(cap.sectional_curvature(0, 1) == doctest::Approx(0.25).epsilon(1e-9));
    const int n = cap.n;
    double chart_1221 = (*cap.riemann_chart)[((0 * n + 1) * n + 1) * n + 0];
    CHECK(chart_1221 == doctest::Approx(cap.riemann_at(0, 1, 1, 0)).epsilon(1e-9));
}

TEST_CASE("gauss check on random cubic graphs") {
    std::mt19937 rng(101);
    GraphMap g = graph_of(
        3, 2,
        {"0.3*x1^3 - 0.2*x2^2*x3 + 0.1*x1*x2", "0.25*x2^3 + 0.15*x1*x3 - 0.1*x3^2"});
    for (int rep = 0; rep < 20; ++rep) {
        auto x = random_point(rng, 3, 0.8);
        ResidualReport r = check_gauss(build_point_geometry(g, x, 3));
        CHECK(r.pass);
        CHECK(r.rel_residual <= 1e-6);
    }
}

TEST_CASE("codazzi symmetry fixes the normal-connection sign") {
    std::vector<double> x{0.3, -0.2};
    ResidualReport flat =
        check_codazzi(build_point_geometry(builtin_graph("plane"), x, 3));
    CHECK(flat.pass);
    CHECK(flat.abs_residual == 0.0);
    ResidualReport aff =
        check_codazzi(build_point_geometry(builtin_graph("affine"), x, 3));
    CHECK(aff.abs_residual == 0.0);

    // a generic quartic with genuinely non-flat normal bundle
    GraphMap g = graph_of(2, 2,
                          {"0.4*x1^4 - 0.3*x1*x2^2 + 0.2*x2^3",
                           "0.5*x1^2*x2^2 + 0.25*x1^3 - 0.2*x2^4"});
    std::mt19937 rng(202);
    for (int rep = 0; rep < 10; ++rep) {
        auto x = random_point(rng, 2, 0.8);
        PointGeometry pg = build_point_geometry(g, x, 3);
        CHECK(pg.normRperp2 > 1e-8);  // the omega term must matter
        ResidualReport r = check_codazzi(pg);
        CHECK(r.pass);
        CHECK(r.rel_residual <= 1e-7);
    }
}

TEST_CASE("ricci check routes agree") {
    std::vector<double> x{0.25, 0.15};
    // codimension one: both sides vanish identically
    ResidualReport one =
        check_ricci(build_point_geometry(builtin_graph("sphere-cap"), x, 3));
    CHECK(one.pass);
    CHECK(std::abs(one.left) < 1e-12);
    CHECK(std::abs(one.right) < 1e-12);

    ResidualReport rank1 =
        check_ricci(build_point_geometry(builtin_graph("rank-one-flat"), x, 3));
    CHECK(rank1.pass);
    CHECK(std::abs(rank1.left) < 1e-10);

    // generic quadratic: nonzero normal curvature, equal along both routes
    PointGeometry pg =
        build_point_geometry(builtin_graph("nonflat-quadratic"), x, 3);
    CHECK(pg.normRperp2 > 1e-6);
    ResidualReport r = check_ricci(pg);
    CHECK(r.pass);
    CHECK(r.rel_residual <= 1e-7);
    double sup_entry = 0.0;
    for (double v : *pg.rperp_chart) sup_entry = std::max(sup_entry, std::abs(v));
    CHECK(sup_entry > 1e-6);
}

TEST_CASE("flatness classification") {
    auto grid = grid_points({{{-0.8, 0.8}, {-0.8, 0.8}}}, 5);
    ResidualReport k1 = check_flatness(builtin_graph("scherk"), grid);
    CHECK(k1.pass);
    CHECK(k1.left <= 1e-10);

    ResidualReport rank1 = check_flatness(builtin_graph("rank-one-flat"), grid);
    CHECK(rank1.pass);
    CHECK(rank1.left <= 1e-10);
    CHECK(rank1.right <= 1e-10);

    ResidualReport bad = check_flatness(builtin_graph("nonflat-quadratic"), grid);
    CHECK(!bad.pass);
    CHECK(bad.left > 1e-3);
    CHECK(bad.right > 1e-3);
}

TEST_CASE("two-path elliptic identity for |A|^2") {
    std::vector<double> x{0.1, 0.2};
    ResidualReport plane =
        check_simons_identity(builtin_graph("plane"), x, 1e-3);
    CHECK(plane.pass);
    CHECK(std::abs(plane.left) < 1e-10);
    CHECK(std::abs(plane.right) < 1e-10);

    ResidualReport aff = check_simons_identity(builtin_graph("affine"), x, 1e-3);
    CHECK(aff.pass);

    ResidualReport cap =
        check_simons_identity(builtin_graph("sphere-cap"), x, 1e-3);
    CHECK(cap.pass);
    CHECK(cap.rel_residual <= 1e-4);

    ResidualReport sch = check_simons_identity(builtin_graph("scherk"), x, 1e-3);
    CHECK(sch.pass);

    // non-flat normal bundle: the |Rperp|^2 term is load-bearing
    PointGeometry nf =
        build_point_geometry(builtin_graph("nonflat-quadratic"), x, 4);
    CHECK(nf.normRperp2 > 1e-6);
    ResidualReport nfr =
        check_simons_identity(builtin_graph("nonflat-quadratic"), x, 1e-3);
    CHECK(nfr.pass);
}

TEST_CASE("two-path weight equation") {
    std::vector<double> x{0.3, 0.2};
    ResidualReport plane = check_jacobi(builtin_graph("plane"), x, 1e-3);
    CHECK(plane.pass);

    GraphMap scherk = builtin_graph("scherk");
    ResidualReport sch = check_jacobi(scherk, x, 1e-3);
    CHECK(sch.pass);
    CHECK(sch.rel_residual <= 1e-4);
    // minimal: the forcing is zero, so Delta w = -|A|^2 w
    PointGeometry sp = build_point_geometry(scherk, x, 3);
    CHECK(std::sqrt(sp.normH2()) <= 1e-8);
    CHECK(std::abs(sp.jacobi_forcing()) <= 1e-8);

    std::vector<double> y{0.1, 0.2};
    ResidualReport cap = check_jacobi(builtin_graph("sphere-cap"), y, 1e-3);
    CHECK(cap.pass);

    // codimension two with curvature in the normal bundle exercises both
    // the forcing and the pairing term
    ResidualReport r1 = check_jacobi(builtin_graph("rank-one-flat"), y, 1e-3);
    CHECK(r1.pass);
    ResidualReport nf = check_jacobi(builtin_graph("nonflat-quadratic"), y, 1e-3);
    CHECK(nf.pass);
}

TEST_CASE("identities on the three-dimensional sphere cap") {
    GraphMap g;
    g.n = 3;
    g.k = 1;
    g.components.push_back(parse("sqrt(4 - x1^2 - x2^2 - x3^2)", 3));
    g.domain = {{{-0.9, 0.9}, {-0.9, 0.9}, {-0.9, 0.9}}};
    std::vector<double> x{0.2, -0.1, 0.25};
    PointGeometry pg = build_point_geometry(g, x, 4);
    CHECK(check_gauss(pg).pass);
    CHECK(check_codazzi(pg).pass);
    CHECK(check_ricci(pg).pass);
    CHECK(check_simons_identity(g, x, 1e-3).pass);
    CHECK(check_jacobi(g, x, 1e-3).pass);
    for (double eps : {0.1, 1.0})
        CHECK(check_simons_inequality(pg, eps).pass);
    ResidualReport sub = check_subsolution(pg);
    CHECK(sub.pass);
    CHECK(*sub.margin >= 0.0);
}

TEST_CASE("two-path identities on random polynomial graphs") {
    std::mt19937 rng(303);
    for (int rep = 0; rep < 6; ++rep) {
        const int n = 2;
        const int k = 1 + static_cast<int>(rng() % 2);
        GraphMap g = random_polynomial_graph(rng, n, k);
        auto x = random_point(rng, n, 0.4);
        ResidualReport si = check_simons_identity(g, x, 1e-3);
        CHECK(si.pass);
        ResidualReport ja = check_jacobi(g, x, 1e-3);
        CHECK(ja.pass);
    }
}

TEST_CASE("refined gradient inequality margins") {
    auto grid = grid_points({{{-0.9, 0.9}, {-0.9, 0.9}}}, 10);
    for (const char* name : {"sphere-cap", "scherk", "rank-one-flat"}) {
        GraphMap g = builtin_graph(name);
        for (double eps : {0.1, 0.5, 1.0, 5.0}) {
            for (auto& x : grid) {
                PointGeometry pg = build_point_geometry(g, x, 4);
                ResidualReport r = check_simons_inequality(pg, eps);
                CHECK(r.pass);
                if (!r.skipped) CHECK(*r.margin >= -r.tolerance);
            }
        }
    }
    // minimal case with eps near zero
    GraphMap scherk = builtin_graph("scherk");
    for (auto& x : grid) {
        PointGeometry pg = build_point_geometry(scherk, x, 4);
        ResidualReport r = check_simons_inequality(pg, 1e-3);
        CHECK(r.pass);
    }
    // affine graphs skip at |A| = 0
    std::vector<double> x{0.2, 0.3};
    PointGeometry flat = build_point_geometry(builtin_graph("affine"), x, 4);
    ResidualReport skip = check_simons_inequality(flat, 1.0);
    CHECK(skip.skipped);
    CHECK(skip.pass);
    // non-flat input is a hypothesis violation
    PointGeometry nf =
        build_point_geometry(builtin_graph("nonflat-quadratic"), x, 4);
    CHECK_THROWS_AS(check_simons_inequality(nf, 1.0), HypothesisError);
}

TEST_CASE("subsolution margins") {
    std::vector<double> x{0.2, -0.3};
    ResidualReport plane =
        check_subsolution(build_point_geometry(builtin_graph("plane"), x, 4));
    CHECK(plane.pass);
    CHECK(*plane.margin == 0.0);

    auto grid = grid_points({{{-0.9, 0.9}, {-0.9, 0.9}}}, 10);
    for (const char* name : {"sphere-cap", "scherk", "rank-one-flat"}) {
        GraphMap g = builtin_graph(name);
        for (auto& p : grid) {
            ResidualReport r = check_subsolution(build_point_geometry(g, p, 4));
            CHECK(r.pass);
            CHECK(*r.margin >= 0.0);
        }
    }
}

TEST_CASE("margins hold on random rank-one flat families") {
    // psi = v * phi(x) keeps the normal bundle flat for any profile phi
    std::mt19937 rng(909);
    std::uniform_real_distribution<double> vdist(-2.0, 2.0);
    const char* profiles[] = {
        "sin(x1) * cos(x2)",
        "x1^2 - 0.5 * x2^3 + 0.25 * x1 * x2",
        "exp(0.5 * x1) * sin(x2) + x1 * x2^2",
        "sinh(0.5 * x1) - cos(x2) * x1^2",
    };
    auto grid = grid_points({{{-0.8, 0.8}, {-0.8, 0.8}}}, 5);
    double max_k2 = 0.0;
    for (const char* profile : profiles) {
        for (int rep = 0; rep < 3; ++rep) {
            GraphMap g;
            g.n = 2;
            g.k = 2;
            char c1[40], c2[40];
            std::snprintf(c1, sizeof(c1), "%.6f", vdist(rng));
            std::snprintf(c2, sizeof(c2), "%.6f", vdist(rng));
            g.components.push_back(parse(
                std::string("(") + c1 + ") * (" + profile + ")", 2));
            g.components.push_back(parse(
                std::string("(") + c2 + ") * (" + profile + ")", 2));
            for (auto& x : grid) {
                PointGeometry pg = build_point_geometry(g, x, 4);
                CHECK(pg.normRperp2 <= flatness_threshold(pg));
                max_k2 = std::max(max_k2, *pg.K2);
                for (double eps : {0.1, 1.0, 5.0})
                    CHECK(check_simons_inequality(pg, eps).pass);
                ResidualReport sub = check_subsolution(pg);
                CHECK(sub.pass);
                CHECK(*sub.margin >= 0.0);
            }
        }
    }
    // the forcing terms must be genuinely exercised somewhere
    CHECK(max_k2 > 0.1);
}

TEST_CASE("K2 never exceeds the Hessian norm") {
    auto grid = grid_points({{{-0.9, 0.9}, {-0.9, 0.9}}}, 6);
    for (const char* name :
         {"sphere-cap", "scherk", "rank-one-flat", "nonflat-quadratic"}) {
        GraphMap g = builtin_graph(name);
        for (auto& p : grid) {
            PointGeometry pg = build_point_geometry(g, p, 4);
            CHECK(*pg.K2 <=
                  std::sqrt(std::max(pg.norm_hessH2(), 0.0)) + 1e-12);
        }
    }
}

TEST_CASE("ricci residual and commutator norm vanish together") {
    auto grid = grid_points({{{-0.8, 0.8}, {-0.8, 0.8}}}, 4);
    for (const char* name : {"rank-one-flat", "nonflat-quadratic"}) {
        GraphMap g = builtin_graph(name);
        for (auto& p : grid) {
            PointGeometry pg = build_point_geometry(g, p, 3);
            // the stored normal curvature is the commutator expression
            CHECK(pg.normRperp2 ==
                  doctest::Approx(pg.commutator_norm2()).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("derived constants") {
    CHECK(simons_inequality_constant(2, 1.0) ==
          doctest::Approx((2.0 / 3.0) * 2.0));
    CHECK(simons_inequality_constant(3, 0.5) ==
          doctest::Approx((2.0 / 3.5) * (1.0 + 2.0 / 0.5)));
    CHECK(subsolution_constant(4) == doctest::Approx(6.0));
}
