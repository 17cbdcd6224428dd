#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "graphcurv/builtins.hpp"
#include "graphcurv/errors.hpp"
#include "graphcurv/geometry.hpp"

using namespace graphcurv;

namespace {

GraphMap graph_of(int n, int k, std::vector<std::string> psi,
                  std::optional<std::vector<std::array<double, 2>>> dom =
                      std::nullopt) {
    GraphMap g;
    g.n = n;
    g.k = k;
    for (const auto& s : psi) g.components.push_back(parse(s, n));
    g.domain = std::move(dom);
    return g;
}

std::vector<std::vector<double>> random_orthogonal_refs(std::mt19937& rng,
                                                        int k, int m,
                                                        int offset) {
    std::normal_distribution<double> dist;
    std::vector<std::vector<double>> q(k, std::vector<double>(k));
    for (auto& row : q)
        for (auto& v : row) v = dist(rng);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < i; ++j) {
            double c = 0.0;
            for (int l = 0; l < k; ++l) c += q[i][l] * q[j][l];
            for (int l = 0; l < k; ++l) q[i][l] -= c * q[j][l];
        }
        double len = 0.0;
        for (int l = 0; l < k; ++l) len += q[i][l] * q[i][l];
        len = std::sqrt(len);
        for (int l = 0; l < k; ++l) q[i][l] /= len;
    }
    std::vector<std::vector<double>> refs(k, std::vector<double>(m, 0.0));
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) refs[a][offset + b] = q[a][b];
    return refs;
}

}  // namespace

TEST_CASE("flat plane geometry") {
    GraphMap g = builtin_graph("plane");
    std::vector<double> x{0.7, -0.3};
    PointGeometry pg = build_point_geometry(g, x, 4);
    CHECK(pg.metric_at(0, 0) == doctest::Approx(1.0));
    CHECK(pg.metric_at(0, 1) == doctest::Approx(0.0));
    CHECK(pg.normA2 == doctest::Approx(0.0));
    CHECK(pg.normH2() == doctest::Approx(0.0));
    CHECK(pg.normRperp2 == doctest::Approx(0.0));
    CHECK(pg.w == doctest::Approx(1.0));
    CHECK(*pg.K1 == doctest::Approx(0.0));
    CHECK(*pg.K2 == doctest::Approx(0.0));
    for (double v : pg.h) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("sphere cap oracle") {
    GraphMap g = builtin_graph("sphere-cap");  // radius 2
    std::vector<double> apex{0.0, 0.0};
    PointGeometry pg = build_point_geometry(g, apex, 4);
    CHECK(pg.normA2 == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::sqrt(pg.normH2()) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pg.w == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pg.sectional_curvature(0, 1) == doctest::Approx(0.25).epsilon(1e-10));
    // h = (1/r) g at the apex, up to the normal orientation
    const double sign = pg.h_at(0, 0, 0) > 0 ? 1.0 : -1.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(sign * pg.h_at(0, i, j) ==
                  doctest::Approx(0.5 * pg.metric_at(i, j)).epsilon(1e-10));

    // |A|^2 and |H| are constant over the whole sphere
    std::vector<double> p{0.6, -0.45};
    PointGeometry pg2 = build_point_geometry(g, p, 4);
    CHECK(pg2.normA2 == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::sqrt(pg2.normH2()) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(pg2.sectional_curvature(0, 1) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(*pg2.K1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(*pg2.K2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("three-dimensional sphere cap oracle") {
    GraphMap g = graph_of(3, 1, {"sqrt(4 - x1^2 - x2^2 - x3^2)"},
                          {{{-0.9, 0.9}, {-0.9, 0.9}, {-0.9, 0.9}}});
    std::vector<double> apex{0.0, 0.0, 0.0};
    PointGeometry pg = build_point_geometry(g, apex, 4);
    CHECK(pg.normA2 == doctest::Approx(3.0 / 4.0).epsilon(1e-10));
    CHECK(std::sqrt(pg.normH2()) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(pg.w == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            CHECK(pg.sectional_curvature(i, j) ==
                  doctest::Approx(0.25).epsilon(1e-10));

    std::vector<double> p{0.4, -0.3, 0.2};
    PointGeometry pg2 = build_point_geometry(g, p, 4);
    CHECK(pg2.normA2 == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(*pg2.K1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(*pg2.K2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("affine graph") {
    GraphMap g = builtin_graph("affine");
    std::vector<double> x{1.5, -2.5};
    PointGeometry pg = build_point_geometry(g, x, 4);
    CHECK(pg.normA2 == doctest::Approx(0.0));
    CHECK(pg.w == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("scherk graph is minimal") {
    GraphMap g = builtin_graph("scherk");
    for (auto& x : grid_points({{{-0.9, 0.9}, {-0.9, 0.9}}}, 4)) {
        PointGeometry pg = build_point_geometry(g, x, 3);
        CHECK(std::sqrt(pg.normH2()) < 1e-12);
        CHECK(std::sqrt(pg.norm_gradH2()) < 1e-10);
        CHECK(pg.normA2 > 0.0);
    }
}

TEST_CASE("normal frame is orthonormal and normal") {
    GraphMap g = graph_of(3, 2, {"sin(x1)*x3 + x2^2", "exp(x1*x2) - x3"});
    std::vector<double> x{0.3, -0.2, 0.5};
    PointGeometry pg = build_point_geometry(g, x, 2);
    const int n = 3, k = 2, m = 5;
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            double dot = 0.0;
            for (int c = 0; c < m; ++c)
                dot += pg.normal[a * m + c] * pg.normal[b * m + c];
            CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
        }
        for (int i = 0; i < n; ++i) {
            double dot = 0.0;
            for (int c = 0; c < m; ++c)
                dot += pg.normal[a * m + c] * pg.tangent[i * m + c];
            CHECK(std::abs(dot) < 1e-12);
        }
    }
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b)
                CHECK(pg.omega_at(i, a, b) ==
                      doctest::Approx(-pg.omega_at(i, b, a)).epsilon(1e-12));
}

TEST_CASE("metric compatibility of the connection") {
    GraphMap g = graph_of(2, 2, {"sin(x1)*cos(x2)", "x1^3 - x2^2 + x1*x2"});
    for (auto& x : grid_points({{{-0.8, 0.8}, {-0.8, 0.8}}}, 3)) {
        PointGeometry pg = build_point_geometry(g, x, 3);
        const int n = 2;
        const double h = 1e-5;
        for (int c = 0; c < n; ++c) {
            std::vector<double> xp(x), xm(x);
            xp[c] += h;
            xm[c] -= h;
            MetricData mp = metric_at(g, xp), mm = metric_at(g, xm);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double dg = (mp.metric[i * n + j] - mm.metric[i * n + j]) /
                                (2.0 * h);
                    double corr = 0.0;
                    for (int l = 0; l < n; ++l)
                        corr += pg.gamma_at(l, c, i) * pg.metric_at(l, j) +
                                pg.gamma_at(l, c, j) * pg.metric_at(i, l);
                    CHECK(dg == doctest::Approx(corr).epsilon(1e-9).scale(1.0));
                }
        }
    }
}

TEST_CASE("frame invariance under rotated normal references") {
    GraphMap g = graph_of(2, 2, {"sin(x1)*cos(x2) + x1*x2", "x1^2 - x2^3"});
    std::mt19937 rng(31337);
    std::vector<double> x{0.4, -0.3};
    PointGeometry base = build_point_geometry(g, x, 4);
    for (int rep = 0; rep < 5; ++rep) {
        BuildOptions opts;
        opts.normal_reference = random_orthogonal_refs(rng, 2, 4, 2);
        PointGeometry rot = build_point_geometry(g, x, 4, opts);
        CHECK(rot.normA2 == doctest::Approx(base.normA2).epsilon(1e-9));
        CHECK(rot.normH2() == doctest::Approx(base.normH2()).epsilon(1e-9));
        CHECK(rot.normRperp2 == doctest::Approx(base.normRperp2).epsilon(1e-9));
        CHECK(rot.norm_gradA2() ==
              doctest::Approx(base.norm_gradA2()).epsilon(1e-9));
        CHECK(rot.h_dot_hessH() ==
              doctest::Approx(base.h_dot_hessH()).epsilon(1e-9));
        CHECK(*rot.K1 == doctest::Approx(*base.K1).epsilon(1e-9));
        CHECK(*rot.K2 == doctest::Approx(*base.K2).epsilon(1e-9));
        CHECK(rot.w == doctest::Approx(base.w).epsilon(1e-12));
    }
}

TEST_CASE("scaling laws") {
    GraphMap sphere = builtin_graph("sphere-cap");
    GraphMap scaled = scale_graph(sphere, 3.0);
    std::vector<double> apex{0.0, 0.0};
    PointGeometry pg = build_point_geometry(scaled, apex, 2);
    CHECK(pg.normA2 == doctest::Approx(0.5 / 9.0).epsilon(1e-10));

    GraphMap affine = builtin_graph("affine");
    for (double lam : {0.5, 2.0, 10.0}) {
        GraphMap sa = scale_graph(affine, lam);
        std::vector<double> x{0.3, 0.4};
        PointGeometry pa = build_point_geometry(sa, x, 2);
        CHECK(pa.normA2 == doctest::Approx(0.0));
    }

    GraphMap g = graph_of(2, 2, {"sin(x1)*cos(x2)", "x1^2 - x2^3"});
    std::vector<double> x{0.25, -0.15};
    PointGeometry base = build_point_geometry(g, x, 2);
    for (double lam : {0.5, 2.0, 10.0}) {
        GraphMap gs = scale_graph(g, lam);
        std::vector<double> xs{lam * x[0], lam * x[1]};
        PointGeometry ps = build_point_geometry(gs, xs, 2);
        CHECK(ps.normA2 ==
              doctest::Approx(base.normA2 / (lam * lam)).epsilon(1e-9));
        CHECK(ps.w == doctest::Approx(base.w).epsilon(1e-9));
    }

    GraphMap g1 = scale_graph(g, 1.0);
    PointGeometry p1 = build_point_geometry(g1, x, 2);
    CHECK(p1.normA2 == doctest::Approx(base.normA2).epsilon(1e-13));

    // the prescribed-mean-curvature quantities carry their own weights
    GraphMap r1 = builtin_graph("rank-one-flat");
    std::vector<double> y{0.45, 0.8};
    PointGeometry pr = build_point_geometry(r1, y, 4);
    REQUIRE(*pr.K1 > 0.01);
    REQUIRE(*pr.K2 > 0.01);
    for (double lam : {0.5, 2.0}) {
        GraphMap rs = scale_graph(r1, lam);
        std::vector<double> ys{lam * y[0], lam * y[1]};
        PointGeometry ps = build_point_geometry(rs, ys, 4);
        CHECK(*ps.K1 ==
              doctest::Approx(*pr.K1 / (lam * lam)).epsilon(1e-9));
        CHECK(*ps.K2 ==
              doctest::Approx(*pr.K2 / (lam * lam * lam)).epsilon(1e-9));
        CHECK(ps.norm_gradH2() ==
              doctest::Approx(pr.norm_gradH2() / std::pow(lam, 4))
                  .epsilon(1e-9));
    }
}

TEST_CASE("codimension one always has flat normal bundle") {
    GraphMap g = graph_of(2, 1, {"sin(x1)*exp(x2) + x1^3"});
    for (auto& x : grid_points({{{-1.0, 1.0}, {-1.0, 1.0}}}, 4)) {
        PointGeometry pg = build_point_geometry(g, x, 2);
        CHECK(pg.normRperp2 == doctest::Approx(0.0));
        CHECK(pg.commutator_norm2() == doctest::Approx(0.0));
    }
}

TEST_CASE("rank-one families commute") {
    GraphMap g = builtin_graph("rank-one-flat");
    for (auto& x : grid_points({{{-1.0, 1.0}, {-1.0, 1.0}}}, 4)) {
        PointGeometry pg = build_point_geometry(g, x, 2);
        CHECK(pg.commutator_norm2() <= 1e-20);
        CHECK(pg.normRperp2 <= 1e-20);
    }
}

TEST_CASE("w stays in (0,1] and matches the determinant formula") {
    std::mt19937 rng(4711);
    GraphMap g = graph_of(2, 2, {"sin(x1)*cos(x2)", "x1^2 - x2^3 + x1*x2"});
    std::uniform_real_distribution<double> dist(-0.9, 0.9);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x{dist(rng), dist(rng)};
        PointGeometry pg = build_point_geometry(g, x, 2);
        CHECK(pg.w > 0.0);
        CHECK(pg.w <= 1.0 + 1e-14);
        double det = pg.metric_at(0, 0) * pg.metric_at(1, 1) -
                     pg.metric_at(0, 1) * pg.metric_at(1, 0);
        CHECK(pg.w == doctest::Approx(1.0 / std::sqrt(det)).epsilon(1e-10));
    }
    GraphMap bowl = graph_of(2, 1, {"x1^2 + x2^2"});
    std::vector<double> crit{0.0, 0.0};
    PointGeometry pc = build_point_geometry(bowl, crit, 2);
    CHECK(pc.w == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> off{0.5, 0.0};
    CHECK(build_point_geometry(bowl, off, 2).w < 1.0);
}

TEST_CASE("scalar fields evaluate named quantities") {
    GraphMap g = builtin_graph("sphere-cap");
    std::vector<double> apex{0.0, 0.0};
    CHECK(scalar_field(g, "normA2")(apex) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(scalar_field(g, "w")(apex) == doctest::Approx(1.0));
    CHECK(std::abs(scalar_field(g, "H1")(apex)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(scalar_field(g, "nope"), std::invalid_argument);
}

TEST_CASE("laplace beltrami on flat charts") {
    GraphMap g = builtin_graph("plane");
    ScalarField quad = [](std::span<const double> x) { return x[0] * x[0]; };
    std::vector<double> x{0.2, -0.1};
    LaplaceEstimate est = laplace_beltrami(g, quad, x, 1e-3);
    CHECK(est.richardson == doctest::Approx(2.0).epsilon(1e-8));
    ScalarField lin = [](std::span<const double> x) {
        return 3.0 * x[0] - x[1];
    };
    CHECK(laplace_beltrami(g, lin, x, 1e-3).richardson ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("laplace beltrami of w on the sphere satisfies the weight equation") {
    GraphMap g = builtin_graph("sphere-cap");
    std::vector<double> x{0.1, 0.2};
    PointGeometry pg = build_point_geometry(g, x, 3);
    LaplaceEstimate est = laplace_beltrami(g, scalar_field(g, "w"), x, 1e-3);
    // H is parallel on the sphere, so Delta w = -|A|^2 w
    CHECK(est.richardson == doctest::Approx(-pg.normA2 * pg.w).epsilon(1e-6));
    CHECK(pg.jacobi_forcing() == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("domain handling") {
    GraphMap g = builtin_graph("sphere-cap");
    std::vector<double> outside{2.0, 0.0};
    CHECK_THROWS_AS(build_point_geometry(g, outside, 2), DomainError);
    std::vector<double> edge{1.39, 0.0};
    CHECK_THROWS_AS(laplace_beltrami(g, scalar_field(g, "w"), edge, 1e-2),
                    DomainError);
    GraphMap bad = graph_of(1, 1, {"sqrt(x1)"});
    std::vector<double> neg{-1.0};
    CHECK_THROWS_AS(build_point_geometry(bad, neg, 2), DomainError);
}

TEST_CASE("graph json round trip") {
    GraphMap g = graph_from_json(
        R"({"n":2,"k":1,"psi":["x1^2 + x2"],"domain":[[-1,1],[-2,2]]})");
    CHECK(g.n == 2);
    CHECK(g.k == 1);
    REQUIRE(g.domain.has_value());
    CHECK((*g.domain)[1][0] == -2.0);
    std::vector<double> in{0.5, 1.5}, out{0.5, 2.5};
    CHECK(g.contains(in));
    CHECK(!g.contains(out));
    CHECK_THROWS_AS(graph_from_json("{"), ConfigError);
    CHECK_THROWS_AS(graph_from_json(R"({"n":2,"k":2,"psi":["x1"]})"),
                    ConfigError);
    CHECK_THROWS_AS(graph_from_json(R"({"n":2,"k":1,"psi":["x9"]})"),
                    ParseError);
}

TEST_CASE("depth gating") {
    GraphMap g = builtin_graph("sphere-cap");
    std::vector<double> x{0.1, -0.2};
    PointGeometry d2 = build_point_geometry(g, x, 2);
    CHECK(!d2.gradA.has_value());
    CHECK(!d2.K1.has_value());
    CHECK(!d2.hessH.has_value());
    PointGeometry d3 = build_point_geometry(g, x, 3);
    CHECK(d3.gradA.has_value());
    CHECK(d3.K1.has_value());
    CHECK(!d3.hessH.has_value());
    PointGeometry d4 = build_point_geometry(g, x, 4);
    CHECK(d4.hessH.has_value());
    CHECK(d4.K2.has_value());
}
