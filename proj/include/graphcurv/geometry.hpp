#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphcurv/expr.hpp"

namespace graphcurv {

/// Immersion data for the graph x |-> (x, psi(x)) over a chart domain.
struct GraphMap {
    int n = 0;                        // chart dimension
    int k = 0;                        // codimension
    std::vector<ExprPtr> components;  // psi^1 .. psi^k
    std::optional<std::vector<std::array<double, 2>>> domain;  // per-axis box

    int ambient_dim() const { return n + k; }

    /// Closed-box membership with a per-axis margin. An absent domain is
    /// all of R^n.
    bool contains(std::span<const double> x, double margin = 0.0) const;

    /// Intersects a chart box with the domain.
    std::vector<std::array<double, 2>> clip(
        const std::vector<std::array<double, 2>>& box) const;
};

/// Reads {"n": int, "k": int, "psi": [string...], "domain": [[lo,hi]...]}.
GraphMap graph_from_json(const std::string& text);

/// Graph of lambda * psi(x / lambda); its image is the lambda-dilated
/// surface. The domain box dilates along.
GraphMap scale_graph(const GraphMap& graph, double lambda);

/// Every pointwise tensor of the immersion at one chart point. Tensors
/// with tangential indices are stored in the coordinate frame; norms are
/// taken with inverse-metric contractions. The normal frame is
/// orthonormal. Fields beyond the requested derivative depth stay absent.
struct PointGeometry {
    int n = 0, k = 0, m = 0, depth = 0;

    std::vector<double> x;  // chart point
    std::vector<double> f;  // ambient point

    std::vector<double> tangent;     // [i][a], i<n, a<m: T_i = d f / d x^i
    std::vector<double> metric;      // [i][j]
    std::vector<double> metric_inv;  // [i][j]
    double sqrt_g = 0.0;
    std::vector<double> christoffel;  // [l][i][j]: Gamma^l_ij
    std::vector<double> normal;       // [alpha][a]: nu_alpha
    std::vector<double> omega;        // [i][alpha][beta]: <d_i nu_a, nu_b>
    std::vector<double> h;            // [alpha][i][j]
    std::vector<double> H;            // [alpha]
    double normA2 = 0.0;

    std::vector<double> riemann;  // [i][j][k][l], from the surface equations
    std::vector<double> rperp;    // [i][j][alpha][beta], shape-operator form
    double normRperp2 = 0.0;

    double w = 0.0;
    std::vector<double> frame_coeff;  // [i][j]: e_i = B_ij T_j (lower tri)
    std::vector<double> omega_n1;     // [alpha][i]: volume form, nu in slot i
    std::vector<double> omega_n2;     // [alpha][beta][i][j], two slots replaced

    // depth >= 3
    std::optional<std::vector<double>> gradA;          // [c][alpha][i][j]
    std::optional<std::vector<double>> gradH;          // [i][alpha]
    std::optional<std::vector<double>> grad_normA2;    // [i]: d_i |A|^2
    std::optional<std::vector<double>> riemann_chart;  // connection route
    std::optional<std::vector<double>> rperp_chart;    // connection route
    std::optional<double> K1;

    // depth == 4
    std::optional<std::vector<double>> hessH;        // [i][j][alpha]
    std::optional<std::vector<double>> hess_normA2;  // [i][j]: d_i d_j |A|^2
    std::optional<double> K2;

    double metric_at(int i, int j) const { return metric[i * n + j]; }
    double inv_at(int i, int j) const { return metric_inv[i * n + j]; }
    double h_at(int a, int i, int j) const { return h[(a * n + i) * n + j]; }
    double gamma_at(int l, int i, int j) const {
        return christoffel[(l * n + i) * n + j];
    }
    double riemann_at(int i, int j, int kk, int l) const {
        return riemann[((i * n + j) * n + kk) * n + l];
    }
    double rperp_at(int i, int j, int a, int b) const {
        return rperp[((i * n + j) * k + a) * k + b];
    }
    double omega_at(int i, int a, int b) const {
        return omega[(i * k + a) * k + b];
    }
    double gradA_at(int c, int a, int i, int j) const {
        return (*gradA)[((c * k + a) * n + i) * n + j];
    }
    double gradH_at(int i, int a) const { return (*gradH)[i * k + a]; }
    double hessH_at(int i, int j, int a) const {
        return (*hessH)[(i * n + j) * k + a];
    }

    double normH2() const;
    double norm_gradA2() const;
    double norm_gradH2() const;
    /// |grad |A||^2 = |grad |A|^2|^2 / (4 |A|^2); zero below the |A| cutoff.
    double norm_grad_absA2() const;
    /// g-contraction of h against the covariant Hessian of H.
    double h_dot_hessH() const;
    /// |grad grad H|^2 with inverse-metric contractions.
    double norm_hessH2() const;
    /// H_a tr(S_a S_b S_b) summed over normal indices.
    double cubic_contraction() const;
    /// sum over (a,b) of tr(S_a S_b)^2.
    double quartic_contraction() const;
    /// Total squared norm of the shape-operator commutators; equals
    /// |Rperp|^2 for the stored shape-operator form.
    double commutator_norm2() const;
    /// Volume-form pairing of grad H in the orthonormal frames.
    double jacobi_forcing() const;
    /// sum_{a<b, i<j} Omega_ab,ij Rperp_ij,ab in the orthonormal frames.
    double rperp_pairing() const;
    double sectional_curvature(int i, int j) const;
    /// Shape operator S_a = g^{-1} h_a as a row-major n x n matrix.
    std::vector<double> shape_operator(int a) const;
    /// |A|^2 cutoff below which quotient quantities are defined as zero.
    double normA2_cutoff() const;
};

struct BuildOptions {
    /// Reference directions seeding the normal-space Gram-Schmidt, k rows
    /// of m entries; defaults to the last k ambient axes.
    std::optional<std::vector<std::vector<double>>> normal_reference;
};

PointGeometry build_point_geometry(const GraphMap& graph,
                                   std::span<const double> x, int depth);
PointGeometry build_point_geometry(const GraphMap& graph,
                                   std::span<const double> x, int depth,
                                   const BuildOptions& options);

using ScalarField = std::function<double(std::span<const double>)>;

/// Frame-invariant pointwise scalars by name: normA2, w, normH2, K1, K2,
/// sqrtg, or H<alpha> for one mean-curvature component.
ScalarField scalar_field(const GraphMap& graph, const std::string& name);

struct LaplaceEstimate {
    double step_value = 0.0;       // divergence-form stencil at h
    double half_step_value = 0.0;  // same at h/2
    double richardson = 0.0;
};

/// Laplace-Beltrami of a chart scalar via the divergence form
/// (1/sqrt g) d_i (sqrt g g^ij d_j phi) with central differences.
LaplaceEstimate laplace_beltrami(const GraphMap& graph, const ScalarField& field,
                                 std::span<const double> x, double step);

struct MetricData {
    std::vector<double> metric, metric_inv;
    double sqrt_g = 0.0;
};
MetricData metric_at(const GraphMap& graph, std::span<const double> x);

/// Cell-center lattice of a box, per_axis points per axis.
std::vector<std::vector<double>> grid_points(
    const std::vector<std::array<double, 2>>& box, int per_axis);

}  // namespace graphcurv
