#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphcurv/geometry.hpp"

namespace graphcurv {

/// Polynomial bump phi(x) = max(0, 1 - |x-center|^2/rho^2)^s, compactly
/// supported, C^{s-1}, with an analytic chart gradient.
struct TestFunction {
    std::vector<double> center;
    double rho = 1.0;
    int s = 3;

    double value(std::span<const double> x) const;
    std::vector<double> gradient(std::span<const double> x) const;
    std::vector<std::array<double, 2>> support_box() const;
};

/// Tensor-product Gauss-Legendre rule over an axis-aligned cell
/// decomposition of a box.
struct QuadratureGrid {
    std::vector<std::array<double, 2>> box;
    int cells_per_axis = 8;
    int gauss_order = 4;

    struct Node {
        std::vector<double> x;
        double weight = 0.0;
    };
    /// Materialized node list in a fixed deterministic order.
    std::vector<Node> nodes() const;
    QuadratureGrid refined() const;
};

/// Nodes (first) and weights (second) of the order-point rule on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

struct IntegralEstimate {
    double value = 0.0;
    double refined_value = 0.0;
    double drift = 0.0;  // relative change under uniform refinement
    bool converged = true;
};

/// Integral of `integrand` over the graph patch above grid.box with the
/// induced area element, with a refinement estimate attached.
IntegralEstimate integrate_sigma(const GraphMap& graph,
                                 const ScalarField& integrand,
                                 const QuadratureGrid& grid, int jobs = 1);

struct SweepRow {
    double radius = 0.0;
    double sup_normA2_R2 = 0.0;
    double area_ratio = 0.0;
    double r_sup_H = 0.0;
    double r2_sup_gradH_K1 = 0.0;
    double r3_sup_K2 = 0.0;
    double area_lower = 0.0, area_upper = 0.0;
    double sup_normA2_R2_polished = 0.0;
    bool hypothesis_ok = true;
};

/// Integral-level result: named terms, the two sides with their ratio,
/// refinement diagnostics, and per-radius rows for sweeps.
struct EstimateReport {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    double left = 0.0;
    double right = 0.0;
    double ratio = 0.0;
    bool has_pass = false;
    bool pass = true;
    double refinement_drift = 0.0;
    bool converged = true;
    std::vector<SweepRow> rows;
    std::string note;
};

/// Energy bound with constant exactly 1:
/// integral |A|^2 phi^2 <= integral (|grad phi|^2 + K1 phi^2).
EstimateReport check_stability(const GraphMap& graph, const TestFunction& phi,
                               const QuadratureGrid& grid, int jobs = 1,
                               double tol = 1e-6);

/// L^p curvature bound data for p in [4, 4+sqrt(8/n)): reports each term
/// and the measured ratio (the constant is existence-level, so there is
/// no pass/fail).
EstimateReport check_integral_estimate(const GraphMap& graph, double p,
                                       const TestFunction& phi,
                                       const QuadratureGrid& grid,
                                       int jobs = 1);

struct AreaRatio {
    double lower = 0.0;  // inner cells only
    double upper = 0.0;  // inner plus boundary cells
};

/// Area of the patch inside the ambient ball of radius R about the
/// surface point over `center`, divided by R^n, with cell bracketing.
AreaRatio area_ratio(const GraphMap& graph, std::span<const double> center,
                     double R, int cells_per_axis = 8, int gauss_order = 3,
                     int subdivision_depth = 6);

/// Per-radius curvature-estimate data: sup |A|^2 R^2 plus every scaled
/// constant input (area ratio, R sup|H|, R^2 sup(|grad H|+K1),
/// R^3 sup K2). Hypothesis failures flag the row.
EstimateReport sup_sweep(const GraphMap& graph, std::span<const double> center,
                         const std::vector<double>& radii,
                         int cells_per_axis = 8, int gauss_order = 4,
                         int jobs = 1);

/// Mean-value inequality data for u = |A|^2: sup over the inner ball,
/// the scaled L^2 norm over the double ball, the forcing norm k(R), and
/// the measured ratio the inequality bounds.
EstimateReport mean_value_data(const GraphMap& graph,
                               std::span<const double> center, double R,
                               double p_exp, int cells_per_axis = 8,
                               int gauss_order = 4, int jobs = 1);

}  // namespace graphcurv
