#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphcurv/geometry.hpp"

namespace graphcurv {

/// Outcome of one identity or pointwise inequality check. For identities
/// pass means rel_residual <= tolerance; for inequalities it means
/// margin >= -tolerance (tolerance already includes the local scale).
struct ResidualReport {
    std::string name;
    std::vector<double> x;
    double left = 0.0;
    double right = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::optional<double> margin;
    bool skipped = false;
    std::string note;
};

/// Surface equations: curvature tensor of the induced metric vs. the
/// quadratic expression in the second fundamental form. Needs depth >= 3
/// for the independent connection-curvature route.
ResidualReport check_gauss(const PointGeometry& pg, double tol = 1e-6);

/// Symmetry of the covariant derivative of the second fundamental form
/// in its derivative slot.
ResidualReport check_codazzi(const PointGeometry& pg, double tol = 1e-6);

/// Normal curvature from the connection coefficients vs. the
/// shape-operator commutators.
ResidualReport check_ricci(const PointGeometry& pg, double tol = 1e-6);

/// Sup over the sample points of the connection-route |Rperp| and of the
/// shape-operator commutator norm; passes iff both vanish to tolerance.
ResidualReport check_flatness(const GraphMap& graph,
                              const std::vector<std::vector<double>>& points,
                              double tol = 1e-10);

/// Two-path check of the elliptic identity for |A|^2: finite-difference
/// Laplace-Beltrami on one side, pointwise tensors on the other.
ResidualReport check_simons_identity(const GraphMap& graph,
                                     std::span<const double> x,
                                     double step = 1e-3, double tol = 1e-4);

/// Two-path check of the elliptic equation for the volume-form weight w.
ResidualReport check_jacobi(const GraphMap& graph, std::span<const double> x,
                            double step = 1e-3, double tol = 1e-4);

/// Refined lower bound for (1/2) Laplacian of |A|^2 on flat-normal-bundle
/// immersions, with the sharpened gradient coefficient 1 + 2/(n+eps).
ResidualReport check_simons_inequality(const PointGeometry& pg, double eps,
                                       double tol = 1e-8);

/// Pointwise subsolution bound Delta|A|^2 + C(n)|A|^4 >= -2 K2 |A|.
ResidualReport check_subsolution(const PointGeometry& pg, double tol = 1e-12);

/// Coefficient of |grad H|^2 in the refined bound: (2/(n+eps))(1+(n-1)/eps).
double simons_inequality_constant(int n, double eps);
/// Coefficient of |A|^4 in the subsolution bound: 2(1+sqrt(n)).
double subsolution_constant(int n);

/// Throws HypothesisError unless the shape-operator commutators vanish at
/// the point (flat normal bundle).
void require_flat(const PointGeometry& pg);
/// Squared-commutator threshold below which a point counts as flat.
double flatness_threshold(const PointGeometry& pg);

}  // namespace graphcurv
