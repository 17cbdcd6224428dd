#include "graphcurv/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "graphcurv/errors.hpp"
#include "graphcurv/identities.hpp"
#include "graphcurv/parallel.hpp"

namespace graphcurv {

// ---------------------------------------------------------------------
// Test functions
// ---------------------------------------------------------------------

double TestFunction::value(std::span<const double> x) const {
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - center[i];
        r2 += d * d;
    }
    const double u = 1.0 - r2 / (rho * rho);
    if (u <= 0.0) return 0.0;
    return std::pow(u, s);
}

std::vector<double> TestFunction::gradient(std::span<const double> x) const {
    std::vector<double> g(x.size(), 0.0);
    double r2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - center[i];
        r2 += d * d;
    }
    const double u = 1.0 - r2 / (rho * rho);
    if (u <= 0.0) return g;
    const double f = -2.0 * s * std::pow(u, s - 1) / (rho * rho);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = f * (x[i] - center[i]);
    return g;
}

std::vector<std::array<double, 2>> TestFunction::support_box() const {
    std::vector<std::array<double, 2>> box;
    for (double c : center) box.push_back({c - rho, c + rho});
    return box;
}

// ---------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
    if (order < 1 || order > 32)
        throw std::invalid_argument("Gauss order out of range");
    std::vector<double> x(order), w(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= order; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[order - 1 - i] = w[i];
    }
    return {x, w};
}

std::vector<QuadratureGrid::Node> QuadratureGrid::nodes() const {
    const int n = static_cast<int>(box.size());
    if (cells_per_axis < 1) throw std::invalid_argument("need >= 1 cell per axis");
    auto [gx, gw] = gauss_legendre(gauss_order);
    const long per_axis = static_cast<long>(cells_per_axis) * gauss_order;
    double count = 1.0;
    for (int i = 0; i < n; ++i) count *= static_cast<double>(per_axis);
    if (count > 5e7) throw ConfigError("quadrature grid too large");

    std::vector<Node> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<long> idx(n, 0);
    const long total = static_cast<long>(count);
    for (long c = 0; c < total; ++c) {
        long rem = c;
        for (int i = n - 1; i >= 0; --i) {
            idx[i] = rem % per_axis;
            rem /= per_axis;
        }
        Node node;
        node.x.resize(n);
        node.weight = 1.0;
        for (int i = 0; i < n; ++i) {
            const long cell = idx[i] / gauss_order;
            const int g = static_cast<int>(idx[i] % gauss_order);
            const double width = (box[i][1] - box[i][0]) / cells_per_axis;
            const double mid = box[i][0] + (cell + 0.5) * width;
            node.x[i] = mid + 0.5 * width * gx[g];
            node.weight *= 0.5 * width * gw[g];
        }
        out.push_back(std::move(node));
    }
    return out;
}

QuadratureGrid QuadratureGrid::refined() const {
    QuadratureGrid g = *this;
    g.cells_per_axis *= 2;
    return g;
}

// ---------------------------------------------------------------------
// Node tables
// ---------------------------------------------------------------------

namespace {

struct NodeTable {
    std::vector<QuadratureGrid::Node> nodes;
    int ncols = 0;
    std::vector<double> data;

    double at(std::size_t i, int c) const { return data[i * ncols + c]; }
};

// Column 0 is always sqrt(det g) at the node.
NodeTable evaluate_nodes(
    const GraphMap& graph, const QuadratureGrid& grid, int depth, int jobs,
    int extra_cols,
    const std::function<void(const PointGeometry&,
                             const QuadratureGrid::Node&, double*)>& fill) {
    NodeTable t;
    t.nodes = grid.nodes();
    t.ncols = extra_cols + 1;
    t.data.assign(t.nodes.size() * t.ncols, 0.0);
    parallel_for(t.nodes.size(), jobs, [&](std::size_t i) {
        PointGeometry pg = build_point_geometry(graph, t.nodes[i].x, depth);
        double* row = t.data.data() + i * t.ncols;
        row[0] = pg.sqrt_g;
        fill(pg, t.nodes[i], row + 1);
    });
    return t;
}

// Integral of one column against the area element; dist_col/bound mask
// the node set to an ambient ball when bound >= 0.
double integrate_column(const NodeTable& t, int col, int dist_col = -1,
                        double bound = -1.0) {
    std::vector<double> v(t.nodes.size());
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        double mask = 1.0;
        if (dist_col >= 0 && t.at(i, dist_col) > bound) mask = 0.0;
        v[i] = mask * t.nodes[i].weight * t.at(i, 0) * t.at(i, col);
    }
    return pairwise_sum(v);
}

double max_column(const NodeTable& t, int col, int dist_col = -1,
                  double bound = -1.0, std::size_t* argmax = nullptr) {
    double best = 0.0;
    bool seen = false;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        if (dist_col >= 0 && t.at(i, dist_col) > bound) continue;
        const double v = t.at(i, col);
        if (!seen || v > best) {
            best = v;
            seen = true;
            if (argmax) *argmax = i;
        }
    }
    return seen ? best : 0.0;
}

// Drift of one integral relative to the size of the largest integral in
// the same report, so identically-zero terms do not divide their own
// roundoff noise.
double drift_against(double coarse, double fine, double scale) {
    if (scale <= 1e-14) return 0.0;
    return std::abs(coarse - fine) / scale;
}

std::vector<double> ambient_point(const GraphMap& graph,
                                  std::span<const double> x) {
    if (!graph.contains(x))
        throw DomainError("center outside the chart domain");
    std::vector<double> p(x.begin(), x.end());
    for (const auto& comp : graph.components)
        p.push_back(eval_value(*comp, x));
    return p;
}

double ball_distance(const GraphMap& graph, std::span<const double> x,
                     std::span<const double> p_amb) {
    double d2 = 0.0;
    std::size_t i = 0;
    for (; i < x.size(); ++i) {
        const double d = x[i] - p_amb[i];
        d2 += d * d;
    }
    std::vector<double> xv(x.begin(), x.end());
    for (const auto& comp : graph.components) {
        const double d = eval_value(*comp, xv) - p_amb[i++];
        d2 += d * d;
    }
    return std::sqrt(d2);
}

std::vector<std::array<double, 2>> centered_box(std::span<const double> c,
                                                double r) {
    std::vector<std::array<double, 2>> box;
    for (double v : c) box.push_back({v - r, v + r});
    return box;
}

// The chart box c +- R always covers the ball trace (ambient distance
// dominates chart distance for a graph). When the domain clips that box,
// the ball must stay clear of the clipped faces.
bool ball_contained(const GraphMap& graph, std::span<const double> center,
                    std::span<const double> p_amb, double radius) {
    const auto box0 = centered_box(center, radius);
    const auto box = graph.clip(box0);
    const int n = graph.n;
    const int face_samples = 9;
    std::vector<double> x(n);
    for (int axis = 0; axis < n; ++axis) {
        for (int side = 0; side < 2; ++side) {
            if (box[axis][side] == box0[axis][side]) continue;
            // lattice over the clipped face
            long total = 1;
            for (int i = 0; i < n - 1; ++i) total *= face_samples;
            for (long s = 0; s < total; ++s) {
                long rem = s;
                for (int i = 0; i < n; ++i) {
                    if (i == axis) {
                        x[i] = box[axis][side];
                        continue;
                    }
                    const int t = static_cast<int>(rem % face_samples);
                    rem /= face_samples;
                    x[i] = box[i][0] +
                           (box[i][1] - box[i][0]) * t / (face_samples - 1.0);
                }
                if (ball_distance(graph, x, p_amb) <= radius) return false;
            }
        }
    }
    return true;
}

struct CellArea {
    double inner = 0.0;
    double boundary = 0.0;
};

class BallAreaAccumulator {
public:
    BallAreaAccumulator(const GraphMap& graph, std::span<const double> p_amb,
                        double radius, int gauss_order, int max_depth)
        : graph_(graph),
          p_(p_amb.begin(), p_amb.end()),
          radius_(radius),
          max_depth_(max_depth) {
        std::tie(gx_, gw_) = gauss_legendre(gauss_order);
    }

    CellArea result() const { return {pairwise_sum(inner_), pairwise_sum(boundary_)}; }

    void process(const std::vector<double>& lo, const std::vector<double>& hi,
                 int level) {
        const int cls = classify(lo, hi);
        if (cls < 0) return;
        if (cls > 0) {
            inner_.push_back(cell_area(lo, hi));
            return;
        }
        if (level >= max_depth_) {
            boundary_.push_back(cell_area(lo, hi));
            return;
        }
        const int n = static_cast<int>(lo.size());
        std::vector<double> clo(n), chi(n);
        for (long m = 0; m < (1L << n); ++m) {
            for (int i = 0; i < n; ++i) {
                const double mid = 0.5 * (lo[i] + hi[i]);
                if (m & (1L << i)) {
                    clo[i] = mid;
                    chi[i] = hi[i];
                } else {
                    clo[i] = lo[i];
                    chi[i] = mid;
                }
            }
            process(clo, chi, level + 1);
        }
    }

private:
    int classify(const std::vector<double>& lo,
                 const std::vector<double>& hi) const {
        const int n = static_cast<int>(lo.size());
        bool any_in = false, any_out = false;
        std::vector<double> x(n);
        for (long m = 0; m < (1L << n) + 1; ++m) {
            for (int i = 0; i < n; ++i) {
                if (m == (1L << n))
                    x[i] = 0.5 * (lo[i] + hi[i]);
                else
                    x[i] = (m & (1L << i)) ? hi[i] : lo[i];
            }
            if (ball_distance(graph_, x, p_) <= radius_)
                any_in = true;
            else
                any_out = true;
            if (any_in && any_out) return 0;
        }
        return any_in ? 1 : -1;
    }

    double cell_area(const std::vector<double>& lo,
                     const std::vector<double>& hi) const {
        const int n = static_cast<int>(lo.size());
        const int g = static_cast<int>(gx_.size());
        long total = 1;
        for (int i = 0; i < n; ++i) total *= g;
        std::vector<double> x(n);
        double area = 0.0;
        for (long s = 0; s < total; ++s) {
            long rem = s;
            double wgt = 1.0;
            for (int i = 0; i < n; ++i) {
                const int t = static_cast<int>(rem % g);
                rem /= g;
                x[i] = 0.5 * (lo[i] + hi[i]) + 0.5 * (hi[i] - lo[i]) * gx_[t];
                wgt *= 0.5 * (hi[i] - lo[i]) * gw_[t];
            }
            area += wgt * metric_at(graph_, x).sqrt_g;
        }
        return area;
    }

    const GraphMap& graph_;
    std::vector<double> p_;
    double radius_;
    int max_depth_;
    std::vector<double> gx_, gw_;
    std::vector<double> inner_, boundary_;
};

AreaRatio area_ratio_impl(const GraphMap& graph, std::span<const double> p_amb,
                          std::span<const double> center, double R,
                          int cells_per_axis, int gauss_order, int depth) {
    const auto box = graph.clip(centered_box(center, R));
    const int n = graph.n;
    BallAreaAccumulator acc(graph, p_amb, R, gauss_order, depth);
    std::vector<long> idx(n, 0);
    long total = 1;
    for (int i = 0; i < n; ++i) total *= cells_per_axis;
    std::vector<double> lo(n), hi(n);
    for (long c = 0; c < total; ++c) {
        long rem = c;
        for (int i = n - 1; i >= 0; --i) {
            idx[i] = rem % cells_per_axis;
            rem /= cells_per_axis;
        }
        for (int i = 0; i < n; ++i) {
            const double width = (box[i][1] - box[i][0]) / cells_per_axis;
            lo[i] = box[i][0] + idx[i] * width;
            hi[i] = lo[i] + width;
        }
        acc.process(lo, hi, 0);
    }
    const CellArea area = acc.result();
    const double rn = std::pow(R, n);
    return {area.inner / rn, (area.inner + area.boundary) / rn};
}

void require_support_inside(const GraphMap& graph, const TestFunction& phi) {
    if (!graph.domain) return;
    const auto box = phi.support_box();
    for (int i = 0; i < graph.n; ++i) {
        if (box[i][0] < (*graph.domain)[i][0] ||
            box[i][1] > (*graph.domain)[i][1])
            throw HypothesisError(
                "test function support escapes the chart domain");
    }
}

void require_flat_table(const NodeTable& t, int comm2_col, int a2_col) {
    double sup_comm2 = 0.0, sup_a2 = 0.0;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        sup_comm2 = std::max(sup_comm2, t.at(i, comm2_col));
        sup_a2 = std::max(sup_a2, t.at(i, a2_col));
    }
    if (sup_comm2 > 1e-12 * (1.0 + sup_a2 * sup_a2))
        throw HypothesisError(
            "flat normal bundle required: shape operators do not commute on "
            "the integration region");
}

}  // namespace

// ---------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------

IntegralEstimate integrate_sigma(const GraphMap& graph,
                                 const ScalarField& integrand,
                                 const QuadratureGrid& grid, int jobs) {
    if (graph.clip(grid.box) != grid.box)
        throw DomainError("integration box outside the chart domain");
    auto run = [&](const QuadratureGrid& g) {
        auto nodes = g.nodes();
        std::vector<double> vals(nodes.size());
        parallel_for(nodes.size(), jobs, [&](std::size_t i) {
            vals[i] = nodes[i].weight * metric_at(graph, nodes[i].x).sqrt_g *
                      integrand(nodes[i].x);
        });
        return pairwise_sum(vals);
    };
    IntegralEstimate est;
    est.value = run(grid);
    est.refined_value = run(grid.refined());
    est.drift = drift_against(est.value, est.refined_value,
                              std::max(std::abs(est.value),
                                       std::abs(est.refined_value)));
    est.converged = est.drift <= 1e-4;
    return est;
}

EstimateReport check_stability(const GraphMap& graph, const TestFunction& phi,
                               const QuadratureGrid& grid, int jobs,
                               double tol) {
    require_support_inside(graph, phi);
    auto fill = [&phi](const PointGeometry& pg, const QuadratureGrid::Node& nd,
                       double* row) {
        const double p = phi.value(nd.x);
        const auto dphi = phi.gradient(nd.x);
        double grad2 = 0.0;
        for (int i = 0; i < pg.n; ++i)
            for (int j = 0; j < pg.n; ++j)
                grad2 += pg.inv_at(i, j) * dphi[i] * dphi[j];
        row[0] = pg.normA2 * p * p;
        row[1] = grad2;
        row[2] = *pg.K1 * p * p;
        row[3] = pg.commutator_norm2();
        row[4] = pg.normA2;
    };
    NodeTable t = evaluate_nodes(graph, grid, 3, jobs, 5, fill);
    require_flat_table(t, 4, 5);
    const double left = integrate_column(t, 1);
    const double grad_term = integrate_column(t, 2);
    const double k1_term = integrate_column(t, 3);

    NodeTable tr = evaluate_nodes(graph, grid.refined(), 3, jobs, 5, fill);
    const double left_r = integrate_column(tr, 1);
    const double grad_r = integrate_column(tr, 2);
    const double k1_r = integrate_column(tr, 3);
    const double scale = std::max({std::abs(left), std::abs(left_r),
                                   std::abs(grad_term), std::abs(grad_r),
                                   std::abs(k1_term), std::abs(k1_r)});
    const double drift = std::max({drift_against(left, left_r, scale),
                                   drift_against(grad_term, grad_r, scale),
                                   drift_against(k1_term, k1_r, scale)});

    EstimateReport rep;
    rep.name = "stability";
    rep.terms = {{"lhs_A2phi2", left},
                 {"grad_phi_term", grad_term},
                 {"K1_term", k1_term}};
    rep.left = left;
    rep.right = grad_term + k1_term;
    rep.ratio = rep.right > 0.0 ? left / rep.right : 0.0;
    rep.has_pass = true;
    rep.pass = left <= rep.right * (1.0 + tol);
    rep.refinement_drift = drift;
    rep.converged = drift <= 1e-4;
    return rep;
}

EstimateReport check_integral_estimate(const GraphMap& graph, double p,
                                       const TestFunction& phi,
                                       const QuadratureGrid& grid, int jobs) {
    const double window_hi = 4.0 + std::sqrt(8.0 / graph.n);
    if (!(p >= 4.0 && p < window_hi))
        throw HypothesisError(
            "exponent p = " + std::to_string(p) +
            " outside the admissible window [4, 4+sqrt(8/n)) = [4, " +
            std::to_string(window_hi) + ") for n = " + std::to_string(graph.n));
    require_support_inside(graph, phi);
    auto fill = [&phi, p](const PointGeometry& pg,
                          const QuadratureGrid::Node& nd, double* row) {
        const double pv = phi.value(nd.x);
        const auto dphi = phi.gradient(nd.x);
        double grad2 = 0.0;
        for (int i = 0; i < pg.n; ++i)
            for (int j = 0; j < pg.n; ++j)
                grad2 += pg.inv_at(i, j) * dphi[i] * dphi[j];
        const double absA = std::sqrt(std::max(pg.normA2, 0.0));
        const double absH = std::sqrt(std::max(pg.normH2(), 0.0));
        const double gradH = std::sqrt(std::max(pg.norm_gradH2(), 0.0));
        const double phi_p = std::pow(pv, p);
        row[0] = std::pow(absA, p) * phi_p;
        row[1] = std::pow(grad2, p / 2.0);
        row[2] = (std::pow(absH, p) + std::pow(gradH, p / 2.0) +
                  std::pow(*pg.K1, p / 2.0) + std::pow(*pg.K2, p / 3.0)) *
                 phi_p;
        row[3] = pg.commutator_norm2();
        row[4] = pg.normA2;
    };
    NodeTable t = evaluate_nodes(graph, grid, 4, jobs, 5, fill);
    require_flat_table(t, 4, 5);
    const double left = integrate_column(t, 1);
    const double grad_term = integrate_column(t, 2);
    const double curv_term = integrate_column(t, 3);

    NodeTable tr = evaluate_nodes(graph, grid.refined(), 4, jobs, 5, fill);
    const double left_r = integrate_column(tr, 1);
    const double grad_r = integrate_column(tr, 2);
    const double curv_r = integrate_column(tr, 3);
    const double scale = std::max({std::abs(left), std::abs(left_r),
                                   std::abs(grad_term), std::abs(grad_r),
                                   std::abs(curv_term), std::abs(curv_r)});
    const double drift = std::max({drift_against(left, left_r, scale),
                                   drift_against(grad_term, grad_r, scale),
                                   drift_against(curv_term, curv_r, scale)});

    EstimateReport rep;
    rep.name = "integral_estimate";
    rep.terms = {{"lhs_Ap_phip", left},
                 {"grad_phi_term", grad_term},
                 {"curvature_term", curv_term},
                 {"p", p}};
    rep.left = left;
    rep.right = grad_term + curv_term;
    rep.ratio = rep.right > 0.0 ? left / rep.right : 0.0;
    rep.refinement_drift = drift;
    rep.converged = drift <= 1e-4;
    return rep;
}

AreaRatio area_ratio(const GraphMap& graph, std::span<const double> center,
                     double R, int cells_per_axis, int gauss_order,
                     int subdivision_depth) {
    if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");
    const auto p_amb = ambient_point(graph, center);
    if (!ball_contained(graph, center, p_amb, R))
        throw HypothesisError(
            "ball of radius R not compactly contained in the chart");
    return area_ratio_impl(graph, p_amb, center, R, cells_per_axis, gauss_order,
                           subdivision_depth);
}

EstimateReport sup_sweep(const GraphMap& graph, std::span<const double> center,
                         const std::vector<double>& radii, int cells_per_axis,
                         int gauss_order, int jobs) {
    if (graph.n < 2 || graph.n > 5)
        throw HypothesisError("sweep requires dimension 2 <= n <= 5");
    const auto p_amb = ambient_point(graph, center);
    EstimateReport rep;
    rep.name = "sup_sweep";
    for (double R : radii) {
        SweepRow row;
        row.radius = R;
        row.hypothesis_ok = ball_contained(graph, center, p_amb, 4.0 * R);

        QuadratureGrid grid{graph.clip(centered_box(center, R)), cells_per_axis,
                            gauss_order};
        auto fill = [&p_amb, &graph](const PointGeometry& pg,
                                     const QuadratureGrid::Node& nd,
                                     double* row_out) {
            row_out[0] = ball_distance(graph, nd.x, p_amb);
            row_out[1] = pg.normA2;
            row_out[2] = std::sqrt(std::max(pg.normH2(), 0.0));
            row_out[3] = std::sqrt(std::max(pg.norm_gradH2(), 0.0)) + *pg.K1;
            row_out[4] = *pg.K2;
        };
        NodeTable t = evaluate_nodes(graph, grid, 4, jobs, 5, fill);
        std::size_t best = 0;
        const double sup_a2 = max_column(t, 2, 1, R, &best);
        row.sup_normA2_R2 = sup_a2 * R * R;
        row.r_sup_H = R * max_column(t, 3, 1, R);
        row.r2_sup_gradH_K1 = R * R * max_column(t, 4, 1, R);
        row.r3_sup_K2 = R * R * R * max_column(t, 5, 1, R);

        const AreaRatio area = area_ratio_impl(graph, p_amb, center, R,
                                               cells_per_axis, gauss_order, 6);
        row.area_lower = area.lower;
        row.area_upper = area.upper;
        row.area_ratio = 0.5 * (area.lower + area.upper);

        // One Newton polish step on |A|^2 from the best grid point.
        double polished = sup_a2;
        if (!t.nodes.empty() && sup_a2 > 0.0) {
            const auto& x0 = t.nodes[best].x;
            PointGeometry pg = build_point_geometry(graph, x0, 4);
            const int n = graph.n;
            // solve hess * step = -grad
            std::vector<double> a(*pg.hess_normA2);
            std::vector<double> b(*pg.grad_normA2);
            for (double& v : b) v = -v;
            bool ok = true;
            for (int c = 0; c < n && ok; ++c) {
                int piv = c;
                for (int r = c + 1; r < n; ++r)
                    if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c]))
                        piv = r;
                if (std::abs(a[piv * n + c]) < 1e-14) {
                    ok = false;
                    break;
                }
                if (piv != c) {
                    for (int j = 0; j < n; ++j)
                        std::swap(a[piv * n + j], a[c * n + j]);
                    std::swap(b[piv], b[c]);
                }
                for (int r = c + 1; r < n; ++r) {
                    const double f = a[r * n + c] / a[c * n + c];
                    for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
                    b[r] -= f * b[c];
                }
            }
            if (ok) {
                std::vector<double> step(n, 0.0);
                for (int r = n - 1; r >= 0; --r) {
                    double s = b[r];
                    for (int j = r + 1; j < n; ++j) s -= a[r * n + j] * step[j];
                    step[r] = s / a[r * n + r];
                }
                std::vector<double> cand(x0);
                for (int i = 0; i < n; ++i) {
                    const double width =
                        (grid.box[i][1] - grid.box[i][0]) / cells_per_axis;
                    step[i] = std::clamp(step[i], -width, width);
                    cand[i] += step[i];
                    cand[i] = std::clamp(cand[i], grid.box[i][0], grid.box[i][1]);
                }
                if (graph.contains(cand) &&
                    ball_distance(graph, cand, p_amb) <= R) {
                    PointGeometry pc = build_point_geometry(graph, cand, 2);
                    polished = std::max(polished, pc.normA2);
                }
            }
        }
        row.sup_normA2_R2_polished = polished * R * R;
        rep.rows.push_back(row);
    }
    return rep;
}

EstimateReport mean_value_data(const GraphMap& graph,
                               std::span<const double> center, double R,
                               double p_exp, int cells_per_axis,
                               int gauss_order, int jobs) {
    if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");
    if (!(p_exp > graph.n))
        throw HypothesisError(
            "forcing exponent p must exceed the dimension n");
    const auto p_amb = ambient_point(graph, center);
    if (!ball_contained(graph, center, p_amb, 2.0 * R))
        throw HypothesisError(
            "ball of radius 2R not compactly contained in the chart");

    QuadratureGrid grid{graph.clip(centered_box(center, 2.0 * R)),
                        cells_per_axis, gauss_order};
    auto fill = [&p_amb, &graph, p_exp](const PointGeometry& pg,
                                        const QuadratureGrid::Node& nd,
                                        double* row) {
        row[0] = ball_distance(graph, nd.x, p_amb);
        const double u = pg.normA2;
        row[1] = u;
        row[2] = u * u;
        const double absA = std::sqrt(std::max(u, 0.0));
        row[3] = std::pow(2.0 * *pg.K2 * absA, p_exp / 2.0);
        ResidualReport sub = check_subsolution(pg);
        row[4] = *sub.margin;
        row[5] = pg.commutator_norm2();
        row[6] = pg.normA2;
    };
    NodeTable t = evaluate_nodes(graph, grid, 4, jobs, 7, fill);
    require_flat_table(t, 6, 7);

    const int n = graph.n;
    const double l2u = std::sqrt(
        std::max(integrate_column(t, 3, 1, 2.0 * R), 0.0));
    const double g_int = integrate_column(t, 4, 1, 2.0 * R);
    const double g_norm = g_int > 0.0 ? std::pow(g_int, 2.0 / p_exp) : 0.0;
    const double kR = std::pow(R, 2.0 * (1.0 - n / p_exp)) * g_norm;
    const double sup_u = max_column(t, 2, 1, R);
    const double scaled_l2 = std::pow(R, -0.5 * n) * l2u;
    const double denom = scaled_l2 + kR;

    double min_margin = 0.0;
    bool seen = false;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        if (t.at(i, 1) > 2.0 * R) continue;
        const double m = t.at(i, 5);
        if (!seen || m < min_margin) {
            min_margin = m;
            seen = true;
        }
    }

    NodeTable tr = evaluate_nodes(graph, grid.refined(), 4, jobs, 7, fill);
    const double l2u_r = std::sqrt(
        std::max(integrate_column(tr, 3, 1, 2.0 * R), 0.0));
    const double g_int_r = integrate_column(tr, 4, 1, 2.0 * R);
    const double dscale = std::max({l2u, l2u_r, std::abs(g_int),
                                    std::abs(g_int_r)});
    const double drift = std::max(drift_against(l2u, l2u_r, dscale),
                                  drift_against(g_int, g_int_r, dscale));

    EstimateReport rep;
    rep.name = "mean_value";
    rep.terms = {{"sup_u", sup_u},
                 {"scaled_L2_u", scaled_l2},
                 {"k_R", kR},
                 {"min_subsolution_margin", min_margin},
                 {"p", p_exp}};
    rep.left = sup_u;
    rep.right = denom;
    rep.ratio = denom > 0.0 ? sup_u / denom : 0.0;
    rep.refinement_drift = drift;
    // sharp ball cutoffs keep the indicator integrals first-order accurate
    rep.converged = drift <= 1e-2;
    return rep;
}

}  // namespace graphcurv
