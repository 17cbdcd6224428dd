#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphcurv/builtins.hpp"
#include "graphcurv/errors.hpp"
#include "graphcurv/identities.hpp"
#include "graphcurv/integrals.hpp"
#include "graphcurv/parallel.hpp"
#include "graphcurv/report.hpp"

using namespace graphcurv;

namespace {

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        try {
            out.push_back(std::stod(text.substr(pos, comma - pos)));
        } catch (const std::exception&) {
            throw ConfigError("malformed coordinate list '" + text + "'");
        }
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    return out;
}

struct RunConfig {
    std::string graph_spec;
    std::string at, center;
    std::vector<double> radii;
    double rho = 0.5, p = 4.0, radius = 1.0, tol = -1.0, step = 1e-3,
           eps = 1.0;
    int s = 3, grid = 8, gauss = 4, jobs = 1, depth = 4, subdiv = 6;
    std::string format = "json";
    bool require_flat = false;
};

void require_dim(const GraphMap& g, const std::vector<double>& x,
                 const char* what) {
    if (static_cast<int>(x.size()) != g.n)
        throw ConfigError(std::string(what) + " must list exactly " +
                          std::to_string(g.n) + " coordinates");
}

std::vector<std::array<double, 2>> default_box(const GraphMap& g) {
    if (g.domain) return *g.domain;
    std::vector<std::array<double, 2>> box;
    for (int i = 0; i < g.n; ++i) box.push_back({-1.0, 1.0});
    return box;
}

int cmd_point(const RunConfig& cfg) {
    GraphMap g = resolve_graph(cfg.graph_spec);
    auto x = parse_point(cfg.at);
    require_dim(g, x, "--at");
    PointGeometry pg = build_point_geometry(g, x, cfg.depth);
    std::cout << to_json(pg) << "\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    GraphMap g = resolve_graph(cfg.graph_spec);
    const double tol_identity = cfg.tol > 0 ? cfg.tol : 1e-6;
    const double tol_fd = cfg.tol > 0 ? cfg.tol : 1e-4;

    auto box = default_box(g);
    for (auto& iv : box) {  // keep the finite-difference stencils interior
        iv[0] += 3.0 * cfg.step;
        iv[1] -= 3.0 * cfg.step;
    }
    auto points = grid_points(box, cfg.grid);

    ResidualReport flat = check_flatness(g, points);
    const bool is_flat = flat.pass;

    const std::size_t count = points.size();
    std::vector<ResidualReport> gauss(count), codazzi(count), ricci(count),
        simons(count), jacobi(count), inequality, subsolution;
    if (is_flat) {
        inequality.resize(count);
        subsolution.resize(count);
    }
    parallel_for(count, cfg.jobs, [&](std::size_t i) {
        PointGeometry pg = build_point_geometry(g, points[i], 4);
        gauss[i] = check_gauss(pg, tol_identity);
        codazzi[i] = check_codazzi(pg, tol_identity);
        ricci[i] = check_ricci(pg, tol_identity);
        simons[i] = check_simons_identity(g, points[i], cfg.step, tol_fd);
        jacobi[i] = check_jacobi(g, points[i], cfg.step, tol_fd);
        if (is_flat) {
            inequality[i] = check_simons_inequality(pg, cfg.eps);
            subsolution[i] = check_subsolution(pg);
        }
    });

    bool all_pass = true;
    std::string worst_name = "none";
    double worst_rel = 0.0;
    auto fold = [&](const std::vector<ResidualReport>& reps) {
        for (const auto& r : reps) {
            if (!r.pass) all_pass = false;
            if (r.rel_residual > worst_rel) {
                worst_rel = r.rel_residual;
                worst_name = r.name;
            }
        }
    };
    fold(gauss);
    fold(codazzi);
    fold(ricci);
    fold(simons);
    fold(jacobi);
    fold(inequality);
    fold(subsolution);
    if (cfg.require_flat && !flat.pass) {
        all_pass = false;
        worst_name = "flatness";
    }

    std::string out = "{";
    out += "\"flatness\":" + to_json(flat);
    auto append = [&out](const char* key, const std::vector<ResidualReport>& v) {
        out += std::string(",\"") + key + "\":" +
               to_json(std::span<const ResidualReport>(v));
    };
    append("gauss", gauss);
    append("codazzi", codazzi);
    append("ricci", ricci);
    append("simons_identity", simons);
    append("jacobi", jacobi);
    if (is_flat) {
        append("simons_inequality", inequality);
        append("subsolution", subsolution);
    }
    out += ",\"summary\":{\"pass\":" + std::string(all_pass ? "true" : "false") +
           ",\"worst_check\":\"" + worst_name +
           "\",\"worst_rel_residual\":" + format_double(worst_rel) + "}}";
    std::cout << out << "\n";
    std::cerr << (all_pass ? "PASS" : "FAIL") << " worst check: " << worst_name
              << " rel residual " << format_double(worst_rel) << "\n";
    return all_pass ? 0 : 1;
}

int emit_estimate(const EstimateReport& rep, const RunConfig& cfg) {
    if (cfg.format == "csv")
        std::cout << (rep.rows.empty() ? to_csv(rep) : sweep_to_csv(rep));
    else
        std::cout << to_json(rep) << "\n";
    return rep.has_pass && !rep.pass ? 1 : 0;
}

int cmd_stability(const RunConfig& cfg) {
    GraphMap g = resolve_graph(cfg.graph_spec);
    auto center = parse_point(cfg.center);
    require_dim(g, center, "--center");
    TestFunction phi{center, cfg.rho, cfg.s};
    QuadratureGrid grid{phi.support_box(), cfg.grid, cfg.gauss};
    EstimateReport rep = check_stability(g, phi, grid, cfg.jobs,
                                         cfg.tol > 0 ? cfg.tol : 1e-6);
    return emit_estimate(rep, cfg);
}

int cmd_integral_estimate(const RunConfig& cfg) {
    GraphMap g = resolve_graph(cfg.graph_spec);
    auto center = parse_point(cfg.center);
    require_dim(g, center, "--center");
    TestFunction phi{center, cfg.rho, cfg.s};
    QuadratureGrid grid{phi.support_box(), cfg.grid, cfg.gauss};
    EstimateReport rep = check_integral_estimate(g, cfg.p, phi, grid, cfg.jobs);
    return emit_estimate(rep, cfg);
}

int cmd_area_ratio(const RunConfig& cfg) {
    GraphMap g = resolve_graph(cfg.graph_spec);
    auto center = parse_point(cfg.center);
    require_dim(g, center, "--center");
    AreaRatio ar =
        area_ratio(g, center, cfg.radius, cfg.grid, cfg.gauss, cfg.subdiv);
    JsonWriter w;
    w.begin_object();
    w.key("R").value(cfg.radius);
    w.key("lower").value(ar.lower);
    w.key("upper").value(ar.upper);
    w.key("mid").value(0.5 * (ar.lower + ar.upper));
    w.end_object();
    std::cout << w.str() << "\n";
    return 0;
}

int cmd_sup_sweep(const RunConfig& cfg) {
    GraphMap g = resolve_graph(cfg.graph_spec);
    auto center = parse_point(cfg.center);
    require_dim(g, center, "--center");
    if (cfg.radii.empty()) throw ConfigError("--radii must list at least one radius");
    EstimateReport rep =
        sup_sweep(g, center, cfg.radii, cfg.grid, cfg.gauss, cfg.jobs);
    return emit_estimate(rep, cfg);
}

int cmd_mean_value(const RunConfig& cfg) {
    GraphMap g = resolve_graph(cfg.graph_spec);
    auto center = parse_point(cfg.center);
    require_dim(g, center, "--center");
    EstimateReport rep = mean_value_data(g, center, cfg.radius, cfg.p, cfg.grid,
                                         cfg.gauss, cfg.jobs);
    return emit_estimate(rep, cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Pointwise and integral verification toolkit for graph immersions "
        "with prescribed mean curvature"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--graph", cfg.graph_spec,
                        "graph file, inline JSON, or builtin:NAME")
            ->required();
        sub->add_option("--grid", cfg.grid, "cells (or sample points) per axis");
        sub->add_option("--gauss", cfg.gauss, "Gauss-Legendre order per axis");
        sub->add_option("--tol", cfg.tol, "tolerance override");
        sub->add_option("--jobs", cfg.jobs, "parallel evaluation threads");
        sub->add_option("--format", cfg.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* point = app.add_subcommand("point", "dump every pointwise tensor");
    add_common(point);
    point->add_option("--at", cfg.at, "chart point x1,...,xn")->required();
    point->add_option("--depth", cfg.depth, "derivative depth 2..4");

    CLI::App* verify =
        app.add_subcommand("verify", "run every identity check on a grid");
    add_common(verify);
    verify->add_option("--step", cfg.step, "finite-difference step");
    verify->add_option("--eps", cfg.eps,
                       "epsilon for the refined gradient inequality");
    verify->add_flag("--require-flat", cfg.require_flat,
                     "fail unless the normal bundle is flat");

    CLI::App* stability =
        app.add_subcommand("stability", "energy bound with constant one");
    add_common(stability);
    stability->add_option("--center", cfg.center, "bump center")->required();
    stability->add_option("--rho", cfg.rho, "bump radius");
    stability->add_option("--s", cfg.s, "bump smoothness exponent");

    CLI::App* integral = app.add_subcommand(
        "integral-estimate", "L^p curvature bound terms and ratio");
    add_common(integral);
    integral->add_option("--center", cfg.center, "bump center")->required();
    integral->add_option("--rho", cfg.rho, "bump radius");
    integral->add_option("--s", cfg.s, "bump smoothness exponent");
    integral->add_option("--p", cfg.p, "exponent in [4, 4+sqrt(8/n))")
        ->required();

    CLI::App* area =
        app.add_subcommand("area-ratio", "ball-area ratio with bracketing");
    add_common(area);
    area->add_option("--center", cfg.center, "chart point on the surface")
        ->required();
    area->add_option("--R", cfg.radius, "ambient ball radius")->required();
    area->add_option("--subdiv", cfg.subdiv, "boundary subdivision depth");

    CLI::App* sweep = app.add_subcommand(
        "sup-sweep", "per-radius curvature-estimate quantities");
    add_common(sweep);
    sweep->add_option("--center", cfg.center, "chart point on the surface")
        ->required();
    sweep->add_option("--radii", cfg.radii, "radii list")
        ->required()
        ->delimiter(',');

    CLI::App* mean =
        app.add_subcommand("mean-value", "mean-value inequality data");
    add_common(mean);
    mean->add_option("--center", cfg.center, "chart point on the surface")
        ->required();
    mean->add_option("--R", cfg.radius, "inner ball radius")->required();
    mean->add_option("--p", cfg.p, "forcing exponent (> n)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cfg.grid < 2) throw ConfigError("--grid must be at least 2");
        if (cfg.gauss < 1) throw ConfigError("--gauss must be at least 1");
        if (cfg.jobs < 1) throw ConfigError("--jobs must be at least 1");
        if (cfg.tol == 0.0 || (cfg.tol < 0 && cfg.tol != -1.0))
            throw ConfigError("--tol must be positive");
        if (point->parsed()) return cmd_point(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (stability->parsed()) return cmd_stability(cfg);
        if (integral->parsed()) return cmd_integral_estimate(cfg);
        if (area->parsed()) return cmd_area_ratio(cfg);
        if (sweep->parsed()) return cmd_sup_sweep(cfg);
        if (mean->parsed()) return cmd_mean_value(cfg);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis violation: " << e.what() << "\n";
        return 4;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
