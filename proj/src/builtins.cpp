#include "graphcurv/builtins.hpp"

#include <fstream>
#include <sstream>

#include "graphcurv/errors.hpp"

namespace graphcurv {

namespace {

GraphMap make_graph(int n, int k, const std::vector<std::string>& psi,
                    std::optional<std::vector<std::array<double, 2>>> domain) {
    GraphMap g;
    g.n = n;
    g.k = k;
    for (const auto& s : psi) g.components.push_back(parse(s, n));
    g.domain = std::move(domain);
    return g;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {
        "plane",         "affine",        "sphere-cap",
        "scherk",        "rank-one-flat", "nonflat-quadratic",
    };
    return names;
}

GraphMap builtin_graph(const std::string& name) {
    if (name == "plane") return make_graph(2, 1, {"0"}, std::nullopt);
    if (name == "affine") return make_graph(2, 1, {"x1 + x2"}, std::nullopt);
    if (name == "sphere-cap")
        return make_graph(2, 1, {"sqrt(4 - x1^2 - x2^2)"},
                          {{{-1.4, 1.4}, {-1.4, 1.4}}});
    if (name == "scherk")
        return make_graph(2, 1, {"ln(cos(x1) / cos(x2))"},
                          {{{-1.2, 1.2}, {-1.2, 1.2}}});
    if (name == "rank-one-flat")
        return make_graph(2, 2, {"sin(x1) * cos(x2)", "2 * sin(x1) * cos(x2)"},
                          std::nullopt);
    if (name == "nonflat-quadratic")
        return make_graph(2, 2, {"x1^2", "x1 * x2"}, std::nullopt);
    throw ConfigError("unknown builtin graph '" + name + "'");
}

GraphMap resolve_graph(const std::string& spec) {
    if (spec.rfind("builtin:", 0) == 0) return builtin_graph(spec.substr(8));
    if (!spec.empty() && spec[0] == '{') return graph_from_json(spec);
    std::ifstream in(spec);
    if (!in) throw ConfigError("cannot open graph file '" + spec + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return graph_from_json(ss.str());
}

}  // namespace graphcurv
