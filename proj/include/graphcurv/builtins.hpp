#pragma once

#include <string>
#include <vector>

#include "graphcurv/geometry.hpp"

namespace graphcurv {

/// Named example graphs addressable without files: plane, affine,
/// sphere-cap, scherk, rank-one-flat, nonflat-quadratic.
const std::vector<std::string>& builtin_names();

GraphMap builtin_graph(const std::string& name);

/// Loads "builtin:NAME", a raw JSON object, or a file path.
GraphMap resolve_graph(const std::string& spec);

}  // namespace graphcurv
