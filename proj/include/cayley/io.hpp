#pragma once

// JSON (de)serialization. Bilayer states are keyed "hidden,observed", e.g.
// "-1,+1"; vertices are keyed by their root path, e.g. "/" or "/0/2".

#include <json.hpp>
#include <string>
#include <vector>

#include "cayley/inference.hpp"
#include "cayley/measure.hpp"
#include "cayley/model.hpp"
#include "cayley/solver.hpp"
#include "cayley/tree.hpp"

namespace cayley {

using Json = nlohmann::ordered_json;

std::string state_key(std::size_t state);
std::size_t parse_state_key(const std::string& key);
std::string spin_text(Spin s);  // "+1" / "-1"

// Model parameters: exactly one of the groups {k, J, beta, emission} or
// {k, theta[, a, b, c]}.
DerivedParams parse_model(const Json& j);
ModelParams parse_physical(const Json& j);
Json to_json(const ModelParams& p);
Json to_json(const DerivedParams& d);

Json to_json(const FixedPoint3& p);
Json to_json(const SolutionSet& s);
Json to_json(const PhaseRegion& r);
Json to_json(const EdgeTable& t);
Json to_json(const BoundaryLaw& law);
Json to_json(const BilayerKernel& kernel);
Json to_json(const BilayerConfig& cfg, const TreeShape& shape);
Json layer_to_json(const std::vector<Spin>& layer, const TreeShape& shape);
Json marginals_to_json(const MarginalTable& m, const TreeShape& shape);

// Either an object {path: spin} covering V_n or an array in flat vertex order.
std::vector<Spin> parse_layer(const Json& j, const TreeShape& shape);

Json read_json_file(const std::string& path);

}  // namespace cayley
