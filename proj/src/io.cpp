#include "cayley/io.hpp"

#include <cmath>
#include <fstream>

#include "cayley/errors.hpp"

namespace cayley {

std::string spin_text(Spin s) { return s == Spin::up ? "+1" : "-1"; }

std::string state_key(std::size_t state) {
  if (state >= kBilayerStates) throw std::domain_error("bilayer state out of range");
  return spin_text(hidden_of(state)) + "," + spin_text(observed_of(state));
}

std::size_t parse_state_key(const std::string& key) {
  for (std::size_t s = 0; s < kBilayerStates; ++s) {
    if (key == state_key(s)) return s;
  }
  // Accept the unsigned spelling "1,-1" as well.
  for (std::size_t s = 0; s < kBilayerStates; ++s) {
    std::string alt = state_key(s);
    for (std::size_t pos; (pos = alt.find('+')) != std::string::npos;) alt.erase(pos, 1);
    if (key == alt) return s;
  }
  throw validation_error("unknown bilayer state key '" + key + "' (expected e.g. \"-1,+1\")");
}

namespace {

double number(const Json& j, const char* key) {
  if (!j.contains(key)) throw validation_error(std::string("missing key '") + key + "'");
  const Json& v = j.at(key);
  if (!v.is_number()) throw validation_error(std::string("key '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw validation_error(std::string("key '") + key + "' must be finite");
  return x;
}

int integer(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw validation_error(std::string("key '") + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

bool has_any(const Json& j, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (j.contains(k)) return true;
  }
  return false;
}

void check_groups(const Json& j) {
  if (!j.is_object()) throw validation_error("model parameters must be a JSON object");
  const bool physical = has_any(j, {"J", "beta", "emission"});
  const bool derived = has_any(j, {"theta", "a", "b", "c"});
  if (physical == derived) {
    throw validation_error("give exactly one parameter group: {k, J, beta, emission} or {k, theta, a, b, c}");
  }
}

}  // namespace

ModelParams parse_physical(const Json& j) {
  check_groups(j);
  if (!j.contains("J")) throw validation_error("physical parameters need J, beta and emission");
  ModelParams p;
  p.k = integer(j, "k");
  p.coupling = number(j, "J");
  p.beta = number(j, "beta");
  if (!j.contains("emission") || !j.at("emission").is_object()) {
    throw validation_error("'emission' must be an object keyed by \"hidden,observed\"");
  }
  const Json& e = j.at("emission");
  if (e.size() != kBilayerStates) throw validation_error("'emission' needs exactly 4 entries");
  std::array<bool, kBilayerStates> seen{};
  for (const auto& [key, val] : e.items()) {
    const std::size_t s = parse_state_key(key);
    if (seen[s]) throw validation_error("duplicate emission entry '" + key + "'");
    if (!val.is_number()) throw validation_error("emission entries must be numbers");
    seen[s] = true;
    p.emission.at(hidden_of(s), observed_of(s)) = val.get<double>();
  }
  p.validate();
  return p;
}

DerivedParams parse_model(const Json& j) {
  check_groups(j);
  if (has_any(j, {"J", "beta", "emission"})) return derive(parse_physical(j));
  const double a = j.contains("a") ? number(j, "a") : 1.0;
  const double b = j.contains("b") ? number(j, "b") : 1.0;
  const double c = j.contains("c") ? number(j, "c") : 1.0;
  return DerivedParams::transfer(integer(j, "k"), number(j, "theta"), a, b, c);
}

Json to_json(const ModelParams& p) {
  Json e = Json::object();
  for (std::size_t s = 0; s < kBilayerStates; ++s) e[state_key(s)] = p.emission(hidden_of(s), observed_of(s));
  return Json{{"k", p.k}, {"J", p.coupling}, {"beta", p.beta}, {"emission", e}};
}

Json to_json(const DerivedParams& d) {
  return Json{{"k", d.k}, {"theta", d.theta}, {"a", d.a}, {"b", d.b}, {"c", d.c}};
}

Json to_json(const FixedPoint3& p) {
  return Json{{"u", p.u}, {"v", p.v}, {"w", p.w}, {"residual", p.residual}};
}

Json to_json(const SolutionSet& s) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < s.count(); ++i) {
    Json p = to_json(s.points[i]);
    p["label"] = to_string(s.labels[i]);
    pts.push_back(std::move(p));
  }
  return Json{{"count", s.count()}, {"solutions", pts}};
}

Json to_json(const PhaseRegion& r) {
  return Json{{"count_lower_bound", r.count_lower_bound},
              {"theta_c_high", r.theta_c_high},
              {"theta_c_low", r.theta_c_low}};
}

Json to_json(const EdgeTable& t) {
  Json out = Json::object();
  for (Spin sy : {Spin::up, Spin::down}) {
    for (Spin sx : {Spin::up, Spin::down}) {
      out[spin_text(sx) + "," + spin_text(sy)] = t.at(sx, sy);
    }
  }
  return out;
}

Json to_json(const BoundaryLaw& law) {
  Json z = Json::object(), h = Json::object();
  const StateTable logs = law.h();
  for (std::size_t s = 0; s < kBilayerStates; ++s) {
    z[state_key(s)] = law.z[s];
    h[state_key(s)] = logs[s];
  }
  return Json{{"z", z}, {"h", h}};
}

Json to_json(const BilayerKernel& kernel) {
  Json states = Json::array(), rows = Json::array();
  for (std::size_t s = 0; s < kBilayerStates; ++s) states.push_back(state_key(s));
  for (const auto& row : kernel.K) rows.push_back(Json(row));
  return Json{{"states", states}, {"K", rows}, {"pi0", Json(kernel.pi0)}, {"root_mode", to_string(kernel.root_mode)}};
}

Json layer_to_json(const std::vector<Spin>& layer, const TreeShape& shape) {
  if (layer.size() != shape.size()) throw validation_error("layer size differs from |V_n|");
  Json out = Json::object();
  for (std::size_t i = 0; i < layer.size(); ++i) out[shape.vertex(i).to_string()] = value(layer[i]);
  return out;
}

Json to_json(const BilayerConfig& cfg, const TreeShape& shape) {
  return Json{{"hidden", layer_to_json(cfg.hidden, shape)}, {"observed", layer_to_json(cfg.observed, shape)}};
}

Json marginals_to_json(const MarginalTable& m, const TreeShape& shape) {
  Json out = Json::object();
  for (std::size_t i = 0; i < m.size(); ++i) out[shape.vertex(i).to_string()] = Json{{"-1", m[i][0]}, {"+1", m[i][1]}};
  return out;
}

namespace {

Spin spin_value(const Json& v) {
  if (v.is_number_integer()) return spin_from_int(v.get<int>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "+1" || s == "1" || s == "+") return Spin::up;
    if (s == "-1" || s == "-") return Spin::down;
  }
  throw validation_error("spins must be -1 or +1");
}

}  // namespace

std::vector<Spin> parse_layer(const Json& j, const TreeShape& shape) {
  std::vector<Spin> out(shape.size(), Spin::up);
  if (j.is_array()) {
    if (j.size() != shape.size()) throw validation_error("layer array length differs from |V_n|");
    for (std::size_t i = 0; i < j.size(); ++i) out[i] = spin_value(j[i]);
    return out;
  }
  if (!j.is_object()) throw validation_error("layer must be an object {path: spin} or an array");
  std::vector<bool> seen(shape.size(), false);
  for (const auto& [key, val] : j.items()) {
    const VertexId x = VertexId::parse(key);
    if (!shape.contains(x)) throw validation_error("vertex " + key + " is outside V_n");
    const std::size_t i = shape.index_of(x);
    if (seen[i]) throw validation_error("duplicate vertex " + key);
    seen[i] = true;
    out[i] = spin_value(val);
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw validation_error("layer misses vertex " + shape.vertex(i).to_string());
  }
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw validation_error("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace cayley
