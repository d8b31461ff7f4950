#include "cayley/measure.hpp"

#include <cmath>
#include <numeric>

#include "cayley/errors.hpp"
#include "cayley/format.hpp"
#include "cayley/simd/ops.hpp"

namespace cayley {

StateTable BoundaryLaw::h() const {
  StateTable out{};
  for (std::size_t i = 0; i < kBilayerStates; ++i) out[i] = std::log(z[i]);
  return out;
}

BoundaryLaw boundary_law(const FixedPoint3& point, const DerivedParams& derived) {
  derived.validate();
  if (!(point.u > 0.0 && point.v > 0.0 && point.w > 0.0)) {
    throw validation_error("boundary law needs a positive point");
  }
  return BoundaryLaw{{1.0, point.u / derived.a, point.v / derived.b, point.w / derived.c}};
}

FixedPoint3 point_of(const BoundaryLaw& law, const DerivedParams& derived) {
  const VertexWeight w = vertex_weight(derived, law);
  return FixedPoint3{w.W[1], w.W[2], w.W[3], 0.0};
}

VertexWeight vertex_weight(const DerivedParams& derived, const BoundaryLaw& law) {
  const StateTable e = derived.emission_weights();
  VertexWeight out;
  for (std::size_t i = 0; i < kBilayerStates; ++i) out.W[i] = e[i] * law.z[i];
  return out;
}

VertexWeight vertex_weight(const FixedPoint3& point) { return VertexWeight{{1.0, point.u, point.v, point.w}}; }

double boundary_exponent(const TreeShape& shape) {
  if (shape.depth() > 0) return 1.0;
  return static_cast<double>(shape.branching(0)) / shape.k();
}

namespace {

constexpr double kSpin[2] = {-1.0, 1.0};

std::size_t pow4(std::size_t e) { return std::size_t{1} << (2 * e); }

// log theta^{(e j - d u)/2} for parent state p = (e, d) and child state c = (j, u).
std::array<StateTable, kBilayerStates> edge_log_weights(double theta) {
  const double half = 0.5 * std::log(theta);
  std::array<StateTable, kBilayerStates> t{};
  for (std::size_t p = 0; p < kBilayerStates; ++p) {
    for (std::size_t c = 0; c < kBilayerStates; ++c) {
      t[p][c] = half * (kSpin[p >> 1] * kSpin[c >> 1] - kSpin[p & 1] * kSpin[c & 1]);
    }
  }
  return t;
}

std::size_t digit(std::size_t index, std::size_t vertex) { return (index >> (2 * vertex)) & 3; }

}  // namespace

std::size_t FiniteVolumeMeasure::index_of(const BilayerConfig& cfg) const {
  if (cfg.hidden.size() != shape_.size() || cfg.observed.size() != shape_.size()) {
    throw std::domain_error("configuration is not defined on exactly V_n");
  }
  std::size_t idx = 0;
  for (std::size_t i = shape_.size(); i-- > 0;) idx = idx * 4 + state_index(cfg.hidden[i], cfg.observed[i]);
  return idx;
}

BilayerConfig FiniteVolumeMeasure::config_of(std::size_t index) const {
  if (index >= table_.size()) throw std::domain_error("configuration index out of range");
  BilayerConfig cfg;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    cfg.hidden.push_back(hidden_of(digit(index, i)));
    cfg.observed.push_back(observed_of(digit(index, i)));
  }
  return cfg;
}

StateTable FiniteVolumeMeasure::vertex_marginal(std::size_t vertex) const {
  if (vertex >= shape_.size()) throw std::domain_error("vertex index outside the tree");
  StateTable out{};
  for (std::size_t j = 0; j < table_.size(); ++j) out[digit(j, vertex)] += table_[j];
  return out;
}

std::array<StateTable, kBilayerStates> FiniteVolumeMeasure::pair_marginal(std::size_t parent,
                                                                         std::size_t child) const {
  if (child >= shape_.size() || child == 0 || shape_.parent_index(child) != parent) {
    throw std::domain_error("pair_marginal needs a tree edge (parent, child)");
  }
  std::array<StateTable, kBilayerStates> out{};
  for (std::size_t j = 0; j < table_.size(); ++j) out[digit(j, parent)][digit(j, child)] += table_[j];
  return out;
}

std::vector<double> FiniteVolumeMeasure::marginalize_outer() const {
  if (shape_.depth() == 0) throw precondition_error("a single-vertex measure has no inner ball");
  std::vector<double> out(pow4(shape_.ball_size(shape_.depth() - 1)));
  simd::block_sum(table_, out);
  return out;
}

FiniteVolumeMeasure finite_volume(const TreeShape& shape, const DerivedParams& derived,
                                  const BoundaryLaw& law) {
  derived.validate();
  const std::size_t nv = shape.size();
  if (nv > 12) throw capacity_error("4^|V_n| exceeds the enumeration guard of 2^24 entries");

  const auto T = edge_log_weights(derived.theta);
  const StateTable e = derived.emission_weights();
  const StateTable h = law.h();
  const std::size_t outer = shape.generation_offset(shape.depth());
  const double zexp = boundary_exponent(shape);
  auto unary = [&](std::size_t vertex) {
    StateTable u{};
    for (std::size_t s = 0; s < kBilayerStates; ++s) {
      u[s] = std::log(e[s]) + (vertex >= outer ? zexp * h[s] : 0.0);
    }
    return u;
  };

  std::vector<double> cur(pow4(nv));
  std::vector<double> next(cur.size());
  const StateTable root = unary(0);
  std::copy(root.begin(), root.end(), cur.begin());
  std::size_t m = 4;
  for (std::size_t i = 1; i < nv; ++i) {
    const std::size_t parent = shape.parent_index(i);
    const StateTable u = unary(i);
    const std::span<const double> in(cur.data(), m);
    for (std::size_t s = 0; s < kBilayerStates; ++s) {
      std::array<double, kBilayerStates> pattern{};
      for (std::size_t d = 0; d < kBilayerStates; ++d) pattern[d] = T[d][s] + u[s];
      simd::add_periodic(in, std::span<double>(next.data() + s * m, m), pow4(parent), pattern);
    }
    m *= 4;
    std::copy_n(next.begin(), m, cur.begin());
  }
  const double log_z = simd::log_normalize(cur);
  return FiniteVolumeMeasure(shape, std::move(cur), log_z);
}

double check_compatibility(const TreeShape& shape, const DerivedParams& derived, const BoundaryLaw& law) {
  if (shape.depth() < 1) throw precondition_error("compatibility needs n >= 1");
  const FiniteVolumeMeasure outer = finite_volume(shape, derived, law);
  const FiniteVolumeMeasure inner =
      finite_volume(TreeShape(shape.k(), shape.depth() - 1, shape.root_mode()), derived, law);
  const std::vector<double> summed = outer.marginalize_outer();
  double worst = 0.0;
  for (std::size_t i = 0; i < summed.size(); ++i) {
    worst = std::max(worst, std::abs(summed[i] - inner.table()[i]));
  }
  return worst;
}

EdgeTable edge_conditional(Spin sigma_x, Spin sigma_y, const DerivedParams& derived,
                           const VertexWeight& weights) {
  derived.validate();
  for (double w : weights.W) {
    if (!(w > 0.0) || !std::isfinite(w)) throw validation_error("vertex weights must be positive");
  }
  // Log space with max-subtraction.
  EdgeTable out;
  std::array<double, 4> logs{};
  for (Spin sx : {Spin::up, Spin::down}) {
    for (Spin sy : {Spin::up, Spin::down}) {
      const double expo = 0.5 * (1 + value(sx) * value(sy));
      logs[EdgeTable::slot(sx, sy)] = expo * std::log(derived.theta) + std::log(weights.at(sx, sigma_x)) +
                                      std::log(weights.at(sy, sigma_y));
    }
  }
  out.p = logs;
  simd::log_normalize(out.p, simd::scalar_kernels());
  return out;
}

EdgeTable edge_conditional_k1_printed(Spin sigma_x, Spin sigma_y, double theta, double u1) {
  if (!(theta > 0.0) || !(u1 > 0.0)) throw validation_error("theta and u1 must be positive");
  EdgeTable out;
  if (sigma_x == Spin::up && sigma_y == Spin::up) {
    const double n = 2.0 * theta + u1 + u1 * u1;
    out.p = {theta / n, u1 / n, theta / n, u1 * u1 / n};
  } else if (sigma_x == Spin::down && sigma_y == Spin::up) {
    const double n = theta + (1.0 + theta) * u1 + u1 * u1;
    out.p = {u1 / n, theta / n, u1 * u1 / n, theta * u1 / n};
  } else {
    throw precondition_error("printed k = 1 tables exist only for sigma = (+1,+1) and (-1,+1)");
  }
  return out;
}

std::vector<Fig1Row> curve_fig1(const std::vector<double>& thetas, int k) {
  if (k < 1) throw validation_error("k must be >= 1");
  std::vector<Fig1Row> rows;
  rows.reserve(thetas.size());
  for (double theta : thetas) {
    const DerivedParams d = DerivedParams::transfer(k, theta);
    Fig1Row row{theta, theta / (2.0 * (1.0 + theta)), std::nullopt, std::nullopt};
    if (k >= 2 && theta >= static_cast<double>(k + 1) / (k - 1)) {
      const auto roots = solve_scalar({k, theta});
      double v1 = 1.0, v2 = 1.0;
      if (roots.size() == 3) {
        v1 = roots.front();
        v2 = roots.back();
      }
      row.mu1 = edge_conditional(Spin::up, Spin::up, d, vertex_weight(FixedPoint3{1.0, v1, v1})).p[0];
      row.mu2 = edge_conditional(Spin::up, Spin::up, d, vertex_weight(FixedPoint3{1.0, v2, v2})).p[0];
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<Fig2Row> curve_fig2(const std::vector<double>& thetas, double a, CurveVariant variant) {
  std::vector<Fig2Row> rows;
  rows.reserve(thetas.size());
  for (double theta : thetas) {
    const DerivedParams d = DerivedParams::transfer(1, theta, a, a, 1.0);
    const FixedPoint3 p = solve_k1_symmetric(theta, a);
    Fig2Row row{theta, 0.0, 0.0};
    if (variant == CurveVariant::printed) {
      row.mu_star_pp_pp = edge_conditional_k1_printed(Spin::up, Spin::up, theta, p.u).p[0];
      row.mu_star_pp_mp = edge_conditional_k1_printed(Spin::down, Spin::up, theta, p.u).p[0];
    } else {
      row.mu_star_pp_pp = edge_conditional(Spin::up, Spin::up, d, vertex_weight(p)).p[0];
      row.mu_star_pp_mp = edge_conditional(Spin::down, Spin::up, d, vertex_weight(p)).p[0];
    }
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<Fig1Row>& rows) {
  auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
  os << "theta,mu0,mu1,mu2\n";
  for (const auto& r : rows) {
    os << format_double(r.theta) << ',' << format_double(r.mu0) << ',' << opt(r.mu1) << ',' << opt(r.mu2)
       << '\n';
  }
}

void write_csv(std::ostream& os, const std::vector<Fig2Row>& rows) {
  os << "theta,mu_star_pp_pp,mu_star_pp_mp\n";
  for (const auto& r : rows) {
    os << format_double(r.theta) << ',' << format_double(r.mu_star_pp_pp) << ','
       << format_double(r.mu_star_pp_mp) << '\n';
  }
}

BilayerKernel markov_kernel(const DerivedParams& derived, const BoundaryLaw& law, RootMode mode) {
  derived.validate();
  const VertexWeight w = vertex_weight(derived, law);
  BilayerKernel out;
  out.root_mode = mode;
  for (std::size_t p = 0; p < kBilayerStates; ++p) {
    for (std::size_t c = 0; c < kBilayerStates; ++c) {
      const double expo = 0.5 * (kSpin[p >> 1] * kSpin[c >> 1] - kSpin[p & 1] * kSpin[c & 1]);
      out.K[p][c] = std::log(derived.theta) * expo + std::log(w.W[c]);
    }
    simd::log_normalize(out.K[p], simd::scalar_kernels());
  }
  const FiniteVolumeMeasure mu1 = finite_volume(TreeShape(derived.k, 1, mode), derived, law);
  out.pi0 = mu1.vertex_marginal(0);
  return out;
}

StateTable closed_form_root_law(const DerivedParams& derived, const BoundaryLaw& law, RootMode mode) {
  const TreeShape single(derived.k, 0, mode);
  const double expo = boundary_exponent(single);
  const StateTable e = derived.emission_weights();
  StateTable out{};
  for (std::size_t s = 0; s < kBilayerStates; ++s) out[s] = std::log(e[s]) + expo * std::log(law.z[s]);
  simd::log_normalize(out, simd::scalar_kernels());
  return out;
}

std::array<StateTable, kBilayerStates> exact_transition(const FiniteVolumeMeasure& mu, std::size_t parent,
                                                       std::size_t child) {
  auto pair = mu.pair_marginal(parent, child);
  for (auto& row : pair) {
    const double s = std::accumulate(row.begin(), row.end(), 0.0);
    if (!(s > 0.0)) throw std::domain_error("parent state has zero probability");
    for (double& x : row) x /= s;
  }
  return pair;
}

namespace {

std::size_t draw(const StateTable& p, std::mt19937_64& rng) {
  const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < kBilayerStates; ++s) {
    acc += p[s];
    if (r < acc) return s;
  }
  return kBilayerStates - 1;
}

}  // namespace

BilayerConfig sample(const BilayerKernel& kernel, const TreeShape& shape, std::mt19937_64& rng) {
  if (shape.root_mode() != kernel.root_mode) {
    throw precondition_error("kernel root law was built for a different root mode");
  }
  std::vector<std::size_t> state(shape.size());
  state[0] = draw(kernel.pi0, rng);
  for (std::size_t i = 1; i < shape.size(); ++i) state[i] = draw(kernel.K[state[shape.parent_index(i)]], rng);
  BilayerConfig cfg;
  cfg.hidden.reserve(shape.size());
  cfg.observed.reserve(shape.size());
  for (std::size_t s : state) {
    cfg.hidden.push_back(hidden_of(s));
    cfg.observed.push_back(observed_of(s));
  }
  return cfg;
}

BilayerConfig sample(const BilayerKernel& kernel, const TreeShape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample(kernel, shape, rng);
}

}  // namespace cayley
