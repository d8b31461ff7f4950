#pragma once

// Boundary laws, exact finite-volume measures, edge conditionals and the
// tree-indexed Markov chain built from a fixed point.

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "cayley/model.hpp"
#include "cayley/solver.hpp"
#include "cayley/tree.hpp"

namespace cayley {

using StateTable = std::array<double, kBilayerStates>;  // indexed by state_index

// z(hidden, observed) with z(-1,-1) = 1.
struct BoundaryLaw {
  StateTable z{1.0, 1.0, 1.0, 1.0};

  double at(Spin hidden, Spin observed) const { return z[state_index(hidden, observed)]; }
  StateTable h() const;  // log z
};

BoundaryLaw boundary_law(const FixedPoint3& point, const DerivedParams& derived);
FixedPoint3 point_of(const BoundaryLaw& law, const DerivedParams& derived);

// W = E * z, which is (1, u, v, w) for the point the law came from.
struct VertexWeight {
  StateTable W{1.0, 1.0, 1.0, 1.0};

  double at(Spin hidden, Spin observed) const { return W[state_index(hidden, observed)]; }
};

VertexWeight vertex_weight(const DerivedParams& derived, const BoundaryLaw& law);
VertexWeight vertex_weight(const FixedPoint3& point);

// Exponent of z at an outer-generation vertex: |successors| / k. Only the
// single-vertex full-mode tree differs from 1, where the root has k+1.
double boundary_exponent(const TreeShape& shape);

// Exact joint law of (s_n, sigma_n). Entry index: sum_i state(i) * 4^i over the
// flat vertex order of `shape`, so the outer generation occupies the high digits.
class FiniteVolumeMeasure {
 public:
  static constexpr std::size_t kMaxEntries = std::size_t{1} << 24;

  FiniteVolumeMeasure(TreeShape shape, std::vector<double> table, double log_z)
      : shape_(std::move(shape)), table_(std::move(table)), log_z_(log_z) {}

  const TreeShape& shape() const { return shape_; }
  const std::vector<double>& table() const { return table_; }
  double log_z() const { return log_z_; }

  std::size_t index_of(const BilayerConfig& cfg) const;
  BilayerConfig config_of(std::size_t index) const;
  double probability(const BilayerConfig& cfg) const { return table_[index_of(cfg)]; }

  StateTable vertex_marginal(std::size_t vertex) const;
  // pair[s_parent][s_child] for an edge (parent, child) of the tree.
  std::array<StateTable, kBilayerStates> pair_marginal(std::size_t parent, std::size_t child) const;
  // Sum over the outer generation: a table on V_{n-1} in the same index layout.
  std::vector<double> marginalize_outer() const;

 private:
  TreeShape shape_;
  std::vector<double> table_;
  double log_z_;
};

FiniteVolumeMeasure finite_volume(const TreeShape& shape, const DerivedParams& derived,
                                  const BoundaryLaw& law);

// max |sum over W_n of mu_n - mu_{n-1}|, n = shape.depth() >= 1.
double check_compatibility(const TreeShape& shape, const DerivedParams& derived, const BoundaryLaw& law);

// P(s(x), s(y) | sigma(x), sigma(y)) for a single edge, listed as
// (+1,+1), (-1,+1), (+1,-1), (-1,-1) in (s(x), s(y)).
struct EdgeTable {
  std::array<double, 4> p{};

  static std::size_t slot(Spin sx, Spin sy) { return (sx == Spin::up ? 0 : 1) + (sy == Spin::up ? 0 : 2); }
  double at(Spin sx, Spin sy) const { return p[slot(sx, sy)]; }
};

EdgeTable edge_conditional(Spin sigma_x, Spin sigma_y, const DerivedParams& derived,
                           const VertexWeight& weights);

// Closed-form k = 1 tables in the alternate printed form; defined for
// sigma = (+1,+1) and (-1,+1) only.
EdgeTable edge_conditional_k1_printed(Spin sigma_x, Spin sigma_y, double theta, double u1);

enum class CurveVariant { derived, printed };

struct Fig1Row {
  double theta;
  double mu0;
  std::optional<double> mu1;  // from the smaller nontrivial root on I1
  std::optional<double> mu2;  // from the larger one
};

struct Fig2Row {
  double theta;
  double mu_star_pp_pp;  // P((+1,+1) | (+1,+1))
  double mu_star_pp_mp;  // P((+1,+1) | (-1,+1))
};

// a = b = c = 1; P((+1,+1) | sigma) for the three I1 measures.
std::vector<Fig1Row> curve_fig1(const std::vector<double>& thetas, int k);
// k = 1, a = b, c = 1.
std::vector<Fig2Row> curve_fig2(const std::vector<double>& thetas, double a,
                                CurveVariant variant = CurveVariant::derived);

void write_csv(std::ostream& os, const std::vector<Fig1Row>& rows);
void write_csv(std::ostream& os, const std::vector<Fig2Row>& rows);

struct BilayerKernel {
  std::array<StateTable, kBilayerStates> K{};  // K[parent state][child state]
  StateTable pi0{};
  RootMode root_mode = RootMode::full;
};

BilayerKernel markov_kernel(const DerivedParams& derived, const BoundaryLaw& law,
                            RootMode mode = RootMode::full);

// pi(e, d) proportional to E(d|e) z(e,d)^{branching(0)/k}.
StateTable closed_form_root_law(const DerivedParams& derived, const BoundaryLaw& law, RootMode mode);

// Parent-to-child conditional on edge (parent, child) of an exact measure.
std::array<StateTable, kBilayerStates> exact_transition(const FiniteVolumeMeasure& mu, std::size_t parent,
                                                       std::size_t child);

BilayerConfig sample(const BilayerKernel& kernel, const TreeShape& shape, std::mt19937_64& rng);
BilayerConfig sample(const BilayerKernel& kernel, const TreeShape& shape, std::uint64_t seed);

}  // namespace cayley
