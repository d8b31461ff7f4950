#pragma once

// Model parameters, the derived transfer constants and the bilayer energy.
//
// Bilayer states (hidden, observed) are enumerated in the fixed order
//   0:(-1,-1)  1:(-1,+1)  2:(+1,-1)  3:(+1,+1)
// which is also the order of the vertex weights (1, u, v, w).

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "cayley/tree.hpp"

namespace cayley {

enum class Spin : std::int8_t { down = -1, up = 1 };

constexpr int value(Spin s) { return static_cast<int>(s); }
constexpr Spin flip(Spin s) { return s == Spin::up ? Spin::down : Spin::up; }
constexpr std::size_t bit(Spin s) { return s == Spin::up ? 1 : 0; }
constexpr Spin spin_from_bit(std::size_t b) { return b ? Spin::up : Spin::down; }
Spin spin_from_int(int v);

inline constexpr std::size_t kBilayerStates = 4;

constexpr std::size_t state_index(Spin hidden, Spin observed) {
  return 2 * bit(hidden) + bit(observed);
}
constexpr Spin hidden_of(std::size_t state) { return spin_from_bit(state >> 1); }
constexpr Spin observed_of(std::size_t state) { return spin_from_bit(state & 1); }

// Emission log-likelihoods p(observed | hidden), stored as raw log-weights.
struct EmissionTable {
  std::array<std::array<double, 2>, 2> log_weight{};  // [hidden][observed], index 0 is -1

  double operator()(Spin hidden, Spin observed) const {
    return log_weight[bit(hidden)][bit(observed)];
  }
  double& at(Spin hidden, Spin observed) { return log_weight[bit(hidden)][bit(observed)]; }
};

struct ModelParams {
  int k = 2;
  double coupling = 0.0;  // J
  double beta = 1.0;      // inverse temperature
  EmissionTable emission{};

  void validate() const;
};

// Transfer constants: theta = exp(2 J beta) and the emission weights relative
// to the (hidden -1, observed -1) entry:
//   E(-1,-1) = 1, E(-1,+1) = a, E(+1,-1) = b, E(+1,+1) = c   (hidden, observed).
struct DerivedParams {
  int k = 2;
  double theta = 1.0;
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;

  static DerivedParams transfer(int k, double theta, double a = 1.0, double b = 1.0,
                                double c = 1.0);

  void validate() const;
  double emission_weight(Spin hidden, Spin observed) const {
    return emission_weights()[state_index(hidden, observed)];
  }
  std::array<double, 4> emission_weights() const { return {1.0, a, b, c}; }
  bool unit_emission() const { return a == 1.0 && b == 1.0 && c == 1.0; }
  bool symmetric_emission() const { return a == b && c == 1.0; }
};

DerivedParams derive(const ModelParams& params);

// Hidden and observed layers indexed by the flat vertex index of a TreeShape.
struct BilayerConfig {
  std::vector<Spin> hidden;
  std::vector<Spin> observed;

  friend bool operator==(const BilayerConfig&, const BilayerConfig&) = default;
};

// -J sum_{<x,y> in L_n} (s(x)s(y) - sigma(x)sigma(y)) - sum_{x in V_n} p(sigma(x) | s(x))
double hamiltonian(const BilayerConfig& cfg, const TreeShape& shape, const ModelParams& params);

// sum_{<x,y> in L_n} (s(x)s(y) - sigma(x)sigma(y))
double energy_loss(const BilayerConfig& cfg, const TreeShape& shape);

// Negates both layers.
BilayerConfig flip_symmetry(BilayerConfig cfg);

}  // namespace cayley
