#include "cayley/model.hpp"

#include <cmath>
#include <stdexcept>

#include "cayley/errors.hpp"

namespace cayley {

Spin spin_from_int(int v) {
  if (v == 1) return Spin::up;
  if (v == -1) return Spin::down;
  throw validation_error("spin values must be -1 or +1");
}

void ModelParams::validate() const {
  if (k < 1) throw validation_error("k must be >= 1");
  if (!std::isfinite(coupling)) throw validation_error("J must be finite");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw validation_error("beta must be a positive real");
  for (const auto& row : emission.log_weight) {
    for (double p : row) {
      if (!std::isfinite(p)) throw validation_error("emission log-likelihoods must be finite");
    }
  }
}

DerivedParams DerivedParams::transfer(int k, double theta, double a, double b, double c) {
  DerivedParams d{k, theta, a, b, c};
  d.validate();
  return d;
}

void DerivedParams::validate() const {
  if (k < 1) throw validation_error("k must be >= 1");
  for (double x : {theta, a, b, c}) {
    if (!(x > 0.0) || !std::isfinite(x)) throw validation_error("theta, a, b, c must be positive and finite");
  }
}

DerivedParams derive(const ModelParams& params) {
  params.validate();
  const auto& e = params.emission;
  const double base = e(Spin::down, Spin::down);
  DerivedParams d;
  d.k = params.k;
  d.theta = std::exp(2.0 * params.coupling * params.beta);
  d.a = std::exp(params.beta * (e(Spin::down, Spin::up) - base));
  d.b = std::exp(params.beta * (e(Spin::up, Spin::down) - base));
  d.c = std::exp(params.beta * (e(Spin::up, Spin::up) - base));
  d.validate();
  return d;
}

namespace {

void check_config(const BilayerConfig& cfg, const TreeShape& shape) {
  if (cfg.hidden.size() != shape.size() || cfg.observed.size() != shape.size()) {
    throw std::domain_error("configuration is not defined on exactly V_n of the tree");
  }
}

}  // namespace

double energy_loss(const BilayerConfig& cfg, const TreeShape& shape) {
  check_config(cfg, shape);
  double total = 0.0;
  for (std::size_t y = 1; y < shape.size(); ++y) {
    const std::size_t x = shape.parent_index(y);
    total += value(cfg.hidden[x]) * value(cfg.hidden[y]) -
             value(cfg.observed[x]) * value(cfg.observed[y]);
  }
  return total;
}

double hamiltonian(const BilayerConfig& cfg, const TreeShape& shape, const ModelParams& params) {
  check_config(cfg, shape);
  double emission = 0.0;
  for (std::size_t x = 0; x < shape.size(); ++x) emission += params.emission(cfg.hidden[x], cfg.observed[x]);
  return -params.coupling * energy_loss(cfg, shape) - emission;
}

BilayerConfig flip_symmetry(BilayerConfig cfg) {
  for (Spin& s : cfg.hidden) s = flip(s);
  for (Spin& s : cfg.observed) s = flip(s);
  return cfg;
}

}  // namespace cayley
