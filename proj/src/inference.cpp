#include "cayley/inference.hpp"

#include <cmath>

#include "cayley/errors.hpp"
#include "cayley/simd/ops.hpp"

namespace cayley {

void InferenceProblem::validate() const {
  derived.validate();
  if (sigma.size() != shape.size()) throw validation_error("sigma must assign every vertex of V_n");
  if (shape.k() != derived.k) throw validation_error("tree branching and model k differ");
  for (double z : law.z) {
    if (!(z > 0.0) || !std::isfinite(z)) throw validation_error("boundary law entries must be positive");
  }
}

namespace {

using Pair = std::array<double, 2>;  // indexed by bit(s)

// Log unary factors per vertex.
std::vector<Pair> unary_logs(const InferenceProblem& pr) {
  const std::size_t outer = pr.shape.generation_offset(pr.shape.depth());
  const double zexp = boundary_exponent(pr.shape);
  std::vector<Pair> out(pr.shape.size());
  for (std::size_t x = 0; x < out.size(); ++x) {
    for (std::size_t b = 0; b < 2; ++b) {
      const Spin s = spin_from_bit(b);
      out[x][b] = std::log(pr.derived.emission_weight(s, pr.sigma[x])) +
                  (x >= outer ? zexp * std::log(pr.law.at(s, pr.sigma[x])) : 0.0);
    }
  }
  return out;
}

// log theta^{(1 + s s')/2}: log theta when equal, 0 otherwise.
std::array<Pair, 2> pair_logs(double theta) {
  const double lt = std::log(theta);
  return {Pair{lt, 0.0}, Pair{0.0, lt}};
}

void normalize(Pair& p) {
  const double s = p[0] + p[1];
  p[0] /= s;
  p[1] /= s;
}

bool prefer_up(double up, double down) {
  return up >= down - 1e-12 * std::max({1.0, std::abs(up), std::abs(down)});
}

}  // namespace

std::vector<Spin> Posterior::hidden_of(std::size_t index, std::size_t vertices) const {
  std::vector<Spin> out(vertices);
  for (std::size_t i = 0; i < vertices; ++i) out[i] = spin_from_bit((index >> i) & 1);
  return out;
}

MarginalTable Posterior::marginals(std::size_t vertices) const {
  MarginalTable out(vertices, {0.0, 0.0});
  for (std::size_t j = 0; j < table.size(); ++j) {
    for (std::size_t i = 0; i < vertices; ++i) out[i][(j >> i) & 1] += table[j];
  }
  return out;
}

Posterior exact_posterior(const InferenceProblem& problem) {
  problem.validate();
  const std::size_t nv = problem.shape.size();
  if (nv > 22) throw capacity_error("2^|V_n| exceeds the enumeration guard of 2^22 entries");
  const auto un = unary_logs(problem);
  const auto pl = pair_logs(problem.derived.theta);

  std::vector<double> cur(std::size_t{1} << nv);
  std::vector<double> next(cur.size());
  cur[0] = un[0][0];
  cur[1] = un[0][1];
  std::size_t m = 2;
  for (std::size_t i = 1; i < nv; ++i) {
    const std::size_t parent = problem.shape.parent_index(i);
    const std::span<const double> in(cur.data(), m);
    for (std::size_t s = 0; s < 2; ++s) {
      const std::array<double, 2> pattern{pl[0][s] + un[i][s], pl[1][s] + un[i][s]};
      simd::add_periodic(in, std::span<double>(next.data() + s * m, m), std::size_t{1} << parent, pattern);
    }
    m *= 2;
    std::copy_n(next.begin(), m, cur.begin());
  }
  const double log_z = simd::log_normalize(cur);
  return Posterior{std::move(cur), log_z};
}

MarginalTable bp_marginals(const InferenceProblem& problem) {
  problem.validate();
  const TreeShape& sh = problem.shape;
  const std::size_t nv = sh.size();
  const auto un = unary_logs(problem);
  const double theta = problem.derived.theta;

  // Unary potentials rescaled per vertex; a common factor does not change marginals.
  std::vector<Pair> phi(nv);
  for (std::size_t x = 0; x < nv; ++x) {
    const double mx = std::max(un[x][0], un[x][1]);
    phi[x] = {std::exp(un[x][0] - mx), std::exp(un[x][1] - mx)};
  }
  auto psi = [theta](std::size_t a, std::size_t b) { return a == b ? theta : 1.0; };

  // Upward messages child -> parent, and the product of incoming child messages.
  std::vector<Pair> up(nv, {1.0, 1.0});
  std::vector<Pair> from_children(nv, {1.0, 1.0});
  for (std::size_t x = nv; x-- > 1;) {
    Pair local{phi[x][0] * from_children[x][0], phi[x][1] * from_children[x][1]};
    Pair msg{};
    for (std::size_t sp = 0; sp < 2; ++sp) msg[sp] = psi(sp, 0) * local[0] + psi(sp, 1) * local[1];
    normalize(msg);
    up[x] = msg;
    const std::size_t p = sh.parent_index(x);
    from_children[p][0] *= msg[0];
    from_children[p][1] *= msg[1];
    normalize(from_children[p]);
  }

  std::vector<Pair> down(nv, {1.0, 1.0});
  MarginalTable out(nv);
  for (std::size_t x = 0; x < nv; ++x) {
    if (x > 0) {
      const std::size_t p = sh.parent_index(x);
      Pair cavity{};
      for (std::size_t sp = 0; sp < 2; ++sp) {
        cavity[sp] = phi[p][sp] * down[p][sp] * from_children[p][sp] / up[x][sp];
      }
      Pair msg{};
      for (std::size_t s = 0; s < 2; ++s) msg[s] = psi(0, s) * cavity[0] + psi(1, s) * cavity[1];
      normalize(msg);
      down[x] = msg;
    }
    Pair belief{phi[x][0] * down[x][0] * from_children[x][0], phi[x][1] * down[x][1] * from_children[x][1]};
    normalize(belief);
    out[x] = belief;
  }
  return out;
}

std::vector<Spin> map_estimate(const InferenceProblem& problem) {
  problem.validate();
  const TreeShape& sh = problem.shape;
  const std::size_t nv = sh.size();
  const auto un = unary_logs(problem);
  const auto pl = pair_logs(problem.derived.theta);

  // best[x][s]: best log-score of the subtree below x given s(x) = s.
  std::vector<Pair> best(nv);
  for (std::size_t x = 0; x < nv; ++x) best[x] = un[x];
  std::vector<Pair> up(nv);
  for (std::size_t x = nv; x-- > 1;) {
    for (std::size_t sp = 0; sp < 2; ++sp) {
      up[x][sp] = std::max(pl[sp][0] + best[x][0], pl[sp][1] + best[x][1]);
    }
    const std::size_t p = sh.parent_index(x);
    best[p][0] += up[x][0];
    best[p][1] += up[x][1];
  }

  std::vector<std::size_t> bits(nv);
  bits[0] = prefer_up(best[0][1], best[0][0]) ? 1 : 0;
  for (std::size_t x = 1; x < nv; ++x) {
    const std::size_t sp = bits[sh.parent_index(x)];
    bits[x] = prefer_up(pl[sp][1] + best[x][1], pl[sp][0] + best[x][0]) ? 1 : 0;
  }
  std::vector<Spin> out(nv);
  for (std::size_t x = 0; x < nv; ++x) out[x] = spin_from_bit(bits[x]);
  return out;
}

double log_score(const InferenceProblem& problem, const std::vector<Spin>& hidden) {
  problem.validate();
  if (hidden.size() != problem.shape.size()) throw validation_error("hidden layer must assign every vertex");
  const auto un = unary_logs(problem);
  const auto pl = pair_logs(problem.derived.theta);
  double total = 0.0;
  for (std::size_t x = 0; x < hidden.size(); ++x) total += un[x][bit(hidden[x])];
  for (std::size_t x = 1; x < hidden.size(); ++x) {
    total += pl[bit(hidden[problem.shape.parent_index(x)])][bit(hidden[x])];
  }
  return total;
}

DenoiseResult denoise(const InferenceProblem& problem) {
  DenoiseResult out;
  out.map = map_estimate(problem);
  out.marginals = bp_marginals(problem);
  for (std::size_t x = 0; x < out.map.size(); ++x) out.flips += out.map[x] != problem.sigma[x] ? 1 : 0;
  return out;
}

AnomalyReport anomaly_scores(const std::vector<Spin>& hidden, const std::vector<Spin>& sigma,
                             const TreeShape& shape) {
  if (hidden.size() != shape.size() || sigma.size() != shape.size()) {
    throw validation_error("both layers must assign every vertex of V_n");
  }
  AnomalyReport out;
  out.scores.reserve(shape.size() - 1);
  for (const auto& [p, c] : shape.edge_indices()) {
    const double s = value(hidden[p]) * value(hidden[c]) - value(sigma[p]) * value(sigma[c]);
    out.scores.push_back(s);
    out.total += s;
  }
  return out;
}

}  // namespace cayley
