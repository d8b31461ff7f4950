#pragma once

// Posterior inference of the hidden layer given the full observed layer:
//
//   P(s | sigma) ~ prod_edges theta^{(1 + s(x)s(y))/2} prod_{x in V_n} E(sigma(x)|s(x))
//                  prod_{x in W_n} z(s(x), sigma(x)).

#include <array>
#include <vector>

#include "cayley/measure.hpp"
#include "cayley/model.hpp"
#include "cayley/tree.hpp"

namespace cayley {

struct InferenceProblem {
  TreeShape shape;
  DerivedParams derived;
  BoundaryLaw law;
  std::vector<Spin> sigma;  // observed layer, flat vertex order

  void validate() const;
};

// Per-vertex P(s(x) = -1), P(s(x) = +1).
using MarginalTable = std::vector<std::array<double, 2>>;

// Full posterior over hidden layers; entry index sum_i bit(s_i) 2^i.
struct Posterior {
  std::vector<double> table;
  double log_z;

  std::vector<Spin> hidden_of(std::size_t index, std::size_t vertices) const;
  MarginalTable marginals(std::size_t vertices) const;
};

Posterior exact_posterior(const InferenceProblem& problem);
MarginalTable bp_marginals(const InferenceProblem& problem);

// Max-product with back-pointers. Ties go to s = +1, decided top-down in flat
// vertex order, which yields the lexicographically largest maximizer.
std::vector<Spin> map_estimate(const InferenceProblem& problem);

// Unnormalized log-posterior of a hidden layer.
double log_score(const InferenceProblem& problem, const std::vector<Spin>& hidden);

struct DenoiseResult {
  std::vector<Spin> map;
  MarginalTable marginals;
  std::size_t flips = 0;  // vertices where map differs from sigma
};

DenoiseResult denoise(const InferenceProblem& problem);

struct AnomalyReport {
  std::vector<double> scores;  // s(x)s(y) - sigma(x)sigma(y), edges ordered by child index
  double total = 0.0;
};

AnomalyReport anomaly_scores(const std::vector<Spin>& hidden, const std::vector<Spin>& sigma,
                             const TreeShape& shape);

}  // namespace cayley
