#pragma once

// Translation-invariant boundary laws: positive fixed points (u, v, w) of
//
//   u = a ((theta + u + v + w/theta) / D)^k
//   v = b ((1/theta + u + v + theta w) / D)^k
//   w = c ((1 + u/theta + theta v + w) / D)^k,     D = 1 + theta u + v/theta + w,
//
// where u = a z(-1,+1), v = b z(+1,-1), w = c z(+1,+1).

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cayley/model.hpp"

namespace cayley {

struct FixedPoint3 {
  double u = 1.0;
  double v = 1.0;
  double w = 1.0;
  double residual = 0.0;  // max absolute defect of the three equations
};

// Membership flags. I1 = {u=1, v=w}, I2 = {v=1, u=w}, I3 = {u=v, w=1} are the
// invariant sets of the unit-emission map; symmetric_diagonal is {u=v, w=1}
// when the emission is symmetric but not unit.
enum class SetLabel : std::uint8_t {
  none = 0,
  I1 = 1,
  I2 = 2,
  I3 = 4,
  symmetric_diagonal = 8,
  off_set = 16,
};

constexpr SetLabel operator|(SetLabel a, SetLabel b) {
  return static_cast<SetLabel>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}
constexpr bool has(SetLabel flags, SetLabel f) {
  return (static_cast<std::uint8_t>(flags) & static_cast<std::uint8_t>(f)) != 0;
}
std::string to_string(SetLabel flags);  // e.g. "I1+I2+I3"

struct SolutionSet {
  std::vector<FixedPoint3> points;  // sorted lexicographically by (u, v, w)
  std::vector<SetLabel> labels;

  std::size_t count() const { return points.size(); }
};

struct ScalarEqParams {
  int k = 2;
  double gamma = 1.0;
};

// Theta = 2 / (theta + 1/theta); equals 1 only at theta = 1.
double symmetric_coupling(double theta);

// Image of `point` under the recursion. The returned residual is the defect
// max|F(p) - p| of the input point.
FixedPoint3 fixed_point_map(const FixedPoint3& point, const DerivedParams& derived);
double fixed_point_residual(const FixedPoint3& point, const DerivedParams& derived);

// All positive roots of x = ((1 + gamma x) / (gamma + x))^k, ascending. Always
// contains 1; three roots exactly when k >= 2 and gamma > (k+1)/(k-1).
std::vector<double> solve_scalar(const ScalarEqParams& params);

// The two nontrivial I1 roots for k = 2, theta >= 3 (v1 <= v2, product 1).
std::pair<double, double> closed_form_k2(double theta);

// Fixed points on I1, I2, I3 for unit emission.
SolutionSet solve_invariant_sets(int k, double theta);
SolutionSet solve_invariant_sets(const DerivedParams& derived);  // requires a = b = c = 1

struct PhaseRegion {
  int count_lower_bound = 1;
  double theta_c_high = 0.0;  // (k+1)/(k-1)
  double theta_c_low = 0.0;   // (k-1)/(k+1)
};

// Lower bound on the number of translation-invariant measures (k >= 2).
PhaseRegion classify_tigm_count(int k, double theta);

// k = 1, a = b, c = 1: the unique positive solution (u1, u1, 1).
FixedPoint3 solve_k1_symmetric(double theta, double a);

// a = b, c = 1: the unique root of u = a ((1 + Theta u)/(Theta + u))^k on u = v, w = 1.
FixedPoint3 solve_symmetric_diagonal(int k, double theta, double a);

struct NewtonResult {
  FixedPoint3 point;
  int iterations = 0;
  bool converged = false;
};

// Damped Newton on F(p) - p, halving steps until the iterate stays positive
// and the residual decreases.
NewtonResult newton_refine(const FixedPoint3& seed, const DerivedParams& derived,
                           int max_iterations = 200);

struct MultistartConfig {
  std::vector<double> grid{1e-2, 1e-1, 1.0, 1e1, 1e2};  // per-axis start values
  std::vector<FixedPoint3> extra_seeds;
  int max_iterations = 200;
  double accept_residual = 1e-9;
  double dedup_tolerance = 1e-6;  // max relative component difference
};

SolutionSet solve_full_3d(const DerivedParams& derived, const MultistartConfig& config = {});

// Membership flags of a point, relative tolerance `tol`.
SetLabel classify_point(const FixedPoint3& point, const DerivedParams& derived, double tol = 1e-7);

// For a = b, c = 1 solutions: (u == v) iff (w == 1), both at absolute tolerance 1e-7.
bool diagonal_lemma_holds(const FixedPoint3& point, const DerivedParams& derived);

// Max relative component difference between two points.
double relative_distance(const FixedPoint3& p, const FixedPoint3& q);

// Published numerical reference rows (k, theta, a=b, c=1, x, y, z).
struct ReferenceRow {
  int k;
  double theta;
  double a;
  double x, y, z;
};

std::span<const ReferenceRow> reference_rows();

struct ReferenceRowCheck {
  ReferenceRow row;
  double residual_raw;            // (u,v,w) = (x,y,z) in the system above
  double residual_powered;        // (u,v,w) = (x^k, y^k, z^k)
  double residual_squared_theta;  // x = a (theta'+x^k+y^k+z^k/theta')/D', theta' = theta^2
  SetLabel label;                 // membership of the raw reading
};

std::vector<ReferenceRowCheck> check_reference_rows();

}  // namespace cayley
