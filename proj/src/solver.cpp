#include "cayley/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "cayley/errors.hpp"
#include "cayley/parallel.hpp"
#include "cayley/simd/ops.hpp"

namespace cayley {

std::string to_string(SetLabel flags) {
  std::string out;
  auto add = [&](SetLabel f, const char* name) {
    if (!has(flags, f)) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(SetLabel::I1, "I1");
  add(SetLabel::I2, "I2");
  add(SetLabel::I3, "I3");
  add(SetLabel::symmetric_diagonal, "diagonal");
  add(SetLabel::off_set, "off_set");
  return out.empty() ? "none" : out;
}

double symmetric_coupling(double theta) {
  if (!(theta > 0.0)) throw validation_error("theta must be positive");
  return 2.0 / (theta + 1.0 / theta);
}

namespace {

struct Ratios {
  double d;
  std::array<double, 3> n;
};

Ratios ratios(const FixedPoint3& p, double theta) {
  const double ti = 1.0 / theta;
  return Ratios{1.0 + theta * p.u + ti * p.v + p.w,
                {theta + p.u + p.v + ti * p.w, ti + p.u + p.v + theta * p.w,
                 1.0 + ti * p.u + theta * p.v + p.w}};
}

std::array<double, 3> image(const FixedPoint3& p, const DerivedParams& d) {
  const Ratios r = ratios(p, d.theta);
  const std::array<double, 3> coef{d.a, d.b, d.c};
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = coef[i] * std::pow(r.n[i] / r.d, d.k);
  return out;
}

double defect(const FixedPoint3& p, const std::array<double, 3>& img) {
  return std::max({std::abs(img[0] - p.u), std::abs(img[1] - p.v), std::abs(img[2] - p.w)});
}

bool positive(const FixedPoint3& p) {
  return p.u > 0.0 && p.v > 0.0 && p.w > 0.0 && std::isfinite(p.u) && std::isfinite(p.v) &&
         std::isfinite(p.w);
}

void require_positive(const FixedPoint3& p) {
  if (!positive(p)) throw validation_error("fixed-point components must be positive and finite");
}

double rel(double x, double y) { return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)}); }

// Gaussian elimination with partial pivoting; false when singular.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs, std::array<double, 3>& x) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    if (!(std::abs(m[piv][col]) > 1e-300)) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = rhs[r];
    for (int c = r + 1; c < 3; ++c) s -= m[r][c] * x[c];
    x[r] = s / m[r][r];
  }
  return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
}

double horner(const std::vector<double>& coeffs, double t) {
  double acc = 0.0;
  for (double c : coeffs) acc = acc * t + c;
  return acc;
}

void sort_and_dedup(std::vector<FixedPoint3>& pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const FixedPoint3& p, const FixedPoint3& q) {
    if (p.u != q.u) return p.u < q.u;
    if (p.v != q.v) return p.v < q.v;
    return p.w < q.w;
  });
  std::vector<FixedPoint3> out;
  for (const auto& p : pts) {
    auto same = std::find_if(out.begin(), out.end(),
                             [&](const FixedPoint3& q) { return relative_distance(p, q) < tol; });
    if (same == out.end()) {
      out.push_back(p);
    } else if (p.residual < same->residual) {
      *same = p;
    }
  }
  pts = std::move(out);
}

SolutionSet labelled(std::vector<FixedPoint3> pts, const DerivedParams& d) {
  SolutionSet out;
  out.points = std::move(pts);
  for (const auto& p : out.points) out.labels.push_back(classify_point(p, d));
  return out;
}

}  // namespace

FixedPoint3 fixed_point_map(const FixedPoint3& point, const DerivedParams& derived) {
  require_positive(point);
  const auto img = image(point, derived);
  return FixedPoint3{img[0], img[1], img[2], defect(point, img)};
}

double fixed_point_residual(const FixedPoint3& point, const DerivedParams& derived) {
  require_positive(point);
  return defect(point, image(point, derived));
}

double relative_distance(const FixedPoint3& p, const FixedPoint3& q) {
  return std::max({rel(p.u, q.u), rel(p.v, q.v), rel(p.w, q.w)});
}

std::vector<double> solve_scalar(const ScalarEqParams& params) {
  const int k = params.k;
  const double gamma = params.gamma;
  if (k < 1) throw validation_error("k must be >= 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw validation_error("gamma must be positive");

  std::vector<double> roots{1.0};
  if (k >= 2) {
    // q(t) = t^k + (1-gamma)(t^{k-1} + ... + t) + 1, the cofactor of (t - 1).
    std::vector<double> q(static_cast<std::size_t>(k) + 1, 1.0 - gamma);
    q.front() = 1.0;
    q.back() = 1.0;

    constexpr int kHalf = 256;
    const double lo = 0.5 / (1.0 + gamma);
    const double hi = 2.0 * (1.0 + gamma);
    std::vector<double> t(2 * kHalf + 1);
    for (int i = 0; i <= kHalf; ++i) {
      const double s = static_cast<double>(i) / kHalf;
      t[i] = std::exp(std::log(lo) * (1.0 - s));
      t[2 * kHalf - i] = std::exp(std::log(hi) * (1.0 - s));
    }
    t[kHalf] = 1.0;
    std::vector<double> qv(t.size());
    simd::polyval(q, t, qv);

    std::vector<double> troots;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (qv[i] == 0.0) {
        troots.push_back(t[i]);
        continue;
      }
      if (i + 1 == t.size() || qv[i + 1] == 0.0 || (qv[i] > 0.0) == (qv[i + 1] > 0.0)) continue;
      double a = t[i], b = t[i + 1];
      const bool a_positive = qv[i] > 0.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        ((horner(q, mid) > 0.0) == a_positive ? a : b) = mid;
      }
      troots.push_back(0.5 * (a + b));
    }
    for (double r : troots) roots.push_back(std::pow(r, k));
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || rel(out.back(), r) > 1e-9) out.push_back(r);
  }
  return out;
}

std::pair<double, double> closed_form_k2(double theta) {
  if (!(theta >= 3.0)) throw precondition_error("closed form needs theta >= 3");
  const double base = theta * theta - 2.0 * theta - 1.0;
  const double disc = (theta - 1.0) * std::sqrt((theta + 1.0) * (theta - 3.0));
  const double v2 = 0.5 * (base + disc);
  return {1.0 / v2, v2};  // v1 v2 = 1; avoids cancellation in base - disc
}

SolutionSet solve_invariant_sets(int k, double theta) {
  const DerivedParams d = DerivedParams::transfer(k, theta);
  std::vector<FixedPoint3> pts;
  for (double x : solve_scalar({k, theta})) pts.push_back({1.0, x, x});
  for (double x : solve_scalar({k, 1.0 / theta})) pts.push_back({x, 1.0, x});
  for (double x : solve_scalar({k, symmetric_coupling(theta)})) pts.push_back({x, x, 1.0});
  for (auto& p : pts) p.residual = fixed_point_residual(p, d);
  sort_and_dedup(pts, 1e-9);
  return labelled(std::move(pts), d);
}

SolutionSet solve_invariant_sets(const DerivedParams& derived) {
  derived.validate();
  if (!derived.unit_emission()) throw precondition_error("invariant-set reduction needs a = b = c = 1");
  return solve_invariant_sets(derived.k, derived.theta);
}

PhaseRegion classify_tigm_count(int k, double theta) {
  if (k < 2) throw precondition_error("the phase classification needs k >= 2");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw validation_error("theta must be positive");
  PhaseRegion r;
  r.theta_c_high = static_cast<double>(k + 1) / (k - 1);
  r.theta_c_low = static_cast<double>(k - 1) / (k + 1);
  r.count_lower_bound = (theta <= r.theta_c_low || theta >= r.theta_c_high) ? 3 : 1;
  return r;
}

FixedPoint3 solve_k1_symmetric(double theta, double a) {
  const DerivedParams d = DerivedParams::transfer(1, theta, a, a, 1.0);
  const double B = (a - 1.0) * symmetric_coupling(theta);
  const double root = std::sqrt(B * B + 4.0 * a);
  // Larger root of u^2 - B u - a = 0; second form when B < 0 avoids cancellation.
  const double u = B >= 0.0 ? 0.5 * (B + root) : 2.0 * a / (root - B);
  FixedPoint3 p{u, u, 1.0};
  p.residual = fixed_point_residual(p, d);
  return p;
}

FixedPoint3 solve_symmetric_diagonal(int k, double theta, double a) {
  const DerivedParams d = DerivedParams::transfer(k, theta, a, a, 1.0);
  const double T = symmetric_coupling(theta);
  // g is increasing; the root lies in [a T^k, a T^-k].
  auto g = [&](double u) { return u - a * std::pow((1.0 + T * u) / (T + u), k); };
  double lo = a * std::pow(T, k);
  double hi = a * std::pow(T, -k);
  double u = lo;
  if (g(lo) < 0.0 && g(hi) > 0.0) {
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    u = std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
  } else if (g(hi) <= 0.0) {
    u = hi;
  }
  FixedPoint3 p{u, u, 1.0};
  p.residual = fixed_point_residual(p, d);
  return p;
}

NewtonResult newton_refine(const FixedPoint3& seed, const DerivedParams& derived, int max_iterations) {
  derived.validate();
  require_positive(seed);
  NewtonResult out;
  FixedPoint3 p = seed;
  auto img = image(p, derived);
  double r = defect(p, img);

  const double ti = 1.0 / derived.theta;
  const double th = derived.theta;
  // dN_i/dp_j and dD/dp_j are constant.
  const std::array<std::array<double, 3>, 3> dN{{{1.0, 1.0, ti}, {1.0, 1.0, th}, {ti, th, 1.0}}};
  const std::array<double, 3> dD{th, ti, 1.0};

  int it = 0;
  for (; it < max_iterations; ++it) {
    if (r == 0.0) break;
    const Ratios rr = ratios(p, th);
    std::array<std::array<double, 3>, 3> jac{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        jac[i][j] = img[i] * derived.k * (dN[i][j] / rr.n[i] - dD[j] / rr.d) - (i == j ? 1.0 : 0.0);
      }
    }
    const std::array<double, 3> rhs{p.u - img[0], p.v - img[1], p.w - img[2]};
    std::array<double, 3> step{};
    if (!solve3(jac, rhs, step)) break;

    bool accepted = false;
    double lambda = 1.0;
    for (int h = 0; h < 60; ++h, lambda *= 0.5) {
      FixedPoint3 q{p.u + lambda * step[0], p.v + lambda * step[1], p.w + lambda * step[2]};
      if (!positive(q)) continue;
      const auto qimg = image(q, derived);
      const double qr = defect(q, qimg);
      if (qr < r) {
        p = q;
        img = qimg;
        r = qr;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  p.residual = r;
  out.point = p;
  out.iterations = it;
  out.converged = std::isfinite(r) && r < 1e-9;
  return out;
}

SetLabel classify_point(const FixedPoint3& p, const DerivedParams& d, double tol) {
  SetLabel flags = SetLabel::none;
  if (d.unit_emission()) {
    if (rel(p.u, 1.0) <= tol && rel(p.v, p.w) <= tol) flags = flags | SetLabel::I1;
    if (rel(p.v, 1.0) <= tol && rel(p.u, p.w) <= tol) flags = flags | SetLabel::I2;
    if (rel(p.w, 1.0) <= tol && rel(p.u, p.v) <= tol) flags = flags | SetLabel::I3;
  } else if (rel(p.w, 1.0) <= tol && rel(p.u, p.v) <= tol) {
    flags = SetLabel::symmetric_diagonal;
  }
  return flags == SetLabel::none ? SetLabel::off_set : flags;
}

namespace {

// Near a degenerate root Newton stalls a little off the invariant line with a
// tiny residual; replace such points by the exact restricted root.
FixedPoint3 snap(const FixedPoint3& p, const DerivedParams& d) {
  constexpr double kNear = 1e-3;
  constexpr double kSnappedResidual = 1e-12;
  std::vector<FixedPoint3> candidates;
  if (d.unit_emission()) {
    if (rel(p.u, 1.0) < kNear && rel(p.v, p.w) < kNear) {
      for (double x : solve_scalar({d.k, d.theta})) candidates.push_back({1.0, x, x});
    }
    if (rel(p.v, 1.0) < kNear && rel(p.u, p.w) < kNear) {
      for (double x : solve_scalar({d.k, 1.0 / d.theta})) candidates.push_back({x, 1.0, x});
    }
    if (rel(p.w, 1.0) < kNear && rel(p.u, p.v) < kNear) candidates.push_back({1.0, 1.0, 1.0});
  } else if (d.symmetric_emission() && rel(p.w, 1.0) < kNear && rel(p.u, p.v) < kNear) {
    candidates.push_back(solve_symmetric_diagonal(d.k, d.theta, d.a));
  }
  FixedPoint3 best = p;
  double best_dist = kNear;
  for (auto& c : candidates) {
    c.residual = fixed_point_residual(c, d);
    const double dist = relative_distance(c, p);
    if (dist < best_dist && c.residual < kSnappedResidual) {
      best = c;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace

SolutionSet solve_full_3d(const DerivedParams& derived, const MultistartConfig& config) {
  derived.validate();
  std::vector<FixedPoint3> seeds;
  for (double u : config.grid) {
    for (double v : config.grid) {
      for (double w : config.grid) seeds.push_back({u, v, w});
    }
  }
  if (derived.unit_emission()) {
    for (const auto& p : solve_invariant_sets(derived.k, derived.theta).points) seeds.push_back(p);
  }
  if (derived.symmetric_emission()) {
    seeds.push_back(solve_symmetric_diagonal(derived.k, derived.theta, derived.a));
  }
  seeds.insert(seeds.end(), config.extra_seeds.begin(), config.extra_seeds.end());
  std::erase_if(seeds, [](const FixedPoint3& p) { return !positive(p); });

  std::vector<NewtonResult> results(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    results[i] = newton_refine(seeds[i], derived, config.max_iterations);
  });

  std::vector<FixedPoint3> pts;
  for (const auto& r : results) {
    if (!r.converged) continue;
    FixedPoint3 p = snap(r.point, derived);
    if (p.residual < config.accept_residual) pts.push_back(p);
  }
  sort_and_dedup(pts, config.dedup_tolerance);
  return labelled(std::move(pts), derived);
}

bool diagonal_lemma_holds(const FixedPoint3& point, const DerivedParams& derived) {
  derived.validate();
  if (!derived.symmetric_emission()) throw precondition_error("lemma applies only when a = b and c = 1");
  if (!(fixed_point_residual(point, derived) < 1e-9)) {
    throw precondition_error("point is not a fixed point (residual >= 1e-9)");
  }
  constexpr double tol = 1e-7;
  return (std::abs(point.u - point.v) < tol) == (std::abs(point.w - 1.0) < tol);
}

namespace {

constexpr ReferenceRow kReferenceRows[] = {
    {2, 0.1, 2.0, 1.268048128, 1.268048128, 1.0},
    {2, 0.1, 2.0, 0.2005870619, 1.263964993, 0.6570348177},
    {2, 0.1, 2.0, 192.3741268, 3.052913735, 152.1989357},
    {2, 0.1, 0.5, 0.7886136007, 0.7886136007, 1.0},
    {2, 0.1, 0.5, 0.005198204231, 0.7911611517, 0.1586966909},
    {2, 0.1, 0.5, 49.85366406, 0.3275559308, 63.01328616},
    {2, 0.1, 1.0, 1.0, 1.0, 1.0},
    {2, 0.1, 1.0, 0.1010204092, 1.0, 0.1010204092},
    {2, 0.1, 1.0, 98.98989796, 1.0, 98.98989796},
    {2, 1.3, 1.0, 1.0, 1.0, 1.0},
    {2, 1.3, 0.5, 0.5376526550, 0.5376526550, 1.0},
};

// x = a (t + X + Y + Z/t)/D, y = a (1/t + X + Y + t Z)/D, z = (1 + X/t + t Y + Z)/D with
// X = x^k etc., D = 1 + t X + Y/t + Z.
double root_system_residual(const ReferenceRow& r, double t) {
  const double X = std::pow(r.x, r.k), Y = std::pow(r.y, r.k), Z = std::pow(r.z, r.k);
  const double D = 1.0 + t * X + Y / t + Z;
  const double fx = r.a * (t + X + Y + Z / t) / D;
  const double fy = r.a * (1.0 / t + X + Y + t * Z) / D;
  const double fz = (1.0 + X / t + t * Y + Z) / D;
  return std::max({std::abs(fx - r.x), std::abs(fy - r.y), std::abs(fz - r.z)});
}

}  // namespace

std::span<const ReferenceRow> reference_rows() { return kReferenceRows; }

std::vector<ReferenceRowCheck> check_reference_rows() {
  std::vector<ReferenceRowCheck> out;
  for (const auto& row : kReferenceRows) {
    const DerivedParams d = DerivedParams::transfer(row.k, row.theta, row.a, row.a, 1.0);
    const FixedPoint3 raw{row.x, row.y, row.z};
    const FixedPoint3 powered{std::pow(row.x, row.k), std::pow(row.y, row.k), std::pow(row.z, row.k)};
    out.push_back(ReferenceRowCheck{row, fixed_point_residual(raw, d), fixed_point_residual(powered, d),
                                    root_system_residual(row, row.theta * row.theta),
                                    classify_point(raw, d)});
  }
  return out;
}

}  // namespace cayley
