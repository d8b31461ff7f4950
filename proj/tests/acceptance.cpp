// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cayley/cli.hpp"
#include "cayley/inference.hpp"
#include "cayley/measure.hpp"
#include "cayley/solver.hpp"
#include "cayley/verify.hpp"
#include "oracles/oracles.hpp"

using namespace cayley;

namespace {

int failures = 0;

void report(int n, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", n, detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// max |F(p) - p| written out directly from the recursion.
double residual(const FixedPoint3& p, const DerivedParams& d) {
  const double t = d.theta, u = p.u, v = p.v, w = p.w;
  const double D = 1 + t * u + v / t + w;
  const double fu = d.a * std::pow((t + u + v + w / t) / D, d.k);
  const double fv = d.b * std::pow((1 / t + u + v + t * w) / D, d.k);
  const double fw = d.c * std::pow((1 + u / t + t * v + w) / D, d.k);
  return std::max({std::abs(fu - u), std::abs(fv - v), std::abs(fw - w)});
}

std::vector<Spin> random_layer(std::size_t n, std::mt19937_64& rng) {
  std::vector<Spin> out(n);
  for (auto& s : out) s = (rng() & 1) ? Spin::up : Spin::down;
  return out;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string why;
  for (double g : {2.9, 3.0}) {
    if (solve_scalar({2, g}).size() != 1) {
      ok = false;
      why += " count(" + fmt(g) + ")!=1";
    }
  }
  for (double g : {3.1, 4.0, 10.0}) {
    if (solve_scalar({2, g}).size() != 3) {
      ok = false;
      why += " count(" + fmt(g) + ")!=3";
    }
  }
  const auto r4 = solve_scalar({2, 4.0});
  const auto cf = oracle::closed_form_k2(4.0);
  double dev = 0.0;
  if (r4.size() == 3) dev = std::max(std::abs(r4[0] - cf[0]), std::abs(r4[2] - cf[1]));
  if (!(dev <= 1e-10)) ok = false;
  double prod = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double theta = 3.0 + 17.0 * i / 50.0;
    const auto r = solve_scalar({2, theta});
    if (r.size() != 3) {
      ok = false;
      why += " count(theta=" + fmt(theta) + ")";
      continue;
    }
    prod = std::max(prod, std::abs(r[0] * r[2] - 1.0));
  }
  if (!(prod <= 1e-10)) ok = false;
  const double secs = seconds_since(t0);
  if (!(secs < 1.0)) ok = false;
  report(1, ok,
         "k=2 root counts {1,1,3,3,3}, closed-form deviation " + fmt(dev) + ", max |v1 v2 - 1| " + fmt(prod) +
             " over 50 theta, " + fmt(secs) + " s" + why);
}

void criterion2() {
  const double thetas[] = {0.2, 0.5, 2.0, 4.0};
  const std::size_t want[] = {3, 1, 1, 3};
  bool ok = true;
  std::string got;
  for (int i = 0; i < 4; ++i) {
    const auto r = classify_tigm_count(2, thetas[i]);
    const std::size_t solved = solve_full_3d(DerivedParams::transfer(2, thetas[i])).count();
    const std::size_t inv = solve_invariant_sets(2, thetas[i]).count();
    ok = ok && static_cast<std::size_t>(r.count_lower_bound) == want[i] && solved == want[i] && inv == want[i];
    got += std::to_string(r.count_lower_bound) + "/" + std::to_string(solved) + " ";
    ok = ok && r.theta_c_low == 1.0 / 3.0 && r.theta_c_high == 3.0;
  }
  report(2, ok, "classify/solve counts " + got + "(want 3 1 1 3), theta_c = (1/3, 3)");
}

void criterion3() {
  const DerivedParams d = DerivedParams::transfer(1, 2.0, 0.3, 0.3, 1.0);
  const auto s = solve_full_3d(d);
  bool ok = s.count() == 1;
  double u = 0.0, quad = 1.0;
  if (ok) {
    const auto& p = s.points[0];
    u = p.u;
    const double T = 2.0 / (2.0 + 0.5);
    // u^2 + (1 - a) Theta u - a = 0, root from the quadratic formula.
    const double B = 0.7 * T;
    const double exact = 2 * 0.3 / (B + std::sqrt(B * B + 4 * 0.3));
    quad = std::abs(u * u + B * u - 0.3);
    ok = std::abs(p.u - p.v) <= 1e-12 && std::abs(p.w - 1.0) <= 1e-12 && std::abs(u - 0.335142) <= 1e-6 &&
         std::abs(u - exact) <= 1e-8 && quad <= 1e-12;
  }
  report(3, ok,
         std::to_string(s.count()) + " solution(s), u1 = " + fmt(u) + ", quadratic defect " + fmt(quad));
}

void criterion4() {
  const FixedPoint3 p = solve_symmetric_diagonal(2, 1.3, 0.5);
  const double ref = 0.5376526550;
  const double dev = std::abs(p.u - ref);
  const double T = 2.0 / (1.3 + 1.0 / 1.3);
  const double eq = std::abs(p.u - 0.5 * std::pow((1 + T * p.u) / (T + p.u), 2));
  double unit = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double theta = 0.1 * std::pow(100.0, i / 19.0);
    unit = std::max(unit, std::abs(solve_symmetric_diagonal(2, theta, 1.0).u - 1.0));
  }
  const bool ok = dev <= 1e-8 && unit <= 1e-12;
  report(4, ok,
         "diagonal root at (k=2, theta=1.3, a=0.5) = " + fmt(p.u) + " (equation defect " + fmt(eq) +
             "), reference 0.5376526550, deviation " + fmt(dev) + "; a=1 max deviation " + fmt(unit) +
             " over 20 theta");
}

void criterion5() {
  std::vector<std::pair<DerivedParams, FixedPoint3>> pts;
  for (double theta : {0.1, 4.0}) {
    const DerivedParams d = DerivedParams::transfer(2, theta);
    for (const auto& p : solve_full_3d(d).points) pts.emplace_back(d, p);
  }
  const DerivedParams d1 = DerivedParams::transfer(1, 2.0, 0.3, 0.3, 1.0);
  for (const auto& p : solve_full_3d(d1).points) pts.emplace_back(d1, p);

  // Independent check: sum the brute-force n table over the outer generation
  // and compare with the brute-force n-1 table, index by index.
  auto oracle_gap = [](const DerivedParams& d, const BoundaryLaw& law, int n) {
    const TreeShape big(d.k, n), small(d.k, n - 1);
    const auto jb = oracle::joint(big, d, law);
    const auto js = oracle::joint(small, d, law);
    std::vector<double> summed(js.size(), 0.0);
    for (std::size_t i = 0; i < jb.size(); ++i) summed[i % js.size()] += jb[i];
    double m = 0.0;
    for (std::size_t i = 0; i < js.size(); ++i) m = std::max(m, std::abs(summed[i] - js[i]));
    return m;
  };

  double worst = 0.0, worst_oracle = 0.0;
  for (const auto& [d, p] : pts) {
    const BoundaryLaw law = boundary_law(p, d);
    for (int n : {1, 2}) {
      worst = std::max(worst, check_compatibility(TreeShape(d.k, n), d, law));
      worst_oracle = std::max(worst_oracle, oracle_gap(d, law, n));
    }
  }
  const DerivedParams d4 = DerivedParams::transfer(2, 4.0);
  FixedPoint3 bent = solve_full_3d(d4).points[0];
  bent.v *= 1.2;
  const double neg = check_compatibility(TreeShape(2, 2), d4, boundary_law(bent, d4));
  const double neg_oracle = oracle_gap(d4, boundary_law(bent, d4), 2);
  const bool ok = pts.size() == 7 && worst < 1e-10 && worst_oracle < 1e-10 && neg > 1e-3 && neg_oracle > 1e-3;
  report(5, ok,
         std::to_string(pts.size()) + " solutions, max gap " + fmt(worst) + " (brute force " + fmt(worst_oracle) +
             "), perturbed control " + fmt(neg) + " (brute force " + fmt(neg_oracle) + ")");
}

void criterion6() {
  const Spin spins[2] = {Spin::down, Spin::up};
  double mu0 = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double theta = 0.05 * std::pow(400.0, i / 40.0);
    const DerivedParams d = DerivedParams::transfer(2, theta);
    for (Spin sx : spins) {
      for (Spin sy : spins) {
        const EdgeTable t = edge_conditional(sx, sy, d, vertex_weight(FixedPoint3{}));
        for (Spin a : spins) {
          for (Spin b : spins) {
            const double want = std::pow(theta, 0.5 * (1 + value(a) * value(b))) / (2 * (1 + theta));
            mu0 = std::max(mu0, std::abs(t.at(a, b) - want));
          }
        }
      }
    }
  }

  const DerivedParams d4 = DerivedParams::transfer(2, 4.0);
  const auto v = oracle::closed_form_k2(4.0);
  const double closed = 4 * v[0] * v[0] / (4 * v[0] * v[0] + 2 * v[0] + 4);
  const auto inv = solve_invariant_sets(d4);
  const EdgeTable t1 = edge_conditional(Spin::up, Spin::up, d4, vertex_weight(inv.points[0]));
  const double mu1 = std::abs(t1.at(Spin::up, Spin::up) - closed);

  const DerivedParams d3 = DerivedParams::transfer(2, 0.1, 2.0, 2.0, 1.0);
  const std::array<double, 4> W{1.0, 0.0402350, 1.5976066, 0.4316947};
  const EdgeTable t3 = edge_conditional(Spin::up, Spin::up, d3, VertexWeight{W});
  const auto o3 = oracle::edge_table(1, 1, 0.1, W);
  const double printed[4] = {0.347, 0.324, 0.324, 0.005};
  double mu3 = 0.0, mu3_oracle = 0.0;
  for (int i = 0; i < 4; ++i) {
    mu3 = std::max(mu3, std::abs(t3.p[i] - printed[i]));
    mu3_oracle = std::max(mu3_oracle, std::abs(t3.p[i] - o3[i]));
  }
  const EdgeTable mp = edge_conditional(Spin::down, Spin::up, d3, VertexWeight{W});

  const bool ok = mu0 <= 1e-12 && mu1 <= 1e-12 && mu3 <= 0.01 && mu3_oracle <= 1e-12;
  report(6, ok,
         "mu0 max deviation " + fmt(mu0) + ", mu1 deviation " + fmt(mu1) + ", mu3 (+1,+1) = (" + fmt(t3.p[0]) + ", " +
             fmt(t3.p[1]) + ", " + fmt(t3.p[2]) + ", " + fmt(t3.p[3]) + ") max deviation " + fmt(mu3) +
             "; ungated (-1,+1) row = (" + fmt(mp.p[0]) + ", " + fmt(mp.p[1]) + ", " + fmt(mp.p[2]) + ", " +
             fmt(mp.p[3]) + ")");
}

void criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(777);
  double worst = 0.0;
  bool argmax = true;
  std::size_t problems = 0;
  for (int k : {1, 2}) {
    std::vector<std::pair<DerivedParams, FixedPoint3>> settings;
    for (const DerivedParams& d : {DerivedParams::transfer(k, 4.0), DerivedParams::transfer(k, 0.1, 2.0, 2.0, 1.0),
                                   DerivedParams::transfer(k, 2.0, 0.3, 0.3, 1.0)}) {
      for (const auto& p : solve_full_3d(d).points) settings.emplace_back(d, p);
    }
    for (const auto& [d, p] : settings) {
      for (RootMode mode : {RootMode::full, RootMode::reduced}) {
        for (int n = 0; n <= 2; ++n) {
          const TreeShape shape(k, n, mode);
          for (int rep = 0; rep < 20; ++rep) {
            const InferenceProblem pr{shape, d, boundary_law(p, d), random_layer(shape.size(), rng)};
            const auto post = oracle::posterior(shape, d, pr.law, pr.sigma);
            const auto ex = oracle::posterior_marginals(post, shape.size());
            const auto bp = bp_marginals(pr);
            for (std::size_t i = 0; i < shape.size(); ++i) {
              worst = std::max({worst, std::abs(bp[i][0] - ex[i][0]), std::abs(bp[i][1] - ex[i][1])});
            }
            const auto map = map_estimate(pr);
            std::size_t idx = 0;
            for (std::size_t i = 0; i < map.size(); ++i) idx |= bit(map[i]) << i;
            const double best = *std::max_element(post.begin(), post.end());
            if (!(post[idx] >= best * (1 - 1e-12))) argmax = false;
            ++problems;
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  report(7, worst <= 1e-10 && argmax && secs < 30.0,
         std::to_string(problems) + " problems, max marginal deviation " + fmt(worst) + ", MAP attains argmax: " +
             (argmax ? "yes" : "no") + ", " + fmt(secs) + " s");
}

void criterion8() {
  // k = 1, n = 3 chain-like tree in full mode at the unique k = 1 solution.
  const DerivedParams d = DerivedParams::transfer(1, 2.0, 0.3, 0.3, 1.0);
  const FixedPoint3 p = solve_full_3d(d).points.at(0);
  const BoundaryLaw law = boundary_law(p, d);
  const TreeShape shape(1, 3);
  const BilayerKernel K = markov_kernel(d, law);

  const auto joint = oracle::joint(shape, d, law);
  const std::size_t child = 1;  // first successor of the root
  std::array<std::array<double, 4>, 4> pair{};
  std::array<double, 4> root{};
  std::array<std::array<double, 4>, 4> deep_pair{};
  const std::size_t deep_parent = 1, deep_child = shape.first_child(1);
  for (std::size_t idx = 0; idx < joint.size(); ++idx) {
    auto st = [&](std::size_t v) { return (idx >> (2 * v)) & 3; };
    root[st(0)] += joint[idx];
    pair[st(0)][st(child)] += joint[idx];
    deep_pair[st(deep_parent)][st(deep_child)] += joint[idx];
  }
  double tv = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    double rs = 0.0, ds = 0.0;
    for (std::size_t b = 0; b < 4; ++b) {
      rs += pair[a][b];
      ds += deep_pair[a][b];
    }
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t b = 0; b < 4; ++b) {
      t1 += std::abs(K.K[a][b] - pair[a][b] / rs);
      t2 += std::abs(K.K[a][b] - deep_pair[a][b] / ds);
    }
    tv = std::max({tv, 0.5 * t1, 0.5 * t2});
  }

  const int samples = 100000;
  std::mt19937_64 rng(12345);
  std::array<double, 4> root_count{};
  std::array<std::array<double, 4>, 4> pair_count{};
  for (int i = 0; i < samples; ++i) {
    const BilayerConfig c = sample(K, shape, rng);
    const std::size_t a = state_index(c.hidden[0], c.observed[0]);
    const std::size_t b = state_index(c.hidden[child], c.observed[child]);
    root_count[a] += 1;
    pair_count[a][b] += 1;
  }
  double worst_z = 0.0;
  auto z = [&](double count, double prob) {
    const double se = std::sqrt(prob * (1 - prob) / samples);
    return std::abs(count / samples - prob) / se;
  };
  for (std::size_t a = 0; a < 4; ++a) {
    worst_z = std::max(worst_z, z(root_count[a], root[a]));
    for (std::size_t b = 0; b < 4; ++b) worst_z = std::max(worst_z, z(pair_count[a][b], pair[a][b]));
  }
  report(8, tv <= 1e-10 && worst_z <= 3.0,
         "kernel total variation " + fmt(tv) + ", 1e5 samples (seed 12345): max |z| over 20 cells " + fmt(worst_z));
}

void criterion9() {
  double worst = 0.0;
  std::size_t points = 0;
  for (int k : {1, 2, 3}) {
    for (double theta : {0.1, 0.3, 1.0, 1.3, 2.0, 4.0, 10.0}) {
      for (const DerivedParams& d :
           {DerivedParams::transfer(k, theta), DerivedParams::transfer(k, theta, 0.5, 0.5, 1.0),
            DerivedParams::transfer(k, theta, 2.0, 2.0, 1.0), DerivedParams::transfer(k, theta, 0.4, 1.9, 0.7)}) {
        for (const auto& p : solve_full_3d(d).points) {
          worst = std::max({worst, residual(p, d), p.residual});
          ++points;
        }
        if (d.symmetric_emission()) {
          worst = std::max(worst, residual(solve_symmetric_diagonal(k, theta, d.a), d));
          ++points;
        }
      }
    }
  }
  const VerifyReport rep = run_verify(VerifyOptions{});
  std::ostringstream out, err;
  const int code = run_cli({"verify"}, out, err);
  report(9, worst < 1e-9 && rep.pass() && code == 0,
         "max residual " + fmt(worst) + " over " + std::to_string(points) + " points; verify " +
             (rep.pass() ? "pass" : "FAIL") + ", exit " + std::to_string(code));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
