#include "cayley/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cayley/errors.hpp"
#include "cayley/inference.hpp"
#include "cayley/io.hpp"
#include "cayley/measure.hpp"
#include "cayley/parallel.hpp"
#include "cayley/solver.hpp"
#include "cayley/verify.hpp"

namespace cayley {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  std::string_view sv(text);
  if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), x);
  if (ec != std::errc{} || ptr != sv.data() + sv.size() || sv.empty() || !std::isfinite(x)) {
    throw validation_error("malformed number '" + text + "' in " + what);
  }
  return x;
}

std::vector<double> parse_list(const std::string& text, std::size_t n, const std::string& what) {
  const auto parts = split(text, ',');
  if (parts.size() != n) throw validation_error(what + " needs " + std::to_string(n) + " comma-separated values");
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse_number(p, what));
  return out;
}

Spin parse_spin(const std::string& text) {
  if (text == "+1" || text == "1") return Spin::up;
  if (text == "-1") return Spin::down;
  throw validation_error("spin '" + text + "' must be +1 or -1");
}

struct ModelFlags {
  std::string config;
  int k = 2;
  double theta = 1.0, a = 1.0, b = 1.0, c = 1.0, J = 0.0, beta = 1.0;
  std::string emission;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* sub) {
    opts["config"] = sub->add_option("--config", config, "JSON file with model parameters");
    opts["k"] = sub->add_option("--k", k, "branching factor (k >= 1)");
    opts["theta"] = sub->add_option("--theta", theta, "theta = exp(2 J beta)");
    opts["a"] = sub->add_option("--a", a, "emission ratio E(-1,+1)");
    opts["b"] = sub->add_option("--b", b, "emission ratio E(+1,-1)");
    opts["c"] = sub->add_option("--c", c, "emission ratio E(+1,+1)");
    opts["J"] = sub->add_option("--J", J, "coupling");
    opts["beta"] = sub->add_option("--beta", beta, "inverse temperature");
    opts["emission"] = sub->add_option("--emission", emission,
                                       "log-likelihoods for (hidden,observed) = (-1,-1),(-1,+1),(+1,-1),(+1,+1)");
  }

  bool given(const std::string& name) const { return opts.at(name)->count() > 0; }

  DerivedParams resolve() const {
    Json j = given("config") ? read_json_file(config) : Json::object();
    if (given("k")) j["k"] = k;
    for (const auto& [name, val] : {std::pair{"theta", theta}, std::pair{"a", a}, std::pair{"b", b},
                                    std::pair{"c", c}, std::pair{"J", J}, std::pair{"beta", beta}}) {
      if (given(name)) j[name] = val;
    }
    if (given("emission")) {
      const auto v = parse_list(emission, 4, "--emission");
      Json e = Json::object();
      for (std::size_t s = 0; s < kBilayerStates; ++s) e[state_key(s)] = v[s];
      j["emission"] = e;
    }
    if (!j.contains("k")) j["k"] = k;
    return parse_model(j);
  }
};

struct Pointed {
  std::string point;
  CLI::Option* opt = nullptr;

  void attach(CLI::App* sub) {
    opt = sub->add_option("--point", point, "fixed point u,v,w (default: first solve_full_3d solution)");
  }

  FixedPoint3 resolve(const DerivedParams& d) const {
    if (opt->count() > 0) {
      const auto v = parse_list(point, 3, "--point");
      FixedPoint3 p{v[0], v[1], v[2]};
      p.residual = fixed_point_residual(p, d);
      return p;
    }
    const auto sols = solve_full_3d(d);
    if (sols.count() == 0) throw precondition_error("no fixed point found; pass --point");
    return sols.points.front();
  }
};

void warn_if_not_fixed(const FixedPoint3& p, std::ostream& err) {
  if (!(p.residual < 1e-9)) {
    err << "warning: point residual " << p.residual << " is not a fixed point; measures are not compatible\n";
  }
}

void emit(const Json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw validation_error("cannot write '" + path + "'");
  f << j.dump(2) << '\n';
}

}  // namespace

std::vector<double> parse_theta_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw validation_error("theta grid must be start:stop:step");
  const double start = parse_number(parts[0], "theta grid");
  const double stop = parse_number(parts[1], "theta grid");
  const double step = parse_number(parts[2], "theta grid");
  if (!(start > 0.0) || !(stop >= start) || !(step > 0.0)) {
    throw validation_error("theta grid needs 0 < start <= stop and step > 0");
  }
  const double count = std::floor((stop - start) / step + 1e-9) + 1.0;
  if (count > 1e7) throw validation_error("theta grid has too many points");
  std::vector<double> out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Translation-invariant Gibbs measures of the bilayer Ising model on a Cayley tree"};
  app.name("cayley");
  app.require_subcommand(1, 1);

  // solve
  auto* solve = app.add_subcommand("solve", "fixed points of the boundary-law recursion");
  ModelFlags solve_model;
  solve_model.attach(solve);
  std::string method = "full";
  solve->add_option("--method", method, "full | invariant | diagonal | k1")
      ->check(CLI::IsMember({"full", "invariant", "diagonal", "k1"}));

  // classify
  auto* classify = app.add_subcommand("classify", "lower bound on the number of measures (unit emission)");
  int classify_k = 2;
  double classify_theta = 1.0;
  classify->add_option("--k", classify_k, "branching factor")->required();
  classify->add_option("--theta", classify_theta, "theta = exp(2 J beta)")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "edge-conditional curves over a theta grid (CSV)");
  std::string family, grid, variant = "derived", sweep_out;
  int sweep_k = 2;
  double sweep_a = 0.3;
  sweep->add_option("--family", family, "fig1 (unit emission) | fig2 (k = 1, a = b)")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2"}));
  auto* sweep_k_opt = sweep->add_option("--k", sweep_k, "branching factor");
  sweep->add_option("--theta", grid, "start:stop:step")->required();
  sweep->add_option("--a", sweep_a, "emission ratio a = b (fig2)");
  sweep->add_option("--variant", variant, "fig2 formula: derived | printed")
      ->check(CLI::IsMember({"derived", "printed"}));
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

  // conditional
  auto* conditional = app.add_subcommand("conditional", "hidden-pair law on one edge given its observed pair");
  ModelFlags cond_model;
  cond_model.attach(conditional);
  Pointed cond_point;
  cond_point.attach(conditional);
  std::string cond_sigma, cond_variant = "derived";
  conditional->add_option("--sigma", cond_sigma, "observed pair, e.g. +1,-1")->required();
  conditional->add_option("--variant", cond_variant, "derived | printed (k = 1 only)")
      ->check(CLI::IsMember({"derived", "printed"}));

  // bp / sample / demo-denoise share tree flags
  auto tree_flags = [](CLI::App* sub, int& depth, std::string& mode) {
    sub->add_option("--depth", depth, "radius n of the ball V_n")->check(CLI::NonNegativeNumber);
    sub->add_option("--root-mode", mode, "full (root has k+1 successors) | reduced")
        ->check(CLI::IsMember({"full", "reduced"}));
  };

  auto* bp = app.add_subcommand("bp", "posterior marginals and MAP of the hidden layer");
  ModelFlags bp_model;
  bp_model.attach(bp);
  Pointed bp_point;
  bp_point.attach(bp);
  int bp_depth = 1;
  std::string bp_mode = "full", bp_sigma_file, bp_sigma_json;
  tree_flags(bp, bp_depth, bp_mode);
  auto* sigma_group = bp->add_option_group("sigma");
  sigma_group->add_option("--sigma-file", bp_sigma_file, "JSON file: {path: spin} or flat array");
  sigma_group->add_option("--sigma", bp_sigma_json, "inline JSON layer");
  sigma_group->require_option(1);

  auto* sample_cmd = app.add_subcommand("sample", "forward-sample a bilayer configuration");
  ModelFlags sample_model;
  sample_model.attach(sample_cmd);
  Pointed sample_point;
  sample_point.attach(sample_cmd);
  int sample_depth = 2;
  std::string sample_mode = "full", sample_out;
  std::uint64_t sample_seed = 0;
  tree_flags(sample_cmd, sample_depth, sample_mode);
  sample_cmd->add_option("--seed", sample_seed, "RNG seed")->required();
  sample_cmd->add_option("--out", sample_out, "JSON path (default stdout)");

  auto* verify = app.add_subcommand("verify", "run the self-check suite and write a JSON report");
  VerifyOptions vopt;
  std::string verify_out;
  verify->add_option("--seed", vopt.seed, "RNG seed for sampled checks");
  verify->add_option("--samples", vopt.samples, "forward samples for the sampler check");
  verify->add_option("--out", verify_out, "report path (default stdout)");

  auto* demo = app.add_subcommand("demo-denoise", "sample (s, sigma), then recover s from sigma");
  ModelFlags demo_model;
  demo_model.attach(demo);
  Pointed demo_point;
  demo_point.attach(demo);
  int demo_depth = 2;
  std::string demo_mode = "full";
  std::uint64_t demo_seed = 0;
  tree_flags(demo, demo_depth, demo_mode);
  demo->add_option("--seed", demo_seed, "RNG seed")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      const DerivedParams d = solve_model.resolve();
      SolutionSet s;
      if (method == "full") {
        s = solve_full_3d(d);
      } else if (method == "invariant") {
        s = solve_invariant_sets(d);
      } else {
        if (!d.symmetric_emission()) throw precondition_error("--method " + method + " needs a = b and c = 1");
        if (method == "k1" && d.k != 1) throw precondition_error("--method k1 needs k = 1");
        const FixedPoint3 p = method == "k1" ? solve_k1_symmetric(d.theta, d.a)
                                             : solve_symmetric_diagonal(d.k, d.theta, d.a);
        s.points = {p};
        s.labels = {classify_point(p, d)};
      }
      out << Json{{"params", to_json(d)}, {"method", method}, {"result", to_json(s)}}.dump(2) << '\n';
    } else if (classify->parsed()) {
      out << to_json(classify_tigm_count(classify_k, classify_theta)).dump(2) << '\n';
    } else if (sweep->parsed()) {
      const auto thetas = parse_theta_grid(grid);
      std::ostringstream csv;
      if (family == "fig1") {
        std::vector<Fig1Row> rows(thetas.size());
        parallel_for(thetas.size(), [&](std::size_t i) { rows[i] = curve_fig1({thetas[i]}, sweep_k).front(); });
        write_csv(csv, rows);
      } else {
        if (sweep_k_opt->count() > 0 && sweep_k != 1) throw validation_error("fig2 is defined for k = 1");
        const CurveVariant v = variant == "printed" ? CurveVariant::printed : CurveVariant::derived;
        std::vector<Fig2Row> rows(thetas.size());
        parallel_for(thetas.size(), [&](std::size_t i) { rows[i] = curve_fig2({thetas[i]}, sweep_a, v).front(); });
        write_csv(csv, rows);
      }
      if (sweep_out.empty()) {
        out << csv.str();
      } else {
        std::ofstream f(sweep_out);
        if (!f) throw validation_error("cannot write '" + sweep_out + "'");
        f << csv.str();
      }
    } else if (conditional->parsed()) {
      const DerivedParams d = cond_model.resolve();
      const FixedPoint3 p = cond_point.resolve(d);
      const auto parts = split(cond_sigma, ',');
      if (parts.size() != 2) throw validation_error("--sigma needs two spins, e.g. +1,-1");
      const Spin sx = parse_spin(parts[0]), sy = parse_spin(parts[1]);
      EdgeTable t;
      if (cond_variant == "printed") {
        if (d.k != 1 || !d.symmetric_emission()) throw precondition_error("printed tables need k = 1, a = b, c = 1");
        t = edge_conditional_k1_printed(sx, sy, d.theta, p.u);
      } else {
        t = edge_conditional(sx, sy, d, vertex_weight(p));
      }
      out << Json{{"sigma", spin_text(sx) + "," + spin_text(sy)}, {"point", to_json(p)}, {"table", to_json(t)}}.dump(2)
          << '\n';
    } else if (bp->parsed()) {
      const DerivedParams d = bp_model.resolve();
      const FixedPoint3 p = bp_point.resolve(d);
      warn_if_not_fixed(p, err);
      const TreeShape shape(d.k, bp_depth, parse_root_mode(bp_mode));
      Json layer;
      if (!bp_sigma_file.empty()) {
        layer = read_json_file(bp_sigma_file);
      } else {
        try {
          layer = Json::parse(bp_sigma_json);
        } catch (const Json::parse_error& e) {
          throw validation_error(std::string("--sigma is not valid JSON: ") + e.what());
        }
      }
      const InferenceProblem pr{shape, d, boundary_law(p, d), parse_layer(layer, shape)};
      const DenoiseResult r = denoise(pr);
      const AnomalyReport an = anomaly_scores(r.map, pr.sigma, shape);
      Json scores = Json::object();
      const auto edges = shape.edge_indices();
      for (std::size_t e = 0; e < edges.size(); ++e) {
        scores[shape.vertex(edges[e].first).to_string() + "-" + shape.vertex(edges[e].second).to_string()] =
            an.scores[e];
      }
      out << Json{{"point", to_json(p)},
                  {"marginals", marginals_to_json(r.marginals, shape)},
                  {"map", layer_to_json(r.map, shape)},
                  {"flips", r.flips},
                  {"anomaly", Json{{"scores", scores}, {"total", an.total}}}}
                 .dump(2)
          << '\n';
    } else if (sample_cmd->parsed()) {
      const DerivedParams d = sample_model.resolve();
      const FixedPoint3 p = sample_point.resolve(d);
      warn_if_not_fixed(p, err);
      const RootMode mode = parse_root_mode(sample_mode);
      const TreeShape shape(d.k, sample_depth, mode);
      const auto kernel = markov_kernel(d, boundary_law(p, d), mode);
      const BilayerConfig cfg = sample(kernel, shape, sample_seed);
      Json j = to_json(cfg, shape);
      j["seed"] = sample_seed;
      emit(j, sample_out, out);
    } else if (verify->parsed()) {
      const VerifyReport report = run_verify(vopt);
      emit(report.to_json(), verify_out, out);
      if (!verify_out.empty()) out << (report.pass() ? "verify: pass\n" : "verify: FAIL\n");
      return report.pass() ? 0 : 1;
    } else if (demo->parsed()) {
      const DerivedParams d = demo_model.resolve();
      const FixedPoint3 p = demo_point.resolve(d);
      warn_if_not_fixed(p, err);
      const RootMode mode = parse_root_mode(demo_mode);
      const TreeShape shape(d.k, demo_depth, mode);
      const BoundaryLaw law = boundary_law(p, d);
      const BilayerConfig truth = sample(markov_kernel(d, law, mode), shape, demo_seed);
      const DenoiseResult r = denoise(InferenceProblem{shape, d, law, truth.observed});
      std::size_t map_errors = 0, observed_errors = 0;
      for (std::size_t x = 0; x < shape.size(); ++x) {
        map_errors += r.map[x] != truth.hidden[x] ? 1 : 0;
        observed_errors += truth.observed[x] != truth.hidden[x] ? 1 : 0;
      }
      out << Json{{"point", to_json(p)},
                  {"seed", demo_seed},
                  {"vertices", shape.size()},
                  {"hidden", layer_to_json(truth.hidden, shape)},
                  {"observed", layer_to_json(truth.observed, shape)},
                  {"map", layer_to_json(r.map, shape)},
                  {"flips", r.flips},
                  {"map_errors", map_errors},
                  {"observed_errors", observed_errors}}
                 .dump(2)
          << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace cayley
