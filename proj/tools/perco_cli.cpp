// Command-line front end: graph generation, single estimators, and named
// experiments driven by JSON configs.

#include <omp.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "perco/experiments.hpp"
#include "perco/exploration.hpp"
#include "perco/generators.hpp"
#include "perco/percolation.hpp"
#include "perco/spectral.hpp"
#include "perco/walks.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2, kCheckFailed = 3 };

struct GraphArgs {
  std::string family = "torus";
  std::vector<int> params;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "generator family")->required();
    app->add_option("--params", params, "generator parameters, comma separated")->required()->delimiter(',');
    app->add_option("--graph-seed", seed, "seed for random generators");
  }
  perco::GeneratorSpec spec() const { return {perco::parse_family(family), params, seed}; }
};

void emit(const nlohmann::json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << j.dump(2) << '\n';
}

void emit_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + out);
  f << text;
}

// Sets named on the command line: "root", "radius:R", or "v1,v2,...".
perco::VertexSet parse_set(const perco::RootedBall& ball, const std::string& text) {
  const int n = ball.graph.vertex_count();
  if (text == "root") return perco::VertexSet(n, std::vector<perco::Vertex>{ball.root});
  if (text.rfind("radius:", 0) == 0) {
    const int r = std::stoi(text.substr(7));
    std::vector<perco::Vertex> members;
    for (perco::Vertex v = 0; v < n; ++v)
      if (ball.dist[v] <= r) members.push_back(v);
    return perco::VertexSet(n, members);
  }
  std::vector<perco::Vertex> members;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) members.push_back(std::stoi(item));
  for (perco::Vertex v : members)
    if (!ball.graph.contains(v)) throw std::invalid_argument("set: vertex " + std::to_string(v) + " out of range");
  return perco::VertexSet(n, members);
}

std::shared_ptr<const perco::RootedBall> need_ball(const perco::Instance& inst) {
  if (!inst.ball) throw std::invalid_argument("this command needs a ball family (tree_ball or free_product_ball)");
  return inst.ball;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bond percolation on regular graphs: generators, estimators and experiments"};
  app.require_subcommand(1);
  int threads = 0;
  std::uint64_t seed = 1;
  long trials = 0;
  std::string out;
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)");

  // gen
  GraphArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate a graph and write its edge list");
  gen_args.attach(gen);
  gen->add_option("--out", out, "edge-list path; a .json metadata sidecar is written next to it");

  GraphArgs girth_args;
  auto* girth_cmd = app.add_subcommand("girth", "shortest cycle length");
  girth_args.attach(girth_cmd);

  GraphArgs spec_args;
  std::string spectral_what = "auto";
  double spectral_tol = 1e-10;
  auto* spectral = app.add_subcommand("spectral", "lambda1 (balls), spectral gap and Cheeger bracket");
  spec_args.attach(spectral);
  spectral->add_option("--what", spectral_what, "lambda1, gap, cheeger or auto")
      ->check(CLI::IsMember({"auto", "lambda1", "gap", "cheeger"}));
  spectral->add_option("--tol", spectral_tol, "power-iteration tolerance");

  GraphArgs escape_args;
  std::string set_text = "root";
  long horizon = 0;
  auto* escape = app.add_subcommand("escape", "escape probability from a set and the lemma check");
  escape_args.attach(escape);
  escape->add_option("--set", set_text, "root, radius:R, or a comma-separated vertex list");
  escape->add_option("--horizon", horizon, "step cap per Monte Carlo walk (0: 50 R)");

  GraphArgs sweep_args;
  std::vector<double> grid;
  double alpha = 0.01;
  auto* sweep = app.add_subcommand("sweep", "giant-component sweep over a p grid (CSV)");
  sweep_args.attach(sweep);
  sweep->add_option("--grid", grid, "sorted p values")->required()->delimiter(',');
  sweep->add_option("--alpha", alpha, "giant threshold fraction");

  GraphArgs pc_args;
  std::string observable = "giant_fraction", rule = "half_of_max";
  double tol = 1e-3;
  auto* pc = app.add_subcommand("pc", "bisection estimate of the critical probability (JSON)");
  pc_args.attach(pc);
  pc->add_option("--observable", observable, "root_survival, giant_fraction or crossing");
  pc->add_option("--rule", rule, "half_of_max or radius_doubling (root_survival only)");
  pc->add_option("--alpha", alpha, "giant threshold fraction");
  pc->add_option("--tol", tol, "bisection tolerance (>= 1e-3)");

  GraphArgs explore_args;
  double p = 0.25, eps = 0.05;
  std::optional<double> lambda1;
  std::optional<int> girth_override;
  long max_steps = 1000;
  std::string trace_out;
  auto* explore = app.add_subcommand("explore", "one run of the sprinkled exploration process");
  explore_args.attach(explore);
  explore->add_option("--p", p, "p-label probability");
  explore->add_option("--eps", eps, "eps-label probability");
  explore->add_option("--lambda1", lambda1, "lambda1 (default: Dirichlet estimate of the ball)");
  explore->add_option("--girth", girth_override, "girth for gtilde (default: measured)");
  explore->add_option("--max-steps", max_steps, "survival cutoff");
  explore->add_option("--trace", trace_out, "write the t,size,xi,z trace CSV here");

  auto* experiment = app.add_subcommand("experiment", "named experiments from a JSON config");
  experiment->require_subcommand(1);
  std::string config_path;
  bool check = false;
  std::optional<std::uint64_t> seed_override;
  auto* run = experiment->add_subcommand("run", "run an experiment and write its artifacts");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--out", out, "output directory (overrides the config)");
  run->add_option("--seed", seed_override, "master seed (overrides the config)");
  run->add_flag("--check", check, "exit 3 when an acceptance check fails");
  auto* validate = experiment->add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", config_path, "config file")->required();

  for (auto* sub : {escape, sweep, pc, explore}) {
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--trials", trials, "Monte Carlo trials");
  }
  for (auto* sub : {girth_cmd, spectral, escape, sweep, pc, explore})
    sub->add_option("--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*gen) {
      const perco::Instance inst = perco::build(gen_args.spec());
      if (out.empty()) {
        perco::write_edge_list(std::cout, *inst.graph);
      } else {
        std::ofstream f(out, std::ios::binary);
        perco::write_edge_list(f, *inst.graph);
        emit(perco::to_metadata(inst.spec, inst.degree), out + ".json");
      }
      return kOk;
    }
    if (*girth_cmd) {
      const perco::Instance inst = perco::build(girth_args.spec());
      const auto g = perco::girth(*inst.graph);
      emit({{"girth", g.length ? nlohmann::json(*g.length) : nlohmann::json(nullptr)},
            {"acyclic", g.acyclic()},
            {"generator", perco::to_metadata(inst.spec, inst.degree)}},
           out);
      return kOk;
    }
    if (*spectral) {
      const perco::Instance inst = perco::build(spec_args.spec());
      nlohmann::json j{{"generator", perco::to_metadata(inst.spec, inst.degree)}};
      const bool want_lambda = spectral_what == "lambda1" || (spectral_what == "auto" && inst.ball);
      if (want_lambda) j["lambda1"] = perco::spectral_json(perco::lambda1_dirichlet(*need_ball(inst), spectral_tol));
      if (spectral_what == "gap" || (spectral_what == "auto" && !inst.ball))
        j["spectral_gap"] = perco::spectral_json(perco::spectral_gap(*inst.graph, spectral_tol));
      if (spectral_what == "cheeger") j["cheeger"] = perco::spectral_json(perco::cheeger_bracket(*inst.graph));
      emit(j, out);
      return kOk;
    }
    if (*escape) {
      const perco::Instance inst = perco::build(escape_args.spec());
      perco::EscapeQuery q;
      q.ball = need_ball(inst);
      q.A = parse_set(*q.ball, set_text);
      q.horizon = horizon;
      q.trials = trials > 0 ? trials : 100'000;
      q.seed = seed;
      const auto exact = perco::escape_exact(q);
      const auto mc = perco::escape_mc(q);
      const auto lam = perco::lambda1_dirichlet(*q.ball);
      const auto rep = perco::lemma_check(q, lam);
      emit({{"exact", exact.probability},
            {"sweeps", exact.sweeps},
            {"mc", {{"estimate", mc.estimate}, {"stderr", mc.std_error}, {"censored", mc.censored}}},
            {"lambda1", perco::spectral_json(lam)},
            {"set_size", rep.set_size},
            {"pass", rep.pass}},
           out);
      return kOk;
    }
    if (*sweep) {
      const auto r = perco::giant_sweep(sweep_args.spec(), grid, trials > 0 ? trials : 20, alpha, seed);
      emit_text(perco::to_csv(r), out);
      return kOk;
    }
    if (*pc) {
      perco::PcOptions opt;
      opt.observable = perco::parse_observable(observable);
      opt.survival_rule = perco::parse_survival_rule(rule);
      opt.alpha = alpha;
      opt.tol = tol;
      opt.trials = trials > 0 ? trials : 40;
      opt.seed = seed;
      const auto spec = pc_args.spec();
      nlohmann::json j = perco::pc_json(perco::estimate_pc(spec, opt));
      j["generator"] = perco::to_metadata(spec, perco::declared_degree(spec));
      emit(j, out);
      return kOk;
    }
    if (*explore) {
      const perco::Instance inst = perco::build(explore_args.spec());
      const auto ball = need_ball(inst);
      perco::ExplorationParams params;
      params.p = p;
      params.eps = eps;
      params.lambda1 = lambda1 ? *lambda1 : std::min(1.0, perco::lambda1_dirichlet(*ball).value);
      int g = 0;
      if (girth_override) {
        g = *girth_override;
      } else if (inst.spec.family == perco::Family::free_product_ball) {
        g = inst.spec.parameters[0];
      } else {
        // Tree balls have no cycles; use the largest radius that fits.
        g = 2 * ball->radius + 1;
      }
      params.gtilde = perco::gtilde(g);
      params.max_steps = max_steps;
      params.seed = seed;
      const auto trace = perco::run_exploration(*ball, ball->root, params);
      if (!trace_out.empty()) emit_text(perco::trace_csv(trace), trace_out);
      emit(perco::trace_json(trace), out);
      return kOk;
    }
    if (*run || *validate) {
      perco::ExperimentConfig cfg;
      try {
        cfg = perco::load_config(config_path);
      } catch (const perco::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kValidation;
      }
      if (*validate) {
        const auto problems = perco::validate_config(cfg);
        for (const auto& v : problems) std::cout << v << '\n';
        if (problems.empty()) std::cout << "ok\n";
        return problems.empty() ? kOk : kValidation;
      }
      if (!out.empty()) cfg.out = out;
      if (seed_override) cfg.seed = *seed_override;
      if (const auto problems = perco::validate_config(cfg); !problems.empty()) {
        for (const auto& v : problems) std::cerr << v << '\n';
        return kValidation;
      }
      if (cfg.out.empty()) {
        std::cerr << "experiment run: no output directory (set \"out\" or pass --out)\n";
        return kValidation;
      }
      const auto result = perco::run_experiment(cfg);
      for (const auto& c : result.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
      return check && !result.all_pass() ? kCheckFailed : kOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
