// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any
// failure. argv[1] is the perco_cli binary used for the determinism check.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "perco/experiments.hpp"
#include "perco/generators.hpp"
#include "perco/percolation.hpp"
#include "perco/spectral.hpp"
#include "perco/walks.hpp"
#include "support/jacobi.hpp"

using namespace perco;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool pass, const std::string& criterion, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  " << criterion << "  (" << detail << ")" << std::endl;
  if (!pass) ++failures;
}

void experiment_criterion(Experiment e, const std::string& label, double max_seconds = 0.0) {
  ExperimentConfig cfg{e, 1, "", json::object()};
  try {
    const ExperimentResult r = execute(cfg);
    std::string detail;
    for (const Check& c : r.checks) {
      if (detail.find(c.detail) != std::string::npos) continue;
      if (!detail.empty()) detail += "; ";
      detail += (c.pass ? "" : "[failed] ") + c.detail;
    }
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.2fs", r.wall_seconds);
    detail += std::string("; ") + wall;
    bool pass = r.all_pass();
    if (max_seconds > 0.0 && r.wall_seconds >= max_seconds) {
      pass = false;
      detail += " exceeds the runtime limit";
    }
    report(pass, label, detail);
  } catch (const std::exception& ex) {
    report(false, label, std::string("error: ") + ex.what());
  }
}

// ---- oracle equivalence ----------------------------------------------------

Graph cycle(int n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

double band(double exact, long n) { return 3.0 * std::sqrt(exact * (1.0 - exact) / n) + 1.0 / n; }

int percolation_oracle_failures(int& fixtures) {
  int bad = 0;
  const long n = 100'000;
  for (const RootedBall& b : {tree_ball(3, 2), ball(torus({7, 7}), 0, 2), ball(cycle(12), 0, 4),
                              ball(triangular_torus(5), 0, 1)}) {
    for (double p : {0.25, 0.5, 0.75}) {
      ++fixtures;
      const double exact = exhaustive_oracle(b.graph, p, RootToBoundary{b.root, b.boundary});
      bad += std::abs(root_survival_prob(b, p, n, 3).estimate - exact) > band(exact, n);
      const int k = (b.graph.vertex_count() + 1) / 2;
      const double giant = exhaustive_oracle(b.graph, p, LargestAtLeast{k});
      long hits = 0;
      for (const TrialStats& t : percolation_trials(b.graph, p, n, 4)) hits += t.largest >= k;
      bad += std::abs(static_cast<double>(hits) / n - giant) > band(giant, n);
    }
  }
  return bad;
}

int escape_oracle_failures(int& queries) {
  int bad = 0;
  std::vector<std::pair<std::shared_ptr<const RootedBall>, int>> cases = {
      {std::make_shared<const RootedBall>(tree_ball(3, 12)), 0},
      {std::make_shared<const RootedBall>(tree_ball(4, 8)), 2},
      {std::make_shared<const RootedBall>(free_product_ball(7, 5)), 1},
      {std::make_shared<const RootedBall>(ball(cycle(40), 0, 3)), 2}};
  for (const auto& [b, r] : cases) {
    ++queries;
    EscapeQuery q;
    q.ball = b;
    std::vector<Vertex> A;
    for (Vertex v = 0; v < b->graph.vertex_count(); ++v)
      if (b->dist[v] <= r) A.push_back(v);
    q.A = VertexSet(b->graph.vertex_count(), A);
    q.trials = 100'000;
    q.seed = 11;
    const double exact = escape_exact(q).probability;
    const EscapeMc mc = escape_mc(q);
    bad += std::abs(mc.estimate - exact) > 4.0 * mc.std_error + 1e-12;
  }
  return bad;
}

int cluster_oracle_failures(int& samples) {
  int bad = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    ++samples;
    const Graph g = s % 2 ? torus({13, 9}) : random_regular(500, 3, s);
    const PercolationSample smp = sample(g, 0.3 + 0.01 * static_cast<double>(s), s);
    std::vector<int> label(static_cast<std::size_t>(g.vertex_count()), -1);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      if (label[v] >= 0) continue;
      std::vector<Vertex> stack{v};
      label[v] = v;
      while (!stack.empty()) {
        const Vertex x = stack.back();
        stack.pop_back();
        for (const auto& inc : g.neighbors(x))
          if (smp.open[inc.edge] && label[inc.neighbor] < 0) {
            label[inc.neighbor] = v;
            stack.push_back(inc.neighbor);
          }
      }
    }
    bad += clusters(g, smp).component_of != label;
  }
  return bad;
}

int spectral_oracle_failures(int& graphs, double& worst) {
  int bad = 0;
  auto all = [](const Graph& g) {
    std::vector<Vertex> v(static_cast<std::size_t>(g.vertex_count()));
    for (int i = 0; i < g.vertex_count(); ++i) v[i] = i;
    return v;
  };
  auto compare = [&](double a, double b) {
    ++graphs;
    worst = std::max(worst, std::abs(a - b));
    bad += std::abs(a - b) > 1e-8;
  };
  for (std::uint64_t s = 0; s < 6; ++s) {
    const Graph g = random_regular(30, 3 + static_cast<int>(s % 3), s);
    if (g.component_count() != 1) continue;
    const auto ev = testsupport::symmetric_eigenvalues(testsupport::walk_matrix(g, all(g), 1.0 / *g.regular_degree()));
    compare(spectral_gap(g, 1e-12).value, 1.0 - ev[ev.size() - 2]);
  }
  for (int n : {5, 12, 29}) {
    const Graph g = cycle(n);
    const auto ev = testsupport::symmetric_eigenvalues(testsupport::walk_matrix(g, all(g), 0.5));
    compare(spectral_gap(g, 1e-12).value, 1.0 - ev[ev.size() - 2]);
  }
  for (const auto& [b, d] : {std::pair{tree_ball(3, 3), 3}, std::pair{tree_ball(4, 2), 4},
                             std::pair{free_product_ball(3, 2), 6}, std::pair{ball(cycle(40), 0, 12), 2}}) {
    std::vector<Vertex> interior;
    for (Vertex v = 0; v < b.graph.vertex_count(); ++v)
      if (b.interior(v)) interior.push_back(v);
    if (interior.size() > 30) continue;
    const auto ev = testsupport::symmetric_eigenvalues(testsupport::walk_matrix(b.graph, interior, 1.0 / d));
    compare(lambda1_dirichlet(b, 1e-13).value, 1.0 - ev.back());
  }
  return bad;
}

void oracle_criterion() {
  try {
    int fixtures = 0, queries = 0, samples = 0, graphs = 0;
    double worst = 0.0;
    const int perc = percolation_oracle_failures(fixtures);
    const int esc = escape_oracle_failures(queries);
    const int clu = cluster_oracle_failures(samples);
    const int spec = spectral_oracle_failures(graphs, worst);
    std::ostringstream d;
    d << "percolation " << perc << "/" << fixtures << " off; escape " << esc << "/" << queries
      << " off; clusters " << clu << "/" << samples << " off; spectral " << spec << "/" << graphs
      << " off, max diff " << worst;
    report(perc + esc + clu + spec == 0, "Oracle equivalence", d.str());
  } catch (const std::exception& ex) {
    report(false, "Oracle equivalence", std::string("error: ") + ex.what());
  }
}

// ---- determinism -----------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every file byte for byte, except the manifest's wall time.
std::string compare_dirs(const fs::path& a, const fs::path& b, int& files) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::vector<std::string> other;
  for (const auto& e : fs::directory_iterator(b)) other.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  std::sort(other.begin(), other.end());
  if (names != other) return "file lists differ";
  for (const auto& n : names) {
    ++files;
    std::string x = slurp(a / n), y = slurp(b / n);
    if (n == "manifest.json") {
      json jx = json::parse(x), jy = json::parse(y);
      jx.erase("wall_time_seconds");
      jy.erase("wall_time_seconds");
      x = jx.dump();
      y = jy.dump();
    }
    if (x != y) return n + " differs";
  }
  return {};
}

void determinism_criterion(const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "perco_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::pair<std::string, json>> runs = {
      {"e1", {{"experiment", "E1_tree_pc"}, {"seed", 3}}},
      {"e3", {{"experiment", "E3_square_lattice"}, {"seed", 3}, {"params", {{"sides", {128, 128}}}}}},
      {"e6", {{"experiment", "E6_gm_slab_trend"}, {"seed", 3}, {"params", {{"L", 24}, {"trials", 40}}}}},
      {"e7", {{"experiment", "E7_lemma_escape"}, {"seed", 3}}},
      {"e8", {{"experiment", "E8_drift_check"}, {"seed", 3}, {"params", {{"traces", 300}, {"min_pooled_steps", 1}}}}},
  };
  int files = 0;
  std::string problem;
  for (const auto& [name, cfg] : runs) {
    const fs::path config = root / (name + ".json");
    std::ofstream(config) << cfg.dump(2);
    for (int threads : {1, 4}) {
      for (int repeat = 0; repeat < (threads == 1 ? 2 : 1); ++repeat) {
        const fs::path out = root / (name + "_t" + std::to_string(threads) + "_" + std::to_string(repeat));
        const std::string cmd = "\"" + cli + "\" --threads " + std::to_string(threads) +
                                " experiment run --config \"" + config.string() + "\" --out \"" +
                                out.string() + "\" > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) problem = name + ": cli run failed";
      }
    }
    if (!problem.empty()) break;
    const fs::path base = root / (name + "_t1_0");
    for (const fs::path other : {root / (name + "_t1_1"), root / (name + "_t4_0")}) {
      const std::string diff = compare_dirs(base, other, files);
      if (!diff.empty()) problem = name + ": " + diff;
    }
    if (!problem.empty()) break;
  }
  fs::remove_all(root);
  report(problem.empty(), "Determinism across runs and --threads 1/4",
         problem.empty() ? std::to_string(files) + " files compared over " + std::to_string(runs.size()) +
                               " experiments"
                         : problem);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to perco_cli>\n";
    return 2;
  }
  experiment_criterion(Experiment::E1_tree_pc, "E1 tree criticality, runtime < 1 s", 1.0);
  experiment_criterion(Experiment::E2_expander_dichotomy, "E2 expander dichotomy");
  experiment_criterion(Experiment::E3_square_lattice, "E3 square lattice");
  experiment_criterion(Experiment::E4_triangular, "E4 triangular lattice");
  experiment_criterion(Experiment::E5_theorem1_girth_series, "E5 girth series");
  experiment_criterion(Experiment::E6_gm_slab_trend, "E6 slab trend");
  experiment_criterion(Experiment::E7_lemma_escape, "E7 escape lemma suite");
  experiment_criterion(Experiment::E8_drift_check, "E8 drift and census suite");
  oracle_criterion();
  determinism_criterion(argv[1]);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
