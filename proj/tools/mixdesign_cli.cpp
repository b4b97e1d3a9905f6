// mixdesign: mixing-matrix design, budget sweeps, D-PSGD simulation and
// contraction checks from the command line.
//
// Exit codes: 0 success, 1 usage or input error, 2 the method itself
// reported failure (greedy found no sparsifier, a check failed, ...).

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mixdesign/bilevel.hpp"
#include "mixdesign/cost.hpp"
#include "mixdesign/design_io.hpp"
#include "mixdesign/dpsgd_sim.hpp"
#include "mixdesign/ramanujan.hpp"
#include "mixdesign/sparsifier.hpp"
#include "mixdesign/spectral.hpp"
#include "mixdesign/topology.hpp"
#include "mixdesign/weight_solver.hpp"

namespace {

using nlohmann::json;
namespace md = mixdesign;

constexpr const char* kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMethodFailure = 2;

struct MethodFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out;
  int jobs = 1;
};

// Records everything needed to reproduce one invocation.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void input(const std::string& path, const std::string& contents) { inputs_[path] = sha256_hex(contents); }
  json& config() { return config_; }
  json& seeds() { return seeds_; }

  void write_alongside(const std::string& out_path) const {
    json doc{{"command", command_},
             {"tool_version", kVersion},
             {"config", config_},
             {"seeds", seeds_},
             {"inputs", inputs_},
             {"outputs", json::array({out_path})},
             {"timestamps", {{"written_utc", utc_now()}}}};
    md::write_text_file(out_path + ".manifest.json", doc.dump(2) + "\n");
  }

 private:
  std::string command_;
  json config_ = json::object();
  json seeds_ = json::object();
  std::map<std::string, std::string> inputs_;
};

void emit(const GlobalOptions& g, const Manifest& manifest, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    return;
  }
  md::write_text_file(g.out, text);
  manifest.write_alongside(g.out);
}

struct BaseOptions {
  std::string topology;
  int complete_nodes = 0;
  double comp_wh = 0.0003342;
  double comm_wh = 0.0138;
};

void add_base_options(CLI::App* cmd, BaseOptions& b) {
  cmd->add_option("--topology", b.topology, "Edge-list file of the base topology");
  cmd->add_option("--m", b.complete_nodes, "Use the complete graph on this many nodes as base");
  cmd->add_option("--comp-wh", b.comp_wh, "Default computation energy per iteration (Wh)");
  cmd->add_option("--comm-wh", b.comm_wh, "Default communication energy per activated link (Wh)");
}

md::Topology load_base(const BaseOptions& b, Manifest& manifest) {
  manifest.config()["comp_wh"] = b.comp_wh;
  manifest.config()["comm_wh"] = b.comm_wh;
  if (!b.topology.empty()) {
    const std::string text = md::read_text_file(b.topology);
    manifest.input(b.topology, text);
    manifest.config()["topology"] = b.topology;
    return md::parse_topology(text, md::ParseOptions{.default_comm_cost = b.comm_wh, .default_comp_cost = b.comp_wh});
  }
  if (b.complete_nodes >= 2) {
    manifest.config()["complete_nodes"] = b.complete_nodes;
    return md::complete_graph(b.complete_nodes, b.comp_wh, b.comm_wh);
  }
  throw md::InputError("give a base topology with --topology FILE or --m N");
}

struct SolverOptions {
  std::string rule = "barrier";
  double tolerance = 1e-7;
  int max_iterations = 5000;
};

void add_solver_options(CLI::App* cmd, SolverOptions& s) {
  cmd->add_option("--rule", s.rule, "Solver step rule: barrier | polyak");
  cmd->add_option("--tol", s.tolerance, "Solver tolerance");
  cmd->add_option("--max-iter", s.max_iterations, "Solver iteration cap");
}

md::SolverConfig solver_config(const SolverOptions& s, Manifest& manifest) {
  md::SolverConfig cfg{.max_iterations = s.max_iterations,
                       .tolerance = s.tolerance,
                       .rule = md::step_rule_from_string(s.rule),
                       .seed = 0};
  cfg.validate();
  manifest.config()["solver"] = {{"rule", s.rule}, {"tolerance", s.tolerance}, {"max_iterations", s.max_iterations}};
  return cfg;
}

std::string joined_command(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixing-matrix design for energy-efficient decentralized learning", "mixdesign"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GlobalOptions g;
  auto add_globals = [&g](CLI::App* cmd) {
    cmd->add_option("--seed", g.seed, "Master seed (default 0)");
    cmd->add_option("--out", g.out, "Output file (default: stdout)");
    cmd->add_option("--jobs", g.jobs, "Worker threads where supported")->check(CLI::PositiveNumber);
  };
  add_globals(&app);

  // design {solve, ramanujan, greedy}
  auto* design = app.add_subcommand("design", "Compute a mixing design");
  design->require_subcommand(1);

  BaseOptions solve_base;
  SolverOptions solve_opts;
  auto* solve = design->add_subcommand("solve", "Unconstrained minimum-rho link weights");
  add_base_options(solve, solve_base);
  add_solver_options(solve, solve_opts);
  add_globals(solve);

  BaseOptions ram_base;
  int ram_degree = 0;
  double ram_budget = 0.0;
  int ram_attempts = 1000;
  auto* ram = design->add_subcommand("ramanujan", "Random Ramanujan graph with weights 1/d on a complete base");
  add_base_options(ram, ram_base);
  ram->add_option("--d", ram_degree, "Regular degree");
  ram->add_option("--budget", ram_budget, "Per-node budget (Wh); sets d when --d is absent");
  ram->add_option("--max-attempts", ram_attempts, "Ramanujan draws before giving up");
  add_globals(ram);

  BaseOptions greedy_base;
  SolverOptions greedy_opts;
  double greedy_budget = 0.0;
  auto* greedy = design->add_subcommand("greedy", "Greedy sparsification under a per-node budget");
  add_base_options(greedy, greedy_base);
  add_solver_options(greedy, greedy_opts);
  greedy->add_option("--budget", greedy_budget, "Per-node budget (Wh)")->required();
  add_globals(greedy);

  // sweep
  BaseOptions sweep_base;
  SolverOptions sweep_solver;
  std::string sweep_method = "greedy";
  std::vector<double> sweep_grid;
  int sweep_points = 20;
  md::ConvergenceModel cm;
  auto* sweep = app.add_subcommand("sweep", "Budget sweep minimizing budget * K(rho)");
  add_base_options(sweep, sweep_base);
  add_solver_options(sweep, sweep_solver);
  sweep->add_option("--method", sweep_method, "greedy | ramanujan");
  sweep->add_option("--grid", sweep_grid, "Budgets (Wh), comma separated")->delimiter(',');
  sweep->add_option("--grid-points", sweep_points, "Log-spaced default grid size");
  sweep->add_option("--epsilon", cm.epsilon, "Target average squared gradient norm");
  sweep->add_option("--smoothness", cm.smoothness, "Smoothness constant l");
  sweep->add_option("--sigma", cm.sigma, "Gradient noise scale");
  sweep->add_option("--zeta", cm.zeta, "Heterogeneity scale");
  sweep->add_option("--m1", cm.m1, "Noise growth constant");
  sweep->add_option("--m2", cm.m2, "Heterogeneity growth constant");
  sweep->add_option("--gap", cm.initial_gap, "Initial optimality gap");
  sweep->add_option("--constant", cm.leading_constant, "Leading constant of K");
  add_globals(sweep);

  // simulate
  std::string sim_design;
  md::SimConfig sim;
  int sim_dim = 20;
  int sim_samples = 64;
  double sim_heterogeneity = 1.0;
  double sim_noise = 0.01;
  auto* simulate = app.add_subcommand("simulate", "Run D-PSGD on a synthetic least-squares task");
  simulate->add_option("--design", sim_design, "Design JSON")->required();
  simulate->add_option("--eta", sim.learning_rate, "Learning rate");
  simulate->add_option("--iters", sim.iterations, "Iterations");
  simulate->add_option("--batch", sim.batch, "Minibatch size per node");
  simulate->add_option("--record-every", sim.record_every, "Trace row stride");
  simulate->add_option("--dim", sim_dim, "Model dimension");
  simulate->add_option("--samples", sim_samples, "Samples per node");
  simulate->add_option("--heterogeneity", sim_heterogeneity, "Spread of the local optima");
  simulate->add_option("--noise", sim_noise, "Label noise");
  add_globals(simulate);

  // validate
  std::vector<std::string> val_designs;
  std::vector<double> val_probs;
  int val_trials = 1000;
  auto* validate = app.add_subcommand("validate", "Check the contraction bounds of a (randomized) design");
  validate->add_option("--design", val_designs, "Design JSON; repeat for a mixture")->required();
  validate->add_option("--prob", val_probs, "Mixture probabilities, one per design");
  validate->add_option("--trials", val_trials, "Random test matrices");
  add_globals(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  Manifest manifest(joined_command(argc, argv));
  manifest.seeds()["seed"] = g.seed;

  try {
    if (*solve) {
      manifest.config()["command"] = "design solve";
      md::Topology t = load_base(solve_base, manifest);
      md::SolverConfig cfg = solver_config(solve_opts, manifest);
      md::SolveResult r = md::solve_min_rho(t, md::LinkMask::none(t), cfg);
      md::MixingDesign d(t, r.alpha);
      emit(g, manifest, md::solve_result_to_json(d, r, cfg).dump(2) + "\n");
      return kExitOk;
    }

    if (*ram) {
      manifest.config()["command"] = "design ramanujan";
      md::Topology t = load_base(ram_base, manifest);
      if (!t.is_complete()) throw md::InputError("the ramanujan design needs a complete base topology");
      int d = ram_degree;
      if (d == 0) {
        if (!(ram_budget > 0.0)) throw md::InputError("give --d or --budget");
        d = std::min(md::degree_budget(t, md::CostModel::from_topology(t), ram_budget), t.node_count() - 1);
        manifest.config()["budget_wh"] = ram_budget;
      }
      manifest.config()["degree"] = d;
      md::RegularGraphSpec spec{.nodes = t.node_count(), .degree = d, .seed = g.seed, .max_attempts = ram_attempts};
      spec.validate();
      std::optional<md::RamanujanDesign> r;
      try {
        r = md::ramanujan_mixing(spec, t);
      } catch (const md::ComputeError& e) {
        throw MethodFailure(e.what());
      }
      json doc = md::design_to_json(r->design);
      doc["ramanujan"] = {{"degree", d}, {"attempts", r->attempts}, {"rho_bound", md::ramanujan_rho_bound(d)}};
      emit(g, manifest, doc.dump(2) + "\n");
      return kExitOk;
    }

    if (*greedy) {
      manifest.config()["command"] = "design greedy";
      manifest.config()["budget_wh"] = greedy_budget;
      md::Topology t = load_base(greedy_base, manifest);
      md::SolverConfig cfg = solver_config(greedy_opts, manifest);
      md::GreedyOutcome out = md::greedy_sparsify(t, md::CostModel::from_topology(t), greedy_budget, cfg);
      emit(g, manifest, md::greedy_outcome_to_json(out, greedy_budget).dump(2) + "\n");
      if (!out.success) {
        std::cerr << "greedy: no sparsifier under budget " << greedy_budget << " (" << md::to_string(out.failure)
                  << "): " << out.diagnostic << "\n";
        return kExitMethodFailure;
      }
      return kExitOk;
    }

    if (*sweep) {
      manifest.config()["command"] = "sweep";
      manifest.config()["method"] = sweep_method;
      md::Topology t = load_base(sweep_base, manifest);
      md::CostModel cost = md::CostModel::from_topology(t);
      md::SweepOptions opt{.method = md::sweep_method_from_string(sweep_method),
                           .solver = solver_config(sweep_solver, manifest),
                           .seed = g.seed,
                           .jobs = g.jobs};
      std::vector<double> grid = sweep_grid.empty() ? md::default_budget_grid(t, cost, sweep_points) : sweep_grid;
      manifest.config()["grid"] = grid;
      manifest.config()["convergence_model"] = {{"epsilon", cm.epsilon}, {"smoothness", cm.smoothness},
                                                {"sigma", cm.sigma},     {"zeta", cm.zeta},
                                                {"m1", cm.m1},           {"m2", cm.m2},
                                                {"gap", cm.initial_gap}, {"constant", cm.leading_constant}};
      md::SweepResult s = md::sweep(t, cost, cm, grid, opt);
      emit(g, manifest, md::sweep_to_csv(s));
      if (!s.argmin) {
        std::cerr << "sweep: " << s.diagnostic << "\n";
        return kExitMethodFailure;
      }
      std::cerr << "sweep: best budget " << md::format_double(s.rows[*s.argmin].budget) << " Wh (budget*K = "
                << md::format_double(*s.rows[*s.argmin].product) << ")\n";
      return kExitOk;
    }

    if (*simulate) {
      manifest.config()["command"] = "simulate";
      const std::string text = md::read_text_file(sim_design);
      manifest.input(sim_design, text);
      md::MixingDesign d = md::design_from_json(json::parse(text));
      const double rho = md::rho_deterministic(d);
      if (rho >= 1.0)
        std::cerr << "warning: design has rho = " << md::format_double(rho)
                  << " >= 1; convergence is not guaranteed\n";
      sim.seed = g.seed;
      manifest.config()["simulation"] = {{"eta", sim.learning_rate}, {"iters", sim.iterations},
                                         {"batch", sim.batch},       {"record_every", sim.record_every},
                                         {"dim", sim_dim},           {"samples", sim_samples},
                                         {"heterogeneity", sim_heterogeneity}, {"noise", sim_noise}};
      manifest.seeds()["task"] = g.seed;
      md::QuadraticTask task = md::make_quadratic_task(d.node_count(), sim_dim, sim_samples, sim_heterogeneity,
                                                       md::derive_seed(g.seed, 0x7a5c), sim_noise);
      md::TrainingTrace trace;
      try {
        trace = md::run_dpsgd(task, md::MixingDistribution::deterministic(d), md::CostModel::from_topology(d.topology),
                              sim);
      } catch (const md::ComputeError& e) {
        throw MethodFailure(e.what());
      }
      emit(g, manifest, md::trace_to_csv(trace));
      return kExitOk;
    }

    if (*validate) {
      manifest.config()["command"] = "validate";
      manifest.config()["trials"] = val_trials;
      if (!val_probs.empty() && val_probs.size() != val_designs.size())
        throw md::InputError("give one --prob per --design");
      std::vector<std::pair<md::MixingDesign, double>> entries;
      for (std::size_t i = 0; i < val_designs.size(); ++i) {
        const std::string text = md::read_text_file(val_designs[i]);
        manifest.input(val_designs[i], text);
        const double p = val_probs.empty() ? 1.0 / val_designs.size() : val_probs[i];
        entries.emplace_back(md::design_from_json(json::parse(text)), p);
      }
      md::MixingDistribution dist(std::move(entries));
      md::RhoBoundsReport r = md::validate_rho_bounds(dist, val_trials, g.seed);
      json doc{{"rho", r.rho},
               {"expected_squared_score", r.expected_squared_score},
               {"jensen_ok", r.jensen_ok},
               {"trials", r.trials},
               {"max_sampled_ratio", r.max_sampled_ratio},
               {"samples_ok", r.samples_ok},
               {"aligned_ratio", r.aligned_ratio},
               {"aligned_ok", r.aligned_ok},
               {"p", r.p},
               {"pass", r.all_ok()}};
      emit(g, manifest, doc.dump(2) + "\n");
      return r.all_ok() ? kExitOk : kExitMethodFailure;
    }
  } catch (const MethodFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMethodFailure;
  } catch (const md::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMethodFailure;
  }
  return kExitUsage;
}
