// Command-line driver: Hamiltonian dumps, exact baselines, single-point VQE
// and chemical-potential scans.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "svqe/eigensolver.hpp"
#include "svqe/model.hpp"
#include "svqe/parallel.hpp"
#include "svqe/scan.hpp"
#include "svqe/vqe.hpp"

namespace {

using nlohmann::json;
using namespace svqe;

enum ExitCode : int { kOk = 0, kConfigError = 1, kSolverFailure = 2, kIoError = 3 };

struct ModelOptions {
  int sites = 2;
  int flavors = 3;
  double x = 1.0;
  std::vector<double> mu;
  std::vector<double> nu;

  void add(CLI::App* app, bool with_nu) {
    app->add_option("-N,--sites", sites, "Number of lattice sites (even)")->capture_default_str();
    app->add_option("-F,--flavors", flavors, "Number of fermion flavors")->capture_default_str();
    app->add_option("-x,--x", x, "Dimensionless hopping 1/(ag)^2")->capture_default_str();
    app->add_option("--mu", mu, "Per-flavor mass (one value is broadcast)")->delimiter(',');
    if (with_nu) {
      app->add_option("--nu", nu, "Per-flavor chemical potential (one value is broadcast)")
          ->delimiter(',');
    }
  }

  static std::vector<double> broadcast(std::vector<double> v, int n, const char* name) {
    if (v.empty()) return std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), 0.0);
    if (v.size() == 1) return std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), v[0]);
    if (static_cast<int>(v.size()) != n) {
      throw std::invalid_argument(std::string("--") + name + " needs 1 or F values");
    }
    return v;
  }

  ModelParams params() const {
    ModelParams p;
    p.sites = sites;
    p.flavors = flavors;
    p.x = x;
    p.mu = broadcast(mu, flavors, "mu");
    p.nu = broadcast(nu, flavors, "nu");
    p.validate();
    return p;
  }
};

struct OptimizerOptions {
  int layers = 5;
  bool constrained = false;
  OptimizerSettings settings;

  void add(CLI::App* app) {
    app->add_option("-L,--layers", layers, "Ansatz layers")->capture_default_str();
    app->add_flag("--constrained,!--unconstrained", constrained,
                  "Tie angles by the flip-reflection symmetry");
    app->add_option("--restarts", settings.restarts, "Random restarts per point")
        ->capture_default_str();
    app->add_option("--seed", settings.seed, "Base RNG seed")->capture_default_str();
    app->add_option("--max-iters", settings.lbfgs.max_iters, "L-BFGS iteration cap")
        ->capture_default_str();
    app->add_option("--grad-tol", settings.lbfgs.grad_tol, "Gradient-norm stopping threshold")
        ->capture_default_str();
    app->add_option("--history", settings.lbfgs.history, "L-BFGS memory")->capture_default_str();
    app->add_option("--energy-factor", settings.energy_factor, "Outlier energy factor")
        ->capture_default_str();
    app->add_option("--int-tol", settings.int_tol, "Outlier integer tolerance on dN")
        ->capture_default_str();
    app->add_option("--degeneracy-tol", settings.degeneracy_tol,
                    "Energy window for the ground space")
        ->capture_default_str();
    app->add_option("--threads", settings.threads,
                    std::string("Worker threads (0: ") + kThreadsEnv + " or hardware)")
        ->capture_default_str();
  }
};

json model_json(const ModelParams& p) {
  return json{{"sites", p.sites}, {"flavors", p.flavors}, {"x", p.x}, {"mu", p.mu}, {"nu", p.nu}};
}

int run_dump(const ModelOptions& m, const std::string& output) {
  const PauliSum w = build_hamiltonian(m.params());
  if (output.empty() || output == "-") {
    write_pauli_sum(std::cout, w);
    return std::cout ? kOk : kIoError;
  }
  std::ofstream out(output);
  if (!out) throw std::ios_base::failure("cannot open " + output);
  write_pauli_sum(out, w);
  return out ? kOk : kIoError;
}

int run_ed(const ModelOptions& m, int levels) {
  const ModelParams p = m.params();
  const SpectrumResult spec = ed_baseline(p, levels);
  json dn = json::array();
  if (p.flavors >= 2) {
    std::vector<CompiledOperator> ops;
    for (int f = 0; f < p.flavors; ++f) ops.emplace_back(delta_n_operator(p, f));
    for (const auto& v : spec.vectors) {
      json level = json::array();
      for (const auto& op : ops) level.push_back(expectation(v, op));
      dn.push_back(std::move(level));
    }
  }
  const json out{{"params", model_json(p)},
                 {"sector_weight", p.num_qubits() / 2},
                 {"energies", spec.energies},
                 {"delta_n", std::move(dn)},
                 {"gap", spec.gap()},
                 {"residuals", spec.residuals}};
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int run_vqe_single(const ModelOptions& m, const OptimizerOptions& o, int levels,
                   const std::string& state_path) {
  const ModelParams p = m.params();
  if (o.constrained && !p.has_flip_reflection_symmetry(1e-12)) {
    throw std::invalid_argument("constrained ansatz needs nu_f = -nu_{F-1-f} and mu_f = mu_{F-1-f}");
  }
  SpectrumResult baseline = ed_baseline(p, levels);
  const double e0 = baseline.energies.front();
  VqeProblem problem(p, AnsatzConfig{p.num_qubits(), o.layers, o.constrained}, std::move(baseline));
  std::vector<VqeRunRecord> records = multi_start(problem, o.settings);
  const auto best = best_record(records);

  json recs = json::array();
  for (const auto& r : records) recs.push_back(to_json(r));
  const json out{{"params", model_json(p)},
                 {"layers", o.layers},
                 {"constrained", o.constrained},
                 {"params_per_layer", problem.objective().config().params_per_layer()},
                 {"ed_energy", e0},
                 {"records", std::move(recs)},
                 {"best", best ? json(*best) : json(nullptr)}};
  std::cout << out.dump(2) << '\n';

  if (!state_path.empty() && best) {
    std::ofstream sf(state_path);
    if (!sf) throw std::ios_base::failure("cannot open " + state_path);
    write_state_text(sf, problem.objective().state(records[*best].params));
    if (!sf) return kIoError;
  }
  return best ? kOk : kSolverFailure;
}

int run_scan_cmd(ScanConfig cfg, bool resume, bool quiet) {
  cfg.validate();
  std::vector<ScanPointResult> done;
  if (resume) done = load_checkpoint(cfg);
  if (!quiet && !done.empty()) {
    std::clog << "resuming: " << done.size() << " of " << cfg.steps << " points already done\n";
  }
  auto results = run_scan(cfg, std::move(done), [quiet](const ScanPointResult& r) {
    if (quiet) return;
    std::clog << "point " << r.index << " nu0=" << format_double(r.nu[0])
              << (r.failed ? " FAILED: " + r.error : "") << '\n';
  });
  emit_outputs(results, cfg);
  const bool all_failed =
      std::all_of(results.begin(), results.end(), [](const auto& r) { return r.failed; });
  return all_failed ? kSolverFailure : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational and exact ground states of the multi-flavor Schwinger model"};
  app.set_config("--config", "", "TOML/INI configuration file; command-line flags override it");
  app.require_subcommand(1);

  ModelOptions dump_model;
  std::string dump_output;
  auto* dump = app.add_subcommand("dump-hamiltonian", "Write the spin Hamiltonian as `re im word` lines");
  dump_model.add(dump, true);
  dump->add_option("-o,--output", dump_output, "Output file (default stdout)");

  ModelOptions ed_model;
  int ed_levels = 4;
  auto* ed = app.add_subcommand("ed", "Exact lowest levels in the zero-charge sector (JSON)");
  ed_model.add(ed, true);
  ed->add_option("-k,--levels", ed_levels, "Number of levels")->capture_default_str();

  ModelOptions vqe_model;
  OptimizerOptions vqe_opt;
  int vqe_levels = 4;
  std::string state_path;
  auto* vqe = app.add_subcommand("vqe-single", "Multi-start VQE at one parameter point (JSON)");
  vqe_model.add(vqe, true);
  vqe_opt.add(vqe);
  vqe->add_option("-k,--levels", vqe_levels, "ED levels for the baseline")->capture_default_str();
  vqe->add_option("--dump-state", state_path, "Write the best state as `index re im` lines");

  ModelOptions scan_model;
  OptimizerOptions scan_opt;
  ScanConfig scan_cfg;
  bool untie_nu2 = false;
  bool resume = false;
  bool quiet = false;
  auto* scan = app.add_subcommand("scan", "Sweep nu0 and write CSV/JSON outputs");
  scan_model.add(scan, false);
  scan_opt.add(scan);
  scan->add_option("--nu1", scan_cfg.nu1, "Fixed nu1")->capture_default_str();
  scan->add_option("--nu2", scan_cfg.nu2, "Fixed nu2 (with --untie-nu2)")->capture_default_str();
  scan->add_flag("--untie-nu2", untie_nu2, "Keep nu2 fixed instead of nu2 = -nu0");
  scan->add_option("--lo", scan_cfg.lo, "First nu0")->capture_default_str();
  scan->add_option("--hi", scan_cfg.hi, "Last nu0")->capture_default_str();
  scan->add_option("--steps", scan_cfg.steps, "Number of nu0 points")->capture_default_str();
  scan->add_option("-k,--levels", scan_cfg.ed_levels, "ED levels per point")->capture_default_str();
  scan->add_option("--csv", scan_cfg.csv_path, "Per-point CSV output");
  scan->add_option("--json", scan_cfg.json_path, "Full JSON output");
  scan->add_option("--transitions", scan_cfg.transitions_path, "Transitions CSV output");
  scan->add_option("--checkpoint", scan_cfg.checkpoint_path, "JSON-lines checkpoint file");
  scan->add_flag("--resume", resume, "Skip points already in the checkpoint");
  scan->add_flag("-q,--quiet", quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*dump) return run_dump(dump_model, dump_output);
    if (*ed) return run_ed(ed_model, ed_levels);
    if (*vqe) return run_vqe_single(vqe_model, vqe_opt, vqe_levels, state_path);
    if (*scan) {
      ModelParams p;
      p.sites = scan_model.sites;
      p.flavors = scan_model.flavors;
      p.x = scan_model.x;
      p.mu = ModelOptions::broadcast(scan_model.mu, p.flavors, "mu");
      scan_cfg.model = p;
      scan_cfg.tie_nu2 = !untie_nu2;
      scan_cfg.layers = scan_opt.layers;
      scan_cfg.constrained = scan_opt.constrained;
      scan_cfg.optimizer = scan_opt.settings;
      if (resume && scan_cfg.checkpoint_path.empty()) {
        throw std::invalid_argument("--resume needs --checkpoint");
      }
      return run_scan_cmd(scan_cfg, resume, quiet);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kConfigError;
}
