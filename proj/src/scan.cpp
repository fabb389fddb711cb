#include "svqe/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>

#include "svqe/parallel.hpp"

namespace svqe {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ScanConfig::validate() const {
  if (model.flavors != 3) {
    throw std::invalid_argument("scan: chemical-potential sweeps need F = 3 flavors");
  }
  if (steps < 2) throw std::invalid_argument("scan: steps must be at least 2");
  if (!(lo < hi)) throw std::invalid_argument("scan: sweep range needs lo < hi");
  if (layers < 1) throw std::invalid_argument("scan: layers must be positive");
  if (ed_levels < 1) throw std::invalid_argument("scan: ed_levels must be positive");
  if (optimizer.restarts < 1) throw std::invalid_argument("scan: restarts must be positive");
  for (std::size_t i = 0; i < static_cast<std::size_t>(steps); ++i) {
    const ModelParams p = point_model(i);
    p.validate();
    if (constrained && !p.has_flip_reflection_symmetry(1e-12)) {
      throw std::invalid_argument(
          "scan: constrained ansatz requested but nu_f = -nu_{F-1-f}, mu_f = mu_{F-1-f} fails at "
          "nu0 = " + format_double(sweep_value(i)));
    }
  }
}

double ScanConfig::sweep_value(std::size_t index) const {
  if (index + 1 == static_cast<std::size_t>(steps)) return hi;
  return lo + (hi - lo) * static_cast<double>(index) / static_cast<double>(steps - 1);
}

ModelParams ScanConfig::point_model(std::size_t index) const {
  ModelParams p = model;
  const double v = sweep_value(index);
  p.nu = {v, nu1, tie_nu2 ? -v : nu2};
  return p;
}

std::uint64_t ScanConfig::point_seed(std::size_t index) const {
  return mix_seed(optimizer.seed ^ 0x5ca11ab1eULL, index);
}

json ScanConfig::to_json() const {
  return json{{"sites", model.sites},
              {"flavors", model.flavors},
              {"x", model.x},
              {"mu", model.mu},
              {"nu1", nu1},
              {"tie_nu2", tie_nu2},
              {"nu2", nu2},
              {"lo", lo},
              {"hi", hi},
              {"steps", steps},
              {"layers", layers},
              {"constrained", constrained},
              {"ed_levels", ed_levels},
              {"restarts", optimizer.restarts},
              {"seed", optimizer.seed},
              {"max_iters", optimizer.lbfgs.max_iters},
              {"grad_tol", optimizer.lbfgs.grad_tol},
              {"history", optimizer.lbfgs.history},
              {"energy_factor", optimizer.energy_factor},
              {"int_tol", optimizer.int_tol},
              {"degeneracy_tol", optimizer.degeneracy_tol}};
}

SpectrumResult ed_baseline(const ModelParams& p, int levels) {
  return ground_state(build_hamiltonian(p), zero_charge_sector(p), levels);
}

ScanPointResult run_point(const ScanConfig& cfg, std::size_t index) {
  ScanPointResult out;
  out.index = index;
  const ModelParams p = cfg.point_model(index);
  out.nu = p.nu;
  try {
    SpectrumResult baseline = ed_baseline(p, cfg.ed_levels);
    out.ed_energy = baseline.energies.front();
    out.gap = baseline.gap();
    out.ed_degeneracy = ground_degeneracy(baseline, cfg.optimizer.degeneracy_tol);

    const AnsatzConfig ansatz{p.num_qubits(), cfg.layers, cfg.constrained};
    VqeProblem problem(p, ansatz, std::move(baseline));
    out.ed_delta_n = problem.delta_n(problem.baseline()->vectors.front());

    OptimizerSettings settings = cfg.optimizer;
    settings.seed = cfg.point_seed(index);
    out.records = multi_start(problem, settings);
    out.best = best_record(out.records);
    out.failed = !out.best.has_value();
    if (out.failed) out.error = "every restart was classified as an outlier";
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

namespace {

json checkpoint_header(const ScanConfig& cfg) { return json{{"config", cfg.to_json()}}; }

}  // namespace

std::vector<ScanPointResult> load_checkpoint(const ScanConfig& cfg) {
  std::vector<ScanPointResult> points;
  if (cfg.checkpoint_path.empty()) return points;
  std::ifstream in(cfg.checkpoint_path);
  if (!in) return points;
  std::string line;
  if (!std::getline(in, line)) return points;
  if (json::parse(line) != checkpoint_header(cfg)) {
    throw std::runtime_error("checkpoint " + cfg.checkpoint_path +
                             " was written for a different configuration");
  }
  std::set<std::size_t> seen;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      break;  // truncated final line from an interrupted run
    }
    ScanPointResult p = point_from_json(j);
    if (p.index < static_cast<std::size_t>(cfg.steps) && seen.insert(p.index).second) {
      points.push_back(std::move(p));
    }
  }
  return points;
}

std::vector<ScanPointResult> run_scan(const ScanConfig& cfg, std::vector<ScanPointResult> completed,
                                      const PointCallback& on_point) {
  cfg.validate();
  const auto steps = static_cast<std::size_t>(cfg.steps);
  std::vector<std::optional<ScanPointResult>> slots(steps);
  for (auto& p : completed) {
    if (p.index < steps) slots[p.index] = std::move(p);
  }
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < steps; ++i) {
    if (!slots[i]) pending.push_back(i);
  }

  // Rewritten rather than appended so a torn last line from an interrupted run
  // cannot corrupt the points that follow it.
  std::ofstream checkpoint;
  if (!cfg.checkpoint_path.empty()) {
    checkpoint.open(cfg.checkpoint_path, std::ios::trunc);
    if (!checkpoint) {
      throw std::ios_base::failure("cannot open checkpoint " + cfg.checkpoint_path);
    }
    checkpoint << checkpoint_header(cfg).dump() << '\n';
    for (const auto& slot : slots) {
      if (slot) checkpoint << to_json(*slot).dump() << '\n';
    }
    checkpoint << std::flush;
  }

  // Parallelize over points when there are enough of them, otherwise over restarts.
  const int threads = cfg.optimizer.threads > 0 ? cfg.optimizer.threads : thread_count();
  ScanConfig local = cfg;
  const bool point_parallel = threads > 1 && pending.size() >= static_cast<std::size_t>(threads);
  if (point_parallel) local.optimizer.threads = 1;

  std::mutex writer;
  parallel_for(pending.size(), point_parallel ? threads : 1, [&](std::size_t k) {
    const std::size_t i = pending[k];
    ScanPointResult r = run_point(local, i);
    std::lock_guard lock(writer);
    if (checkpoint.is_open()) checkpoint << to_json(r).dump() << '\n' << std::flush;
    if (on_point) on_point(r);
    slots[i] = std::move(r);
  });

  std::vector<ScanPointResult> results;
  results.reserve(steps);
  for (auto& s : slots) results.push_back(std::move(*s));
  return results;
}

std::vector<Transition> transitions_from_labels(const std::vector<double>& sweep,
                                                const std::vector<std::pair<double, double>>& dn,
                                                PhaseSource source) {
  if (sweep.size() != dn.size()) {
    throw std::invalid_argument("transitions_from_labels: size mismatch");
  }
  std::vector<Transition> out;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    const int a0 = static_cast<int>(std::lround(dn[i - 1].first));
    const int a2 = static_cast<int>(std::lround(dn[i - 1].second));
    const int b0 = static_cast<int>(std::lround(dn[i].first));
    const int b2 = static_cast<int>(std::lround(dn[i].second));
    if (a0 == b0 && a2 == b2) continue;
    out.push_back({source, i - 1, i, sweep[i - 1], sweep[i], a0, a2, b0, b2});
  }
  return out;
}

std::vector<Transition> detect_transitions(const std::vector<ScanPointResult>& results,
                                           PhaseSource source, std::vector<std::size_t>* skipped) {
  std::vector<double> sweep;
  std::vector<std::pair<double, double>> labels;
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& p = results[i];
    if (i > 0 && p.nu.at(0) < results[i - 1].nu.at(0)) {
      throw std::invalid_argument("detect_transitions: results are not sorted by nu0");
    }
    std::optional<std::pair<double, double>> label;
    if (source == PhaseSource::kEd) {
      if (p.ed_delta_n.size() >= 3) label = {p.ed_delta_n[0], p.ed_delta_n[2]};
    } else if (p.best) {
      const auto& d = p.records[*p.best].delta_n;
      if (d.size() >= 3) label = {d[0], d[2]};
    }
    if (!label) {
      std::clog << "warning: skipping failed scan point " << p.index << " (nu0 = "
                << format_double(p.nu.at(0)) << ")\n";
      if (skipped) skipped->push_back(p.index);
      continue;
    }
    sweep.push_back(p.nu[0]);
    labels.push_back(*label);
    indices.push_back(p.index);
  }
  auto out = transitions_from_labels(sweep, labels, source);
  for (auto& t : out) {
    t.index_lo = indices[t.index_lo];
    t.index_hi = indices[t.index_hi];
  }
  return out;
}

void write_points_csv(std::ostream& os, const std::vector<ScanPointResult>& results) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  os << kPointsCsvHeader << '\n';
  for (const auto& p : results) {
    const bool have_ed = p.ed_delta_n.size() >= 3;
    const VqeRunRecord* best = p.best ? &p.records[*p.best] : nullptr;
    const bool have_best = best != nullptr && best->delta_n.size() >= 3;
    int outliers = 0;
    for (const auto& r : p.records) outliers += r.outlier ? 1 : 0;
    os << format_double(p.nu.at(0)) << ',' << format_double(p.nu.at(1)) << ','
       << format_double(p.nu.at(2)) << ',' << format_double(have_ed ? p.ed_energy : nan) << ','
       << format_double(have_ed ? p.ed_delta_n[0] : nan) << ','
       << format_double(have_ed ? p.ed_delta_n[2] : nan) << ','
       << format_double(have_ed ? p.gap : nan) << ','
       << format_double(have_best ? best->energy : nan) << ','
       << format_double(have_best ? best->delta_n[0] : nan) << ','
       << format_double(have_best ? best->delta_n[2] : nan) << ','
       << format_double(have_best ? best->overlap : nan) << ',' << outliers << ','
       << p.records.size() << '\n';
  }
}

void write_transitions_csv(std::ostream& os, const std::vector<Transition>& transitions) {
  os << kTransitionsCsvHeader << '\n';
  for (const auto& t : transitions) {
    os << (t.source == PhaseSource::kEd ? "ed" : "vqe") << ',' << t.index_lo << ',' << t.index_hi
       << ',' << format_double(t.nu0_lo) << ',' << format_double(t.nu0_hi) << ',' << t.dn0_lo
       << ',' << t.dn2_lo << ',' << t.dn0_hi << ',' << t.dn2_hi << '\n';
  }
}

json to_json(const VqeRunRecord& r) {
  return json{{"restart", r.restart},
              {"seed", r.seed},
              {"energy", r.energy},
              {"params", r.params},
              {"delta_n", r.delta_n},
              {"overlap", r.overlap},
              {"converged", r.converged},
              {"outlier", r.outlier},
              {"iterations", r.iterations},
              {"grad_norm", r.grad_norm},
              {"termination", r.termination}};
}

VqeRunRecord record_from_json(const json& j) {
  VqeRunRecord r;
  r.restart = j.at("restart").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.energy = j.at("energy").get<double>();
  r.params = j.at("params").get<std::vector<double>>();
  r.delta_n = j.at("delta_n").get<std::vector<double>>();
  r.overlap = j.at("overlap").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.outlier = j.at("outlier").get<bool>();
  r.iterations = j.at("iterations").get<int>();
  r.grad_norm = j.at("grad_norm").get<double>();
  r.termination = j.at("termination").get<std::string>();
  return r;
}

json to_json(const ScanPointResult& p) {
  json records = json::array();
  for (const auto& r : p.records) records.push_back(to_json(r));
  return json{{"index", p.index},
              {"nu", p.nu},
              {"ed_energy", p.ed_energy},
              {"ed_delta_n", p.ed_delta_n},
              {"gap", p.gap},
              {"ed_degeneracy", p.ed_degeneracy},
              {"records", std::move(records)},
              {"best", p.best ? json(*p.best) : json(nullptr)},
              {"failed", p.failed},
              {"error", p.error}};
}

ScanPointResult point_from_json(const json& j) {
  ScanPointResult p;
  p.index = j.at("index").get<std::size_t>();
  p.nu = j.at("nu").get<std::vector<double>>();
  p.ed_energy = j.at("ed_energy").get<double>();
  p.ed_delta_n = j.at("ed_delta_n").get<std::vector<double>>();
  p.gap = j.at("gap").get<double>();
  p.ed_degeneracy = j.at("ed_degeneracy").get<int>();
  for (const auto& r : j.at("records")) p.records.push_back(record_from_json(r));
  if (!j.at("best").is_null()) p.best = j.at("best").get<std::size_t>();
  p.failed = j.at("failed").get<bool>();
  p.error = j.at("error").get<std::string>();
  return p;
}

json scan_to_json(const ScanConfig& cfg, const std::vector<ScanPointResult>& results) {
  json points = json::array();
  for (const auto& p : results) points.push_back(to_json(p));
  return json{{"config", cfg.to_json()}, {"points", std::move(points)}};
}

namespace {

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot open " + path + " for writing");
  body(out);
  out.flush();
  if (!out) throw std::ios_base::failure("write to " + path + " failed");
}

}  // namespace

void emit_outputs(const std::vector<ScanPointResult>& results, const ScanConfig& cfg) {
  write_file(cfg.csv_path, [&](std::ostream& os) { write_points_csv(os, results); });
  write_file(cfg.json_path,
             [&](std::ostream& os) { os << scan_to_json(cfg, results).dump(2) << '\n'; });
  write_file(cfg.transitions_path, [&](std::ostream& os) {
    auto all = detect_transitions(results, PhaseSource::kEd);
    auto vqe = detect_transitions(results, PhaseSource::kVqe);
    all.insert(all.end(), vqe.begin(), vqe.end());
    write_transitions_csv(os, all);
  });
}

}  // namespace svqe
