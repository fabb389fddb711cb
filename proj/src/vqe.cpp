#include "svqe/vqe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "svqe/parallel.hpp"

namespace svqe {

void AnsatzConfig::validate() const {
  if (num_qubits < 2) throw std::invalid_argument("AnsatzConfig: need at least two qubits");
  if (layers < 0) throw std::invalid_argument("AnsatzConfig: negative layer count");
  if (constrained && num_qubits % 2 != 0) {
    throw std::invalid_argument("AnsatzConfig: constrained ansatz needs an even qubit count");
  }
}

int AnsatzConfig::entangling_per_layer() const {
  return constrained ? num_qubits / 2 : num_qubits - 1;  // ceil((M-1)/2) for even M
}

int AnsatzConfig::rotations_per_layer() const {
  return constrained ? num_qubits / 2 : num_qubits;
}

std::vector<LayerAngles> expand_params(const AnsatzConfig& cfg, const ParamVector& free) {
  cfg.validate();
  if (static_cast<int>(free.size()) != cfg.num_params()) {
    throw std::invalid_argument("expand_params: expected " + std::to_string(cfg.num_params()) +
                                " parameters, got " + std::to_string(free.size()));
  }
  const int m = cfg.num_qubits;
  const int per_layer = cfg.params_per_layer();
  std::vector<LayerAngles> layers;
  layers.reserve(static_cast<std::size_t>(cfg.layers));
  for (int l = 0; l < cfg.layers; ++l) {
    const double* p = free.data() + static_cast<std::ptrdiff_t>(l) * per_layer;
    LayerAngles a = LayerAngles::zeros(m);
    if (!cfg.constrained) {
      std::copy(p, p + (m - 1), a.entangling.begin());
      std::copy(p + (m - 1), p + per_layer, a.rotation.begin());
    } else {
      const int ne = cfg.entangling_per_layer();
      for (int i = 0; i < ne; ++i) {
        a.entangling[i] = p[i];
        a.entangling[m - 2 - i] = p[i];
      }
      for (int i = 0; i < cfg.rotations_per_layer(); ++i) {
        a.rotation[i] = p[ne + i];
        a.rotation[m - 1 - i] = -p[ne + i];
      }
    }
    layers.push_back(std::move(a));
  }
  return layers;
}

ParamVector pull_back_gradient(const AnsatzConfig& cfg, const std::vector<double>& expanded) {
  const int m = cfg.num_qubits;
  const int full = 2 * m - 1;
  if (static_cast<int>(expanded.size()) != cfg.layers * full) {
    throw std::invalid_argument("pull_back_gradient: size mismatch");
  }
  if (!cfg.constrained) return expanded;
  const int per_layer = cfg.params_per_layer();
  const int ne = cfg.entangling_per_layer();
  ParamVector g(static_cast<std::size_t>(cfg.num_params()), 0.0);
  for (int l = 0; l < cfg.layers; ++l) {
    const double* e = expanded.data() + static_cast<std::ptrdiff_t>(l) * full;
    const double* r = e + (m - 1);
    double* out = g.data() + static_cast<std::ptrdiff_t>(l) * per_layer;
    for (int i = 0; i < ne; ++i) {
      out[i] = e[i] + (m - 2 - i != i ? e[m - 2 - i] : 0.0);
    }
    for (int i = 0; i < cfg.rotations_per_layer(); ++i) {
      out[ne + i] = r[i] - r[m - 1 - i];
    }
  }
  return g;
}

AnsatzObjective::AnsatzObjective(const PauliSum& h, AnsatzConfig cfg)
    : cfg_(cfg), h_(h) {
  cfg_.validate();
  if (h.num_qubits() != cfg_.num_qubits) {
    throw std::invalid_argument("AnsatzObjective: Hamiltonian and ansatz register differ");
  }
}

StateVector AnsatzObjective::state(const ParamVector& free) const {
  const auto layers = expand_params(cfg_, free);
  StateVector s = neel_state(cfg_.num_qubits);
  apply_ansatz(s, layers);
  return s;
}

double AnsatzObjective::cost(const ParamVector& free) const {
  return expectation(state(free), h_);
}

std::vector<double> AnsatzObjective::expanded_gradient(const std::vector<LayerAngles>& layers,
                                                       double* cost_out) const {
  const int m = cfg_.num_qubits;
  const int full = 2 * m - 1;
  StateVector psi = neel_state(m);
  apply_ansatz(psi, layers);
  StateVector lambda = h_.apply(psi);
  if (cost_out != nullptr) {
    const Complex e = inner_product(psi, lambda);
    if (std::abs(e.imag()) > kImagTolerance) {
      throw NonHermitianError("AnsatzObjective: complex cost; Hamiltonian is not Hermitian");
    }
    *cost_out = e.real();
  }

  // Walk the circuit backwards. For U = exp(-i t G / 2) the derivative of
  // <psi|H|psi> is Im <lambda|G|psi> with both states taken just after U.
  std::vector<double> grad(layers.size() * static_cast<std::size_t>(full), 0.0);
  for (std::size_t l = layers.size(); l-- > 0;) {
    const LayerAngles& a = layers[l];
    double* g = grad.data() + l * static_cast<std::size_t>(full);
    for (int k = m - 1; k >= 0; --k) {
      g[(m - 1) + k] = matrix_element_z(lambda, psi, k).imag();
      apply_rz(psi, k, -a.rotation[k]);
      apply_rz(lambda, k, -a.rotation[k]);
    }
    for (int parity : {1, 0}) {
      for (int k = parity; k + 1 < m; k += 2) {
        g[k] = matrix_element_xxyy(lambda, psi, k).imag();
        apply_xxyy(psi, k, -a.entangling[k]);
        apply_xxyy(lambda, k, -a.entangling[k]);
      }
    }
  }
  return grad;
}

double AnsatzObjective::cost_and_gradient(const ParamVector& free, ParamVector& grad) const {
  double c = 0.0;
  grad = pull_back_gradient(cfg_, expanded_gradient(expand_params(cfg_, free), &c));
  return c;
}

double cost(const PauliSum& h, const AnsatzConfig& cfg, const ParamVector& free) {
  return AnsatzObjective(h, cfg).cost(free);
}

ParamVector gradient(const PauliSum& h, const AnsatzConfig& cfg, const ParamVector& free) {
  ParamVector g;
  AnsatzObjective(h, cfg).cost_and_gradient(free, g);
  return g;
}

VqeProblem::VqeProblem(const ModelParams& model, AnsatzConfig cfg,
                       std::optional<SpectrumResult> baseline)
    : model_(model),
      hamiltonian_(build_hamiltonian(model)),
      objective_(hamiltonian_, cfg),
      baseline_(std::move(baseline)) {
  if (model_.flavors >= 2) {
    for (int f = 0; f < model_.flavors; ++f) {
      delta_n_ops_.emplace_back(delta_n_operator(model_, f));
    }
  }
}

std::vector<double> VqeProblem::delta_n(const StateVector& s) const {
  std::vector<double> d;
  d.reserve(delta_n_ops_.size());
  for (const auto& op : delta_n_ops_) d.push_back(expectation(s, op));
  return d;
}

VqeRunRecord optimize(const VqeProblem& problem, const ParamVector& init,
                      const OptimizerSettings& settings) {
  const AnsatzObjective& obj = problem.objective();
  if (static_cast<int>(init.size()) != obj.config().num_params()) {
    throw std::invalid_argument("optimize: initial parameter vector has the wrong size");
  }
  Objective fn = [&obj](const std::vector<double>& x, std::vector<double>& g) {
    return obj.cost_and_gradient(x, g);
  };
  LbfgsResult res = minimize_lbfgs(fn, init, settings.lbfgs);

  VqeRunRecord rec;
  rec.energy = res.f;
  rec.params = std::move(res.x);
  rec.converged = res.converged();
  rec.iterations = res.iterations;
  rec.grad_norm = res.grad_norm;
  rec.termination = std::string(to_string(res.status));
  const StateVector psi = obj.state(rec.params);
  rec.delta_n = problem.delta_n(psi);
  if (problem.baseline()) {
    rec.overlap = ground_space_overlap(psi, *problem.baseline(), settings.degeneracy_tol);
  }
  return rec;
}

ParamVector random_params(const AnsatzConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParamVector p(static_cast<std::size_t>(cfg.num_params()));
  for (auto& v : p) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    v = -std::numbers::pi + 2.0 * std::numbers::pi * u;
  }
  return p;
}

std::vector<VqeRunRecord> multi_start(const VqeProblem& problem, const OptimizerSettings& settings) {
  if (settings.restarts < 1) throw std::invalid_argument("multi_start: restarts must be >= 1");
  std::vector<VqeRunRecord> records(static_cast<std::size_t>(settings.restarts));
  const int threads = settings.threads > 0 ? settings.threads : thread_count();
  parallel_for(records.size(), threads, [&](std::size_t i) {
    const std::uint64_t seed = mix_seed(settings.seed, i);
    VqeRunRecord rec = optimize(problem, random_params(problem.objective().config(), seed), settings);
    rec.restart = static_cast<int>(i);
    rec.seed = seed;
    records[i] = std::move(rec);
  });
  classify_outliers(records, settings.energy_factor, settings.int_tol);
  return records;
}

void classify_outliers(std::vector<VqeRunRecord>& records, double energy_factor, double int_tol) {
  if (records.empty()) throw std::invalid_argument("classify_outliers: empty record list");
  double e_min = std::numeric_limits<double>::infinity();
  for (const auto& r : records) e_min = std::min(e_min, r.energy);
  const double threshold = e_min + energy_factor * std::abs(e_min);
  for (auto& r : records) {
    bool non_integer = false;
    for (double d : r.delta_n) {
      if (std::abs(d - std::round(d)) > int_tol) non_integer = true;
    }
    r.outlier = r.energy > threshold || non_integer;
  }
}

std::optional<std::size_t> best_record(const std::vector<VqeRunRecord>& records) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.outlier) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = records[*best];
    if (r.energy < b.energy || (r.energy == b.energy && r.restart < b.restart)) best = i;
  }
  return best;
}

}  // namespace svqe
