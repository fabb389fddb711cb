#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svqe/eigensolver.hpp"
#include "svqe/lbfgs.hpp"
#include "svqe/model.hpp"
#include "svqe/simulator.hpp"

namespace svqe {

/**
 * Shape of the layered ansatz. In the constrained form the entangling angle
 * of pair k equals that of pair M-2-k and the rotation angle of qubit k is
 * minus that of qubit M-1-k, which keeps every ansatz state invariant
 * under the flip-reflection symmetry.
 */
struct AnsatzConfig {
  int num_qubits = 6;
  int layers = 5;
  bool constrained = false;

  void validate() const;
  int entangling_per_layer() const;
  int rotations_per_layer() const;
  /// 2M-1 unconstrained, M/2 + ceil((M-1)/2) constrained.
  int params_per_layer() const { return entangling_per_layer() + rotations_per_layer(); }
  int num_params() const { return layers * params_per_layer(); }
};

/// Free parameters, layer-major; entangling before rotations inside a layer.
using ParamVector = std::vector<double>;

std::vector<LayerAngles> expand_params(const AnsatzConfig& cfg, const ParamVector& free);

/// Chain rule back to free parameters: `expanded` is laid out like an
/// unconstrained ParamVector (per layer M-1 entangling, then M rotations).
ParamVector pull_back_gradient(const AnsatzConfig& cfg, const std::vector<double>& expanded);

/**
 * Cost function and adjoint gradient of the ansatz against one Hamiltonian,
 * with the Hamiltonian compiled once for repeated evaluation.
 */
class AnsatzObjective {
 public:
  AnsatzObjective(const PauliSum& h, AnsatzConfig cfg);

  const AnsatzConfig& config() const { return cfg_; }

  StateVector state(const ParamVector& free) const;
  double cost(const ParamVector& free) const;
  /// Returns the cost and fills `grad` with d cost / d free.
  double cost_and_gradient(const ParamVector& free, ParamVector& grad) const;
  /// Gradient with respect to every expanded gate angle.
  std::vector<double> expanded_gradient(const std::vector<LayerAngles>& layers,
                                        double* cost_out = nullptr) const;

 private:
  AnsatzConfig cfg_;
  CompiledOperator h_;
};

double cost(const PauliSum& h, const AnsatzConfig& cfg, const ParamVector& free);
ParamVector gradient(const PauliSum& h, const AnsatzConfig& cfg, const ParamVector& free);

struct VqeRunRecord {
  int restart = 0;
  std::uint64_t seed = 0;
  double energy = 0.0;
  ParamVector params;
  std::vector<double> delta_n;  ///< one entry per flavor; flavor 1 is the reference
  double overlap = 0.0;         ///< ground-space overlap with the baseline (0 without one)
  bool converged = false;
  bool outlier = false;
  int iterations = 0;
  double grad_norm = 0.0;
  std::string termination;
};

struct OptimizerSettings {
  LbfgsOptions lbfgs;
  int restarts = 10;
  std::uint64_t seed = 12345;
  double energy_factor = 0.3;
  double int_tol = 0.05;
  double degeneracy_tol = kDegeneracyTolerance;
  int threads = 0;  ///< 0: thread_count()
};

/// Everything one VQE point needs: model, Hamiltonian, observables, baseline.
class VqeProblem {
 public:
  VqeProblem(const ModelParams& model, AnsatzConfig cfg,
             std::optional<SpectrumResult> baseline = std::nullopt);

  const ModelParams& model() const { return model_; }
  const PauliSum& hamiltonian() const { return hamiltonian_; }
  const AnsatzObjective& objective() const { return objective_; }
  const std::optional<SpectrumResult>& baseline() const { return baseline_; }

  std::vector<double> delta_n(const StateVector& s) const;

 private:
  ModelParams model_;
  PauliSum hamiltonian_;
  AnsatzObjective objective_;
  std::vector<CompiledOperator> delta_n_ops_;
  std::optional<SpectrumResult> baseline_;
};

/// Single L-BFGS run from `init`. Line-search failures yield converged=false.
VqeRunRecord optimize(const VqeProblem& problem, const ParamVector& init,
                      const OptimizerSettings& settings);

/// Uniform draws in [-pi, pi) from a seed, identical on every platform.
ParamVector random_params(const AnsatzConfig& cfg, std::uint64_t seed);

/// `restarts` independent runs; restart i uses seed mix_seed(seed, i).
/// The result depends only on (problem, settings), never on thread scheduling.
std::vector<VqeRunRecord> multi_start(const VqeProblem& problem, const OptimizerSettings& settings);

/**
 * Marks record i as an outlier iff E_i > E_min + energy_factor * |E_min| or
 * some |dN_f - round(dN_f)| > int_tol, with E_min the batch minimum.
 */
void classify_outliers(std::vector<VqeRunRecord>& records, double energy_factor = 0.3,
                       double int_tol = 0.05);

/// Index of the lowest-energy non-outlier (ties: lower restart), if any.
std::optional<std::size_t> best_record(const std::vector<VqeRunRecord>& records);

}  // namespace svqe
