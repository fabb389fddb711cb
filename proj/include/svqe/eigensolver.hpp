#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "svqe/model.hpp"
#include "svqe/pauli_sum.hpp"
#include "svqe/simulator.hpp"

namespace svqe {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operator moves weight out of the requested Hamming-weight sector.
class SectorLeakageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * All M-bit basis states with exactly `weight` set bits, in ascending
 * integer order. The zero-total-charge sector is weight M/2.
 */
class SectorBasis {
 public:
  SectorBasis(int num_qubits, int weight);

  int num_qubits() const { return num_qubits_; }
  int weight() const { return weight_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<std::uint64_t>& states() const { return states_; }
  std::uint64_t state(std::size_t i) const { return states_[i]; }

  /// Position of `bits` in states(), or -1 when it lies outside the sector.
  std::int64_t index_of(std::uint64_t bits) const {
    return bits < lookup_.size() ? lookup_[bits] : -1;
  }

  /// Embeds a sector vector into the full 2^M space.
  StateVector embed(const Eigen::VectorXcd& v) const;
  /// Restricts a full state to the sector (components outside are discarded).
  Eigen::VectorXcd restrict(const StateVector& s) const;

 private:
  int num_qubits_;
  int weight_;
  std::vector<std::uint64_t> states_;
  std::vector<std::int32_t> lookup_;
};

SectorBasis zero_charge_sector(const ModelParams& p);

/// A PauliSum restricted to one Hamming-weight sector, applied matrix-free.
class SectorOperator {
 public:
  /// Throws SectorLeakageError if the operator couples the sector to its complement.
  SectorOperator(const PauliSum& h, const SectorBasis& basis, double leak_tol = 1e-10);

  std::size_t dim() const { return diag_.size(); }
  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  Eigen::MatrixXcd dense() const;

 private:
  struct Hop {
    std::uint64_t x;
    std::vector<PauliTerm> terms;  // coefficients already carry i^{|x&z|}
  };
  const SectorBasis* basis_;
  std::vector<Complex> diag_;
  std::vector<Hop> hops_;
};

struct SpectrumResult {
  std::vector<double> energies;      ///< ascending
  std::vector<StateVector> vectors;  ///< embedded in the full space
  std::vector<double> residuals;     ///< ||Hv - Ev|| per level

  /// energies[1] - energies[0], or 0 when fewer than two levels were computed.
  double gap() const { return energies.size() >= 2 ? energies[1] - energies[0] : 0.0; }
};

struct EigensolverOptions {
  std::size_t dense_limit = 4096;  ///< dense solve at or below this sector size
  int max_krylov = 300;
  double ritz_tol = 1e-12;      ///< change in the lowest Ritz value between iterations
  double residual_tol = 1e-8;   ///< accepted ||Hv - Ev||
  std::uint64_t seed = 0x5eed;  ///< start vectors
};

/// Lowest `k` eigenpairs of `h` within `basis`.
SpectrumResult ground_state(const PauliSum& h, const SectorBasis& basis, int k = 4,
                            const EigensolverOptions& opts = {});

/// Always runs the Lanczos path (for cross-checking the dense solve).
SpectrumResult lanczos_lowest(const SectorOperator& op, const SectorBasis& basis, int k,
                              const EigensolverOptions& opts = {});

/**
 * Matrix of the dimensionless Hamiltonian built directly on fermion
 * occupation states (bit j of a state is mode j = nF+f occupied), with
 * creation/annihilation signs (-1)^{number of occupied modes below j}.
 * Does not use any Pauli representation.
 */
Eigen::MatrixXcd oracle_hamiltonian(const ModelParams& p, const SectorBasis& basis);

/// Default energy window for treating levels as degenerate with the ground state.
inline constexpr double kDegeneracyTolerance = 1e-6;

/// Sum_d |<v_d|psi>|^2 over levels within `degeneracy_tol` of the lowest.
double ground_space_overlap(const StateVector& psi, const SpectrumResult& spec,
                            double degeneracy_tol = kDegeneracyTolerance);

/// Number of levels within `degeneracy_tol` of the lowest.
int ground_degeneracy(const SpectrumResult& spec, double degeneracy_tol = kDegeneracyTolerance);

}  // namespace svqe
