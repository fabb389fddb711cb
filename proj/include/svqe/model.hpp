#pragma once

#include <cstdint>
#include <vector>

#include "svqe/pauli_sum.hpp"

namespace svqe {

/**
 * Dimensionless parameters of the gauge-eliminated multi-flavor Schwinger
 * Hamiltonian on an open chain of N staggered sites with F flavors.
 *
 * Qubits are laid out site-major: qubit j = n*F + f. Qubit state |1> means
 * the fermion mode is occupied and is the +1 eigenstate of Z, so the
 * number operator is (Z + I)/2.
 *
 * The bare lattice quantities relate through x = 1/(ag)^2,
 * mu_f = 2 sqrt(x) m_f / g and nu_f = 2 sqrt(x) kappa_f / g.
 */
struct ModelParams {
  int sites = 2;
  int flavors = 3;
  double x = 1.0;
  std::vector<double> mu;
  std::vector<double> nu;

  int num_qubits() const { return sites * flavors; }
  int qubit(int site, int flavor) const { return site * flavors + flavor; }

  /// Throws std::invalid_argument when any invariant is violated.
  void validate() const;

  /// nu_f == -nu_{F-1-f} and mu_f == mu_{F-1-f} for every flavor.
  bool has_flip_reflection_symmetry(double tol = 0.0) const;
};

/// Spin Hamiltonian W (simplified, Hermitian, identity offset retained).
PauliSum build_hamiltonian(const ModelParams& p);

/// Staggered charge Q_n of one site in spin form.
PauliSum site_charge_operator(const ModelParams& p, int site);

/// Sum_n Q_n; equals (number of up spins) - M/2.
PauliSum total_charge_operator(const ModelParams& p);

/// (1/2) Sum_n (Z_{nF+f} - Z_{nF+1}); the zero operator for f = 1.
PauliSum delta_n_operator(const ModelParams& p, int flavor);

/**
 * Global spin flip followed by reflection about the chain center:
 * S = R X^{(x)M}, where R maps qubit j to M-1-j. S is a real permutation
 * matrix and an involution.
 */
class FlipReflection {
 public:
  explicit FlipReflection(int num_qubits);

  int num_qubits() const { return num_qubits_; }

  /// Basis index reached from `b`: reverse(~b).
  std::uint64_t map_basis(std::uint64_t b) const;

  /// S P S^dagger for a single word: X -> X, Y -> -Y, Z -> -Z, mirrored.
  std::pair<double, PauliWord> conjugate(PauliWord w) const;
  PauliSum conjugate(const PauliSum& s) const;

  /// ||[W, S]|| measured as the coefficient one-norm of W - S W S^dagger.
  double commutator_norm(const PauliSum& w) const;

  /// Largest column one-norm of W - S W S^dagger acting on the Hamming-weight
  /// `weight` subspace (weight M/2 is zero total charge). Requires M <= 26.
  double sector_commutator_norm(const PauliSum& w, int weight) const;

 private:
  std::uint64_t reverse(std::uint64_t b) const;
  int num_qubits_;
};

}  // namespace svqe
