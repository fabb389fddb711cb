#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "svqe/pauli_sum.hpp"

namespace svqe {

/// Raised when an expectation value of a supposedly Hermitian operator has a
/// non-negligible imaginary part.
class NonHermitianError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Pure state of M qubits. Amplitude index bit q is the value of qubit q
 * (qubit 0 is the least-significant bit), and |1> is the Z = +1 state.
 */
class StateVector {
 public:
  StateVector() = default;
  /// |00...0>
  explicit StateVector(int num_qubits);
  StateVector(int num_qubits, std::vector<Complex> amplitudes);

  static StateVector basis_state(int num_qubits, std::uint64_t index);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }

  std::span<Complex> amplitudes() { return amps_; }
  std::span<const Complex> amplitudes() const { return amps_; }
  Complex& operator[](std::size_t i) { return amps_[i]; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;
  void normalize();

 private:
  int num_qubits_ = 0;
  std::vector<Complex> amps_;
};

/// |1010...>: qubit j is 1 for even j.
StateVector neel_state(int num_qubits);

/// exp(-i theta/2 Z_j).
void apply_rz(StateVector& s, int qubit, double theta);

/// exp(-i theta/2 (X_k X_{k+1} + Y_k Y_{k+1})); mixes only |01>,|10> of (k,k+1).
void apply_xxyy(StateVector& s, int qubit, double theta);

/// (X_k X_{k+1} + Y_k Y_{k+1}) applied in place (generator of apply_xxyy).
void apply_xxyy_generator(StateVector& s, int qubit);
/// Z_j applied in place.
void apply_z(StateVector& s, int qubit);

/// <bra| Z_j |ket>
Complex matrix_element_z(const StateVector& bra, const StateVector& ket, int qubit);
/// <bra| X_k X_{k+1} + Y_k Y_{k+1} |ket>
Complex matrix_element_xxyy(const StateVector& bra, const StateVector& ket, int qubit);

/// Angles of one ansatz layer for M qubits.
struct LayerAngles {
  std::vector<double> entangling;  ///< M-1 angles, pair (k, k+1)
  std::vector<double> rotation;    ///< M angles, single-qubit Z rotations

  static LayerAngles zeros(int num_qubits);
};

/// Applies, layer by layer: even-pair entanglers, odd-pair entanglers, then Z rotations.
void apply_ansatz(StateVector& s, std::span<const LayerAngles> layers);
StateVector apply_ansatz(const StateVector& psi0, std::span<const LayerAngles> layers);

/**
 * A PauliSum prepared for repeated application to states: Z-only terms are
 * folded into one diagonal, the remaining terms are grouped by X mask.
 */
class CompiledOperator {
 public:
  explicit CompiledOperator(const PauliSum& op);

  int num_qubits() const { return num_qubits_; }

  /// out = O |in>
  void apply(const StateVector& in, StateVector& out) const;
  StateVector apply(const StateVector& in) const;

  /// <s|O|s>, complex.
  Complex expectation_complex(const StateVector& s) const;

 private:
  struct Term {
    Complex coeff;  // includes the i^{|x&z|} factor
    std::uint64_t z;
  };
  struct Group {
    std::uint64_t x;
    std::vector<Term> terms;
  };
  int num_qubits_;
  std::vector<Complex> diag_;
  std::vector<Group> groups_;
};

/// Tolerance on |Im <s|O|s>| before a Hermitian operator is rejected.
inline constexpr double kImagTolerance = 1e-10;

/// Real <s|O|s>; throws NonHermitianError when |Im| exceeds kImagTolerance.
double expectation(const StateVector& s, const PauliSum& op);
double expectation(const StateVector& s, const CompiledOperator& op);

/// <a|b>
Complex inner_product(const StateVector& a, const StateVector& b);
/// |<a|b>|^2
double overlap(const StateVector& a, const StateVector& b);

/// Text dump: one `index re im` line per amplitude with modulus above `cutoff`.
void write_state_text(std::ostream& os, const StateVector& s, double cutoff = 1e-12);

}  // namespace svqe
