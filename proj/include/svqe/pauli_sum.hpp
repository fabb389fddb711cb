#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace svqe {

using Complex = std::complex<double>;

/// Largest register a PauliWord can describe (one bit per qubit in a uint64).
inline constexpr int kMaxQubits = 63;

/**
 * A Pauli string in symplectic form.
 *
 * Bit q of `x` / `z` selects the X / Z factor on qubit q. The operator
 * represented is the tensor product of per-qubit factors
 *   (x,z) = (0,0) -> I, (1,0) -> X, (0,1) -> Z, (1,1) -> Y
 * with Y = i X Z, so that the usual Pauli algebra (XY = iZ, ...) holds.
 *
 * Basis convention: |1> is the +1 eigenstate of Z. Acting on the
 * computational basis state whose integer index is `b` (qubit q <-> bit q),
 *   P |b> = i^{|x & z|} (-1)^{|z & ~b|} |b ^ x>.
 */
struct PauliWord {
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  friend bool operator==(const PauliWord&, const PauliWord&) = default;
  friend auto operator<=>(const PauliWord&, const PauliWord&) = default;

  bool is_identity() const { return x == 0 && z == 0; }
  bool is_diagonal() const { return x == 0; }
  std::uint64_t support() const { return x | z; }

  /// Sign/phase and target of P|b>.
  Complex apply_phase(std::uint64_t b) const;

  static PauliWord single(int qubit, char op);
};

/// Product of two words: returns (phase, word) with a*b = phase * word.
std::pair<Complex, PauliWord> multiply(PauliWord a, PauliWord b);

/// True when the two words commute.
bool commutes(PauliWord a, PauliWord b);

/// Word as an M-character string over IXYZ, qubit 0 leftmost.
std::string to_string(PauliWord w, int num_qubits);
PauliWord parse_word(std::string_view text);

struct PauliTerm {
  Complex coeff{0.0, 0.0};
  PauliWord word;
};

/// Coefficient magnitude below which simplify() discards a term.
inline constexpr double kDefaultDropThreshold = 1e-14;

/**
 * Weighted sum of Pauli words on a fixed register size.
 *
 * Arithmetic never simplifies implicitly; call simplify() to merge
 * duplicate words and drop negligible coefficients.
 */
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int num_qubits);
  PauliSum(int num_qubits, std::vector<PauliTerm> terms);

  static PauliSum identity(int num_qubits, Complex coeff = 1.0);
  static PauliSum single(int num_qubits, int qubit, char op, Complex coeff = 1.0);

  int num_qubits() const { return num_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  void add_term(Complex coeff, PauliWord word);
  void add_term(Complex coeff, std::string_view word);

  PauliSum& operator+=(const PauliSum& other);
  PauliSum& operator-=(const PauliSum& other);
  PauliSum& operator*=(Complex s);

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, Complex s) { return a *= s; }
  friend PauliSum operator*(Complex s, PauliSum a) { return a *= s; }
  friend PauliSum operator*(const PauliSum& a, const PauliSum& b);

  /// Hermitian conjugate (conjugates coefficients; Pauli words are Hermitian).
  PauliSum adjoint() const;

  /// Coefficient of `word` after summing duplicates (zero if absent).
  Complex coefficient(PauliWord word) const;

  /// Sum of |coeff| over terms.
  double one_norm() const;

  /// Largest |Im coeff| after simplification.
  double max_imag() const;
  bool is_hermitian(double tol = 1e-14) const;

 private:
  int num_qubits_ = 0;
  std::vector<PauliTerm> terms_;
};

/// Collects equal words (sorted by word) and drops |coeff| < threshold.
PauliSum simplify(const PauliSum& s, double threshold = kDefaultDropThreshold);

/// [a, b] = ab - ba, simplified.
PauliSum commutator(const PauliSum& a, const PauliSum& b,
                    double threshold = kDefaultDropThreshold);

/// One line per term: `<re> <im> <word>`, 17 significant digits.
void write_pauli_sum(std::ostream& os, const PauliSum& s);
PauliSum read_pauli_sum(std::istream& is);

}  // namespace svqe
