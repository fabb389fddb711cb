#include "svqe/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>

namespace svqe {

namespace {

void check_register(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 30) {
    throw std::invalid_argument("StateVector: qubit count must be in [1, 30], got " +
                                std::to_string(num_qubits));
  }
}

void check_same_register(const StateVector& a, const StateVector& b, const char* what) {
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
  check_register(num_qubits);
  amps_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector::StateVector(int num_qubits, std::vector<Complex> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
  check_register(num_qubits);
  if (amps_.size() != (std::size_t{1} << num_qubits)) {
    throw std::invalid_argument("StateVector: amplitude count is not 2^M");
  }
}

StateVector StateVector::basis_state(int num_qubits, std::uint64_t index) {
  StateVector s(num_qubits);
  if (index >= s.dim()) throw std::out_of_range("StateVector: basis index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double StateVector::norm() const {
  double n = 0.0;
  for (const auto& a : amps_) n += std::norm(a);
  return std::sqrt(n);
}

void StateVector::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("StateVector: cannot normalize the zero vector");
  for (auto& a : amps_) a /= n;
}

StateVector neel_state(int num_qubits) {
  std::uint64_t index = 0;
  for (int j = 0; j < num_qubits; j += 2) index |= std::uint64_t{1} << j;
  return StateVector::basis_state(num_qubits, index);
}

void apply_rz(StateVector& s, int qubit, double theta) {
  if (qubit < 0 || qubit >= s.num_qubits()) {
    throw std::out_of_range("apply_rz: qubit out of range");
  }
  const Complex up = std::polar(1.0, -0.5 * theta);  // bit = 1 (Z = +1)
  const Complex down = std::conj(up);
  const std::size_t bit = std::size_t{1} << qubit;
  auto amps = s.amplitudes();
  for (std::size_t b = 0; b < amps.size(); ++b) {
    amps[b] *= (b & bit) ? up : down;
  }
}

void apply_z(StateVector& s, int qubit) {
  if (qubit < 0 || qubit >= s.num_qubits()) {
    throw std::out_of_range("apply_z: qubit out of range");
  }
  const std::size_t bit = std::size_t{1} << qubit;
  auto amps = s.amplitudes();
  for (std::size_t b = 0; b < amps.size(); ++b) {
    if (!(b & bit)) amps[b] = -amps[b];
  }
}

namespace {

// Calls fn(i01, i10) for every amplitude pair differing in qubits (k, k+1)
// where qubit k is 0 in the first index and 1 in the second.
template <typename Fn>
void for_each_hop_pair(std::size_t dim, int k, Fn&& fn) {
  const std::size_t lo = std::size_t{1} << k;
  const std::size_t hi = lo << 1;
  for (std::size_t b = 0; b < dim; ++b) {
    if ((b & lo) == 0 && (b & hi) != 0) fn(b, b ^ lo ^ hi);
  }
}

}  // namespace

void apply_xxyy(StateVector& s, int qubit, double theta) {
  if (qubit < 0 || qubit + 1 >= s.num_qubits()) {
    throw std::out_of_range("apply_xxyy: qubit pair out of range");
  }
  const double c = std::cos(theta);
  const Complex mis{0.0, -std::sin(theta)};
  auto amps = s.amplitudes();
  for_each_hop_pair(amps.size(), qubit, [&](std::size_t a, std::size_t b) {
    const Complex va = amps[a];
    const Complex vb = amps[b];
    amps[a] = c * va + mis * vb;
    amps[b] = mis * va + c * vb;
  });
}

void apply_xxyy_generator(StateVector& s, int qubit) {
  if (qubit < 0 || qubit + 1 >= s.num_qubits()) {
    throw std::out_of_range("apply_xxyy_generator: qubit pair out of range");
  }
  auto amps = s.amplitudes();
  const std::size_t lo = std::size_t{1} << qubit;
  const std::size_t hi = lo << 1;
  for (std::size_t b = 0; b < amps.size(); ++b) {
    const bool bl = b & lo;
    const bool bh = b & hi;
    if (bl == bh) amps[b] = 0.0;
  }
  for_each_hop_pair(amps.size(), qubit, [&](std::size_t a, std::size_t b) {
    const Complex va = amps[a];
    amps[a] = 2.0 * amps[b];
    amps[b] = 2.0 * va;
  });
}

Complex matrix_element_z(const StateVector& bra, const StateVector& ket, int qubit) {
  check_same_register(bra, ket, "matrix_element_z");
  if (qubit < 0 || qubit >= ket.num_qubits()) {
    throw std::out_of_range("matrix_element_z: qubit out of range");
  }
  const std::size_t bit = std::size_t{1} << qubit;
  auto a = bra.amplitudes();
  auto b = ket.amplitudes();
  Complex r{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex t = std::conj(a[i]) * b[i];
    r += (i & bit) ? t : -t;
  }
  return r;
}

Complex matrix_element_xxyy(const StateVector& bra, const StateVector& ket, int qubit) {
  check_same_register(bra, ket, "matrix_element_xxyy");
  if (qubit < 0 || qubit + 1 >= ket.num_qubits()) {
    throw std::out_of_range("matrix_element_xxyy: qubit pair out of range");
  }
  auto a = bra.amplitudes();
  auto b = ket.amplitudes();
  Complex r{0.0, 0.0};
  for_each_hop_pair(a.size(), qubit, [&](std::size_t i, std::size_t j) {
    r += std::conj(a[i]) * b[j] + std::conj(a[j]) * b[i];
  });
  return 2.0 * r;
}

LayerAngles LayerAngles::zeros(int num_qubits) {
  return {std::vector<double>(static_cast<std::size_t>(num_qubits - 1), 0.0),
          std::vector<double>(static_cast<std::size_t>(num_qubits), 0.0)};
}

void apply_ansatz(StateVector& s, std::span<const LayerAngles> layers) {
  const int m = s.num_qubits();
  for (const auto& layer : layers) {
    if (static_cast<int>(layer.entangling.size()) != m - 1 ||
        static_cast<int>(layer.rotation.size()) != m) {
      throw std::invalid_argument("apply_ansatz: layer angles not sized for the register");
    }
  }
  for (const auto& layer : layers) {
    for (int k = 0; k + 1 < m; k += 2) apply_xxyy(s, k, layer.entangling[k]);
    for (int k = 1; k + 1 < m; k += 2) apply_xxyy(s, k, layer.entangling[k]);
    for (int k = 0; k < m; ++k) apply_rz(s, k, layer.rotation[k]);
  }
}

StateVector apply_ansatz(const StateVector& psi0, std::span<const LayerAngles> layers) {
  StateVector s = psi0;
  apply_ansatz(s, layers);
  return s;
}

CompiledOperator::CompiledOperator(const PauliSum& op) : num_qubits_(op.num_qubits()) {
  check_register(num_qubits_);
  const std::size_t dim = std::size_t{1} << num_qubits_;
  std::map<std::uint64_t, std::vector<Term>> by_x;
  std::vector<Term> diagonal;
  for (const auto& t : op.terms()) {
    // i^{|x&z|} folded into the coefficient; the remaining sign is (-1)^{|z & ~b|}.
    const Complex phase = t.word.apply_phase(~std::uint64_t{0});
    const Term term{t.coeff * phase, t.word.z};
    if (t.word.is_diagonal()) {
      diagonal.push_back(term);
    } else {
      by_x[t.word.x].push_back(term);
    }
  }
  if (!diagonal.empty()) {
    diag_.assign(dim, Complex{0.0, 0.0});
    for (std::size_t b = 0; b < dim; ++b) {
      Complex v{0.0, 0.0};
      for (const auto& t : diagonal) {
        v += (std::popcount(t.z & ~b) % 2 == 0) ? t.coeff : -t.coeff;
      }
      diag_[b] = v;
    }
  }
  for (auto& [x, terms] : by_x) groups_.push_back({x, std::move(terms)});
}

void CompiledOperator::apply(const StateVector& in, StateVector& out) const {
  if (in.num_qubits() != num_qubits_) {
    throw std::invalid_argument("CompiledOperator: dimension mismatch");
  }
  if (out.num_qubits() != num_qubits_) out = StateVector(num_qubits_);
  auto src = in.amplitudes();
  auto dst = out.amplitudes();
  const std::size_t dim = src.size();
  if (diag_.empty()) {
    std::fill(dst.begin(), dst.end(), Complex{0.0, 0.0});
  } else {
    for (std::size_t b = 0; b < dim; ++b) dst[b] = diag_[b] * src[b];
  }
  for (const auto& g : groups_) {
    for (std::size_t b = 0; b < dim; ++b) {
      Complex c{0.0, 0.0};
      for (const auto& t : g.terms) {
        c += (std::popcount(t.z & ~b) % 2 == 0) ? t.coeff : -t.coeff;
      }
      dst[b ^ g.x] += c * src[b];
    }
  }
}

StateVector CompiledOperator::apply(const StateVector& in) const {
  StateVector out(num_qubits_);
  apply(in, out);
  return out;
}

Complex CompiledOperator::expectation_complex(const StateVector& s) const {
  if (s.num_qubits() != num_qubits_) {
    throw std::invalid_argument("CompiledOperator: dimension mismatch");
  }
  auto a = s.amplitudes();
  const std::size_t dim = a.size();
  Complex e{0.0, 0.0};
  if (!diag_.empty()) {
    for (std::size_t b = 0; b < dim; ++b) e += diag_[b] * std::norm(a[b]);
  }
  for (const auto& g : groups_) {
    for (std::size_t b = 0; b < dim; ++b) {
      Complex c{0.0, 0.0};
      for (const auto& t : g.terms) {
        c += (std::popcount(t.z & ~b) % 2 == 0) ? t.coeff : -t.coeff;
      }
      e += std::conj(a[b ^ g.x]) * c * a[b];
    }
  }
  return e;
}

double expectation(const StateVector& s, const CompiledOperator& op) {
  const Complex e = op.expectation_complex(s);
  if (std::abs(e.imag()) > kImagTolerance) {
    throw NonHermitianError("expectation: imaginary part " + std::to_string(e.imag()) +
                            " exceeds tolerance; operator is not Hermitian");
  }
  return e.real();
}

double expectation(const StateVector& s, const PauliSum& op) {
  if (s.num_qubits() != op.num_qubits()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return expectation(s, CompiledOperator(op));
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  check_same_register(a, b, "inner_product");
  Complex r{0.0, 0.0};
  auto x = a.amplitudes();
  auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) r += std::conj(x[i]) * y[i];
  return r;
}

double overlap(const StateVector& a, const StateVector& b) {
  return std::norm(inner_product(a, b));
}

void write_state_text(std::ostream& os, const StateVector& s, double cutoff) {
  char buf[96];
  auto a = s.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) <= cutoff) continue;
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g\n", i, a[i].real(), a[i].imag());
    os << buf;
  }
}

}  // namespace svqe
