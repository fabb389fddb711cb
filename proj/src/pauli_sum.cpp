#include "svqe/pauli_sum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace svqe {

namespace {

// i^k for k mod 4
Complex ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void check_qubit_count(int num_qubits) {
  if (num_qubits < 0 || num_qubits > kMaxQubits) {
    throw std::invalid_argument("PauliSum: qubit count out of range: " +
                                std::to_string(num_qubits));
  }
}

}  // namespace

Complex PauliWord::apply_phase(std::uint64_t b) const {
  int k = std::popcount(x & z) + 2 * std::popcount(z & ~b);
  return ipow(k);
}

PauliWord PauliWord::single(int qubit, char op) {
  if (qubit < 0 || qubit >= kMaxQubits) {
    throw std::out_of_range("PauliWord: qubit index out of range");
  }
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  switch (op) {
    case 'I': return {};
    case 'X': return {bit, 0};
    case 'Y': return {bit, bit};
    case 'Z': return {0, bit};
    default: throw std::invalid_argument(std::string("PauliWord: bad operator '") + op + "'");
  }
}

std::pair<Complex, PauliWord> multiply(PauliWord a, PauliWord b) {
  // P(x,z) = i^{|x&z|} X^x Z^z and Z^z1 X^x2 = (-1)^{|z1&x2|} X^x2 Z^z1.
  PauliWord r{a.x ^ b.x, a.z ^ b.z};
  int k = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) +
          2 * std::popcount(a.z & b.x) - std::popcount(r.x & r.z);
  return {ipow(k), r};
}

bool commutes(PauliWord a, PauliWord b) {
  return (std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) % 2 == 0;
}

std::string to_string(PauliWord w, int num_qubits) {
  std::string s(static_cast<std::size_t>(num_qubits), 'I');
  for (int q = 0; q < num_qubits; ++q) {
    const bool bx = (w.x >> q) & 1U;
    const bool bz = (w.z >> q) & 1U;
    s[q] = bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
  }
  return s;
}

PauliWord parse_word(std::string_view text) {
  if (text.size() > static_cast<std::size_t>(kMaxQubits)) {
    throw std::invalid_argument("parse_word: word longer than supported register");
  }
  PauliWord w;
  for (std::size_t q = 0; q < text.size(); ++q) {
    PauliWord s = PauliWord::single(static_cast<int>(q), text[q]);
    w.x |= s.x;
    w.z |= s.z;
  }
  return w;
}

PauliSum::PauliSum(int num_qubits) : num_qubits_(num_qubits) {
  check_qubit_count(num_qubits);
}

PauliSum::PauliSum(int num_qubits, std::vector<PauliTerm> terms)
    : num_qubits_(num_qubits), terms_(std::move(terms)) {
  check_qubit_count(num_qubits);
  const std::uint64_t mask =
      num_qubits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << num_qubits) - 1;
  for (const auto& t : terms_) {
    if (t.word.support() & ~mask) {
      throw std::invalid_argument("PauliSum: term acts outside the register");
    }
  }
}

PauliSum PauliSum::identity(int num_qubits, Complex coeff) {
  PauliSum s(num_qubits);
  s.add_term(coeff, PauliWord{});
  return s;
}

PauliSum PauliSum::single(int num_qubits, int qubit, char op, Complex coeff) {
  if (qubit < 0 || qubit >= num_qubits) {
    throw std::out_of_range("PauliSum::single: qubit index out of range");
  }
  PauliSum s(num_qubits);
  s.add_term(coeff, PauliWord::single(qubit, op));
  return s;
}

void PauliSum::add_term(Complex coeff, PauliWord word) {
  if (num_qubits_ < 64 && (word.support() >> num_qubits_) != 0) {
    throw std::invalid_argument("PauliSum: term acts outside the register");
  }
  terms_.push_back({coeff, word});
}

void PauliSum::add_term(Complex coeff, std::string_view word) {
  if (static_cast<int>(word.size()) != num_qubits_) {
    throw std::invalid_argument("PauliSum: word length " + std::to_string(word.size()) +
                                " does not match register size " +
                                std::to_string(num_qubits_));
  }
  add_term(coeff, parse_word(word));
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.num_qubits_ != num_qubits_) {
    throw std::invalid_argument("PauliSum: register size mismatch");
  }
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& other) {
  if (other.num_qubits_ != num_qubits_) {
    throw std::invalid_argument("PauliSum: register size mismatch");
  }
  terms_.reserve(terms_.size() + other.terms_.size());
  for (const auto& t : other.terms_) terms_.push_back({-t.coeff, t.word});
  return *this;
}

PauliSum& PauliSum::operator*=(Complex s) {
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("PauliSum: register size mismatch");
  }
  std::vector<PauliTerm> out;
  out.reserve(a.size() * b.size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      auto [phase, w] = multiply(ta.word, tb.word);
      out.push_back({ta.coeff * tb.coeff * phase, w});
    }
  }
  return PauliSum(a.num_qubits(), std::move(out));
}

PauliSum PauliSum::adjoint() const {
  PauliSum r(*this);
  for (auto& t : r.terms_) t.coeff = std::conj(t.coeff);
  return r;
}

Complex PauliSum::coefficient(PauliWord word) const {
  Complex c{0.0, 0.0};
  for (const auto& t : terms_) {
    if (t.word == word) c += t.coeff;
  }
  return c;
}

double PauliSum::one_norm() const {
  double n = 0.0;
  for (const auto& t : terms_) n += std::abs(t.coeff);
  return n;
}

double PauliSum::max_imag() const {
  double m = 0.0;
  const PauliSum merged = simplify(*this, 0.0);
  for (const auto& t : merged.terms()) m = std::max(m, std::abs(t.coeff.imag()));
  return m;
}

bool PauliSum::is_hermitian(double tol) const { return max_imag() < tol; }

PauliSum simplify(const PauliSum& s, double threshold) {
  std::vector<PauliTerm> sorted = s.terms();
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const PauliTerm& a, const PauliTerm& b) { return a.word < b.word; });
  std::vector<PauliTerm> out;
  for (const auto& t : sorted) {
    if (!out.empty() && out.back().word == t.word) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [threshold](const PauliTerm& t) {
    return std::abs(t.coeff) < threshold || t.coeff == Complex{0.0, 0.0};
  });
  return PauliSum(s.num_qubits(), std::move(out));
}

PauliSum commutator(const PauliSum& a, const PauliSum& b, double threshold) {
  if (a.num_qubits() != b.num_qubits()) {
    throw std::invalid_argument("commutator: register size mismatch");
  }
  // Commuting word pairs cancel exactly; anticommuting pairs contribute 2ab.
  std::vector<PauliTerm> out;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      if (commutes(ta.word, tb.word)) continue;
      auto [phase, w] = multiply(ta.word, tb.word);
      out.push_back({2.0 * ta.coeff * tb.coeff * phase, w});
    }
  }
  return simplify(PauliSum(a.num_qubits(), std::move(out)), threshold);
}

void write_pauli_sum(std::ostream& os, const PauliSum& s) {
  char buf[64];
  for (const auto& t : s.terms()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g ", t.coeff.real(), t.coeff.imag());
    os << buf << to_string(t.word, s.num_qubits()) << '\n';
  }
}

PauliSum read_pauli_sum(std::istream& is) {
  std::vector<std::pair<Complex, std::string>> rows;
  std::string line;
  int num_qubits = -1;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double re = 0.0;
    double im = 0.0;
    std::string word;
    if (!(ls >> re >> im >> word)) {
      throw std::runtime_error("read_pauli_sum: malformed line " + std::to_string(lineno));
    }
    if (num_qubits < 0) num_qubits = static_cast<int>(word.size());
    if (static_cast<int>(word.size()) != num_qubits) {
      throw std::runtime_error("read_pauli_sum: inconsistent word length on line " +
                               std::to_string(lineno));
    }
    rows.emplace_back(Complex{re, im}, std::move(word));
  }
  PauliSum s(std::max(num_qubits, 0));
  for (const auto& [c, w] : rows) s.add_term(c, w);
  return s;
}

}  // namespace svqe
