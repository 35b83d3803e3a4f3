#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace repsim {

using cplx = std::complex<double>;

enum class PauliLetter : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char letter_char(PauliLetter l) {
  switch (l) {
    case PauliLetter::I: return 'I';
    case PauliLetter::X: return 'X';
    case PauliLetter::Y: return 'Y';
    case PauliLetter::Z: return 'Z';
  }
  return '?';
}

// Signed tensor product of single-qubit Paulis over indexed qubits.
// The phase is stored as an exponent of i, so phase_exp in {0,1,2,3}
// encodes {+1, +i, -1, -i}.
class PauliString {
public:
  PauliString() = default;

  static PauliString identity() { return PauliString(); }

  static PauliString single(int qubit, PauliLetter l) {
    PauliString p;
    p.set(qubit, l);
    return p;
  }

  static PauliString x(int qubit) { return single(qubit, PauliLetter::X); }
  static PauliString y(int qubit) { return single(qubit, PauliLetter::Y); }
  static PauliString z(int qubit) { return single(qubit, PauliLetter::Z); }

  // Parse strings like "X0 Z2" or "-iY1".
  static PauliString parse(const std::string& text) {
    PauliString p;
    size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      if (text[i] == '-') p.phase_exp_ = 2;
      ++i;
    }
    if (i < text.size() && text[i] == 'i') {
      p.phase_exp_ = (p.phase_exp_ + 1) % 4;
      ++i;
    }
    while (i < text.size()) {
      char c = text[i];
      if (c == ' ') { ++i; continue; }
      PauliLetter l;
      switch (c) {
        case 'I': l = PauliLetter::I; break;
        case 'X': l = PauliLetter::X; break;
        case 'Y': l = PauliLetter::Y; break;
        case 'Z': l = PauliLetter::Z; break;
        default: throw std::invalid_argument("bad pauli letter in: " + text);
      }
      ++i;
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j == i) throw std::invalid_argument("missing qubit index in: " + text);
      int q = std::stoi(text.substr(i, j - i));
      i = j;
      p.set(q, l);
    }
    return p;
  }

  PauliLetter at(int qubit) const {
    auto it = letters_.find(qubit);
    return it == letters_.end() ? PauliLetter::I : it->second;
  }

  void set(int qubit, PauliLetter l) {
    if (l == PauliLetter::I) {
      letters_.erase(qubit);
    } else {
      letters_[qubit] = l;
    }
  }

  const std::map<int, PauliLetter>& letters() const { return letters_; }

  int weight() const { return static_cast<int>(letters_.size()); }

  bool is_identity() const { return letters_.empty() && phase_exp_ == 0; }

  int phase_exp() const { return phase_exp_; }
  void set_phase_exp(int e) { phase_exp_ = ((e % 4) + 4) % 4; }

  cplx phase() const {
    static const std::array<cplx, 4> ph = {cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};
    return ph[phase_exp_];
  }

  bool phase_is_real() const { return phase_exp_ == 0 || phase_exp_ == 2; }

  // Product of single-qubit Paulis: returns (result letter, extra i-exponent).
  // XY = iZ, YZ = iX, ZX = iY and cyclic anticommutation partners.
  static std::pair<PauliLetter, int> mul_letters(PauliLetter a, PauliLetter b) {
    if (a == PauliLetter::I) return {b, 0};
    if (b == PauliLetter::I) return {a, 0};
    if (a == b) return {PauliLetter::I, 0};
    int ia = static_cast<int>(a), ib = static_cast<int>(b);
    // levi-civita sign on (X,Y,Z) = (1,2,3)
    int ic = 6 - ia - ib;
    bool forward = (ib - ia + 3) % 3 == 1;  // X->Y->Z->X order
    return {static_cast<PauliLetter>(ic), forward ? 1 : 3};
  }

  PauliString operator*(const PauliString& o) const {
    PauliString r;
    r.phase_exp_ = (phase_exp_ + o.phase_exp_) % 4;
    r.letters_ = letters_;
    for (const auto& [q, l] : o.letters_) {
      auto [res, ph] = mul_letters(r.at(q), l);
      r.phase_exp_ = (r.phase_exp_ + ph) % 4;
      r.set(q, res);
    }
    return r;
  }

  bool commutes_with(const PauliString& o) const {
    int anti = 0;
    for (const auto& [q, l] : letters_) {
      PauliLetter m = o.at(q);
      if (m != PauliLetter::I && m != l) ++anti;
    }
    return anti % 2 == 0;
  }

  bool operator==(const PauliString& o) const {
    return phase_exp_ == o.phase_exp_ && letters_ == o.letters_;
  }
  bool operator!=(const PauliString& o) const { return !(*this == o); }

  std::string str() const {
    std::string s;
    switch (phase_exp_) {
      case 0: break;
      case 1: s += "i"; break;
      case 2: s += "-"; break;
      case 3: s += "-i"; break;
    }
    if (letters_.empty()) {
      s += "I";
      return s;
    }
    bool first = true;
    for (const auto& [q, l] : letters_) {
      if (!first) s += ' ';
      first = false;
      s += letter_char(l);
      s += std::to_string(q);
    }
    return s;
  }

private:
  int phase_exp_ = 0;
  std::map<int, PauliLetter> letters_;
};

}  // namespace repsim
