#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "repsim/linalg.hpp"
#include "repsim/pauli.hpp"

namespace repsim {

struct PauliTerm {
  double coeff;
  PauliString op;
};

enum class MeasBasis : uint8_t { Z, X, Y };

struct MeasurementGroup {
  std::vector<int> term_indices;
  std::vector<MeasBasis> basis;  // one entry per qubit
};

// Observable as a sum of real-coefficient Pauli terms, partitioned into
// simultaneously measurable (qubit-wise commuting) groups.
struct ObservableSpec {
  int n_qubits = 0;
  double identity_coeff = 0.0;
  std::vector<PauliTerm> terms;
  std::vector<MeasurementGroup> groups;

  void validate() const {
    for (const auto& g : groups) {
      if (static_cast<int>(g.basis.size()) != n_qubits)
        throw std::invalid_argument("group basis size mismatch");
      for (int ti : g.term_indices) {
        for (const auto& [q, l] : terms.at(ti).op.letters()) {
          MeasBasis want = l == PauliLetter::X ? MeasBasis::X
                           : l == PauliLetter::Y ? MeasBasis::Y
                                                 : MeasBasis::Z;
          if (g.basis.at(q) != want)
            throw std::invalid_argument("term incompatible with its group basis");
        }
      }
    }
  }

  Matrix matrix() const {
    size_t dim = size_t{1} << n_qubits;
    Matrix h(dim);
    for (size_t i = 0; i < dim; ++i) h.at(i, i) = identity_coeff;
    for (const auto& t : terms) h.add_scaled(pauli_matrix(t.op, n_qubits), t.coeff);
    return h;
  }

  double ground_energy() const { return eigh(matrix()).values.front(); }
};

// Tapered two-qubit Hamiltonian of caffeine, CAS(2,2)/STO-3G after the
// Jordan-Wigner transformation, coefficients in Hartree.
inline ObservableSpec caffeine_hamiltonian() {
  ObservableSpec h;
  h.n_qubits = 2;
  h.identity_coeff = -667.4554308557676;
  auto P = [](const std::string& s) { return PauliString::parse(s); };
  h.terms = {
      {-0.013168856506009949, P("X0")},
      {0.013168856506009949, P("X1")},
      {-0.1532273887412754, P("Z0")},
      {-0.1532273887412754, P("Z1")},
      {0.013169112223348517, P("X0Z1")},
      {-0.013169112223348517, P("Z0X1")},
      {0.025969183085931477, P("Z0Z1")},
      {-0.050192647768994174, P("Y0Y1")},
  };
  // four qubit-wise commuting groups: {Z0, Z1, Z0Z1}, {X0, X0Z1},
  // {X1, Z0X1}, {Y0Y1}; the identity term is added classically
  h.groups = {
      {{2, 3, 6}, {MeasBasis::Z, MeasBasis::Z}},
      {{0, 4}, {MeasBasis::X, MeasBasis::Z}},
      {{1, 5}, {MeasBasis::Z, MeasBasis::X}},
      {{7}, {MeasBasis::Y, MeasBasis::Y}},
  };
  h.validate();
  return h;
}

// Value of a Pauli term from measured logical bits in the group's basis.
inline int term_sign(const PauliString& op, const std::vector<int>& bits) {
  int sign = 1;
  for (const auto& [q, l] : op.letters())
    if (bits.at(q)) sign = -sign;
  return sign;
}

}  // namespace repsim
