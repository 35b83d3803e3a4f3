#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "repsim/pauli.hpp"

namespace repsim {

enum class GateKind : uint8_t { I, X, Y, Z, H, S, Sdg, Rz, Rx, Ry, Cnot, Cz };

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::I: return "I";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "Sdg";
    case GateKind::Rz: return "Rz";
    case GateKind::Rx: return "Rx";
    case GateKind::Ry: return "Ry";
    case GateKind::Cnot: return "CNOT";
    case GateKind::Cz: return "CZ";
  }
  return "?";
}

inline bool is_two_qubit(GateKind k) { return k == GateKind::Cnot || k == GateKind::Cz; }

struct Gate {
  GateKind kind = GateKind::I;
  double theta = 0.0;
  std::array<int, 2> qubits = {0, 0};

  int arity() const { return is_two_qubit(kind) ? 2 : 1; }

  static Gate i(int q) { return {GateKind::I, 0.0, {q, 0}}; }
  static Gate x(int q) { return {GateKind::X, 0.0, {q, 0}}; }
  static Gate y(int q) { return {GateKind::Y, 0.0, {q, 0}}; }
  static Gate z(int q) { return {GateKind::Z, 0.0, {q, 0}}; }
  static Gate h(int q) { return {GateKind::H, 0.0, {q, 0}}; }
  static Gate s(int q) { return {GateKind::S, 0.0, {q, 0}}; }
  static Gate sdg(int q) { return {GateKind::Sdg, 0.0, {q, 0}}; }
  static Gate rz(int q, double th) { return {GateKind::Rz, th, {q, 0}}; }
  static Gate rx(int q, double th) { return {GateKind::Rx, th, {q, 0}}; }
  static Gate ry(int q, double th) { return {GateKind::Ry, th, {q, 0}}; }
  static Gate cnot(int control, int target) { return {GateKind::Cnot, 0.0, {control, target}}; }
  static Gate cz(int q1, int q2) { return {GateKind::Cz, 0.0, {q1, q2}}; }

  static Gate pauli(int q, PauliLetter l) {
    switch (l) {
      case PauliLetter::I: return i(q);
      case PauliLetter::X: return x(q);
      case PauliLetter::Y: return y(q);
      case PauliLetter::Z: return z(q);
    }
    throw std::invalid_argument("bad letter");
  }
};

// Row-major 2x2 unitary of a single-qubit gate.
inline std::array<cplx, 4> gate_matrix_1q(const Gate& g) {
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i1{0, 1};
  switch (g.kind) {
    case GateKind::I: return {1, 0, 0, 1};
    case GateKind::X: return {0, 1, 1, 0};
    case GateKind::Y: return {0, -i1, i1, 0};
    case GateKind::Z: return {1, 0, 0, -1};
    case GateKind::H: return {r, r, r, -r};
    case GateKind::S: return {1, 0, 0, i1};
    case GateKind::Sdg: return {1, 0, 0, -i1};
    case GateKind::Rz: {
      double t = g.theta / 2;
      return {std::exp(cplx{0, -t}), 0, 0, std::exp(cplx{0, t})};
    }
    case GateKind::Rx: {
      double c = std::cos(g.theta / 2), s = std::sin(g.theta / 2);
      return {c, -i1 * s, -i1 * s, c};
    }
    case GateKind::Ry: {
      double c = std::cos(g.theta / 2), s = std::sin(g.theta / 2);
      return {c, -s, s, c};
    }
    default: throw std::invalid_argument("not a 1q gate");
  }
}

}  // namespace repsim
