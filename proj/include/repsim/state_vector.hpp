#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "repsim/gates.hpp"
#include "repsim/pauli.hpp"

namespace repsim {

// Pure n-qubit state. Qubit ordering is little-endian throughout the
// project: qubit 0 is the least significant bit of the amplitude index.
class StateVector {
public:
  explicit StateVector(int n_qubits) : n_(n_qubits), amp_(size_t{1} << n_qubits, cplx{0, 0}) {
    if (n_qubits < 0 || n_qubits > 28) throw std::invalid_argument("bad qubit count");
    amp_[0] = 1.0;
  }

  StateVector(int n_qubits, std::vector<cplx> amplitudes)
      : n_(n_qubits), amp_(std::move(amplitudes)) {
    if (amp_.size() != (size_t{1} << n_qubits)) throw std::invalid_argument("bad amplitude length");
  }

  int n_qubits() const { return n_; }
  size_t dim() const { return amp_.size(); }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  cplx& operator[](size_t i) { return amp_[i]; }
  const cplx& operator[](size_t i) const { return amp_[i]; }

  double norm_sq() const {
    double s = 0;
    for (const auto& a : amp_) s += std::norm(a);
    return s;
  }

  void normalize() {
    double n = std::sqrt(norm_sq());
    if (n == 0) throw std::runtime_error("cannot normalize zero state");
    for (auto& a : amp_) a /= n;
  }

  void check_qubit(int q) const {
    if (q < 0 || q >= n_) throw std::out_of_range("qubit index out of range");
  }

  // Resets a qubit to |0> by projection (flipping a definite |1>). The qubit
  // must be a product factor of the state — fresh, measured, or a consumed
  // block being retired — where projection and physical measure-and-reset
  // agree on everything outside the factor.
  void reset_to_zero(int q) {
    check_qubit(q);
    size_t bit = size_t{1} << q;
    double p0 = 0;
    for (size_t i = 0; i < amp_.size(); ++i)
      if (!(i & bit)) p0 += std::norm(amp_[i]);
    if (p0 < 1e-15) {
      // definite |1>: map to |0>
      for (size_t i = 0; i < amp_.size(); ++i) {
        if (!(i & bit)) {
          amp_[i] = amp_[i | bit];
          amp_[i | bit] = 0;
        }
      }
      normalize();
      return;
    }
    double inv = 1.0 / std::sqrt(p0);
    for (size_t i = 0; i < amp_.size(); ++i) {
      if (i & bit) amp_[i] = 0; else amp_[i] *= inv;
    }
  }

  void apply_gate(const Gate& g) {
    switch (g.kind) {
      case GateKind::I: return;
      case GateKind::X: apply_x(g.qubits[0]); return;
      case GateKind::Y: apply_y(g.qubits[0]); return;
      case GateKind::Z: apply_z(g.qubits[0]); return;
      case GateKind::Cnot: apply_cnot(g.qubits[0], g.qubits[1]); return;
      case GateKind::Cz: apply_cz(g.qubits[0], g.qubits[1]); return;
      default: apply_1q(g.qubits[0], gate_matrix_1q(g)); return;
    }
  }

  void apply_x(int q) {
    check_qubit(q);
    size_t bit = size_t{1} << q;
    for (size_t i = 0; i < amp_.size(); ++i)
      if (!(i & bit)) std::swap(amp_[i], amp_[i | bit]);
  }

  void apply_y(int q) {
    check_qubit(q);
    size_t bit = size_t{1} << q;
    const cplx i1{0, 1};
    for (size_t i = 0; i < amp_.size(); ++i) {
      if (!(i & bit)) {
        cplx a0 = amp_[i], a1 = amp_[i | bit];
        amp_[i] = -i1 * a1;
        amp_[i | bit] = i1 * a0;
      }
    }
  }

  void apply_z(int q) {
    check_qubit(q);
    size_t bit = size_t{1} << q;
    for (size_t i = 0; i < amp_.size(); ++i)
      if (i & bit) amp_[i] = -amp_[i];
  }

  void apply_1q(int q, const std::array<cplx, 4>& u) {
    check_qubit(q);
    size_t bit = size_t{1} << q;
    for (size_t i = 0; i < amp_.size(); ++i) {
      if (!(i & bit)) {
        cplx a0 = amp_[i], a1 = amp_[i | bit];
        amp_[i] = u[0] * a0 + u[1] * a1;
        amp_[i | bit] = u[2] * a0 + u[3] * a1;
      }
    }
  }

  void apply_cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) throw std::invalid_argument("cnot qubits collide");
    size_t cb = size_t{1} << control, tb = size_t{1} << target;
    for (size_t i = 0; i < amp_.size(); ++i)
      if ((i & cb) && !(i & tb)) std::swap(amp_[i], amp_[i | tb]);
  }

  void apply_cz(int q1, int q2) {
    check_qubit(q1);
    check_qubit(q2);
    if (q1 == q2) throw std::invalid_argument("cz qubits collide");
    size_t b1 = size_t{1} << q1, b2 = size_t{1} << q2;
    for (size_t i = 0; i < amp_.size(); ++i)
      if ((i & b1) && (i & b2)) amp_[i] = -amp_[i];
  }

  void apply_pauli(const PauliString& p) {
    for (const auto& [q, l] : p.letters()) {
      switch (l) {
        case PauliLetter::X: apply_x(q); break;
        case PauliLetter::Y: apply_y(q); break;
        case PauliLetter::Z: apply_z(q); break;
        default: break;
      }
    }
    if (p.phase_exp() != 0) {
      cplx ph = p.phase();
      for (auto& a : amp_) a *= ph;
    }
  }

  double prob_one(int q) const {
    check_qubit(q);
    size_t bit = size_t{1} << q;
    double p1 = 0;
    for (size_t i = 0; i < amp_.size(); ++i)
      if (i & bit) p1 += std::norm(amp_[i]);
    return p1;
  }

  // Projective Z measurement; outcome chosen by the caller-provided uniform
  // draw so sampling stays reproducible. draw < P(0) yields outcome 0.
  int measure_z(int q, double draw) {
    double p1 = prob_one(q);
    int outcome = draw < 1.0 - p1 ? 0 : 1;
    project(q, outcome);
    return outcome;
  }

  // Projects onto the given outcome and renormalizes. Returns the probability
  // the outcome had before projection.
  double project(int q, int outcome) {
    check_qubit(q);
    size_t bit = size_t{1} << q;
    double p = 0;
    for (size_t i = 0; i < amp_.size(); ++i) {
      bool one = (i & bit) != 0;
      if (one == (outcome == 1)) p += std::norm(amp_[i]);
    }
    if (p < 1e-300) throw std::runtime_error("projection onto zero-probability branch");
    double inv = 1.0 / std::sqrt(p);
    for (size_t i = 0; i < amp_.size(); ++i) {
      bool one = (i & bit) != 0;
      if (one == (outcome == 1)) amp_[i] *= inv; else amp_[i] = 0;
    }
    return p;
  }

  cplx inner(const StateVector& other) const {
    if (n_ != other.n_) throw std::invalid_argument("qubit count mismatch");
    cplx s{0, 0};
    for (size_t i = 0; i < amp_.size(); ++i) s += std::conj(amp_[i]) * other.amp_[i];
    return s;
  }

  // |<reference|state>|^2; global-phase-insensitive state comparison.
  double squared_overlap(const StateVector& reference) const {
    return std::norm(reference.inner(*this));
  }

  double expectation_pauli(const PauliString& p) const {
    if (!p.phase_is_real()) throw std::invalid_argument("observable phase must be real");
    StateVector tmp = *this;
    tmp.apply_pauli(p);
    cplx v = inner(tmp);
    return v.real();
  }

private:
  int n_;
  std::vector<cplx> amp_;
};

}  // namespace repsim
