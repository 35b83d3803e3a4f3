#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "repsim/circuit.hpp"
#include "repsim/pauli.hpp"

namespace repsim {

// Channel parameters: p is the fault probability per gate wire, epsilon the
// fraction of faults leaking out of pure bit-flip. epsilon = 0 is the
// bit-flip channel; epsilon = 2/3 the depolarizing channel.
//
// Placement rule: a fault may follow every one- and two-qubit gate (one site
// per wire). State preparation, measurement and idle qubits are noiseless.
struct NoiseSpec {
  double p = 0.0;
  double epsilon = 0.0;

  NoiseSpec() = default;
  NoiseSpec(double p_, double eps_ = 0.0) : p(p_), epsilon(eps_) {
    if (p < 0 || p > 1) throw std::invalid_argument("p out of [0,1]");
    if (epsilon < 0 || epsilon > 1) throw std::invalid_argument("epsilon out of [0,1]");
  }
};

struct KrausTerm {
  double weight;
  PauliString pauli;
};

// {(1-p, I), (p(1-eps), X), (p eps/2, Y), (p eps/2, Z)} on the given qubit.
inline std::vector<KrausTerm> single_qubit_kraus(const NoiseSpec& spec, int qubit = 0) {
  std::vector<KrausTerm> terms;
  terms.push_back({1.0 - spec.p, PauliString::identity()});
  if (spec.p > 0) {
    if (spec.epsilon < 1.0)
      terms.push_back({spec.p * (1.0 - spec.epsilon), PauliString::x(qubit)});
    if (spec.epsilon > 0) {
      terms.push_back({spec.p * spec.epsilon / 2.0, PauliString::y(qubit)});
      terms.push_back({spec.p * spec.epsilon / 2.0, PauliString::z(qubit)});
    }
  }
  return terms;
}

// Pure bit-flip two-qubit channel: weights {(1-p)^2, (1-p)p, (1-p)p, p^2} on
// {I, X1, X2, X1X2}. Defined for epsilon = 0 only; biased two-qubit noise is
// applied as independent per-wire single-qubit channels instead.
inline std::vector<KrausTerm> two_qubit_kraus(const NoiseSpec& spec, int q1 = 0, int q2 = 1) {
  if (spec.epsilon != 0.0) throw std::invalid_argument("two_qubit_kraus requires epsilon = 0");
  double p = spec.p;
  std::vector<KrausTerm> terms;
  terms.push_back({(1 - p) * (1 - p), PauliString::identity()});
  if (p > 0) {
    terms.push_back({(1 - p) * p, PauliString::x(q1)});
    terms.push_back({(1 - p) * p, PauliString::x(q2)});
    terms.push_back({p * p, PauliString::x(q1) * PauliString::x(q2)});
  }
  return terms;
}

struct FaultEvent {
  FaultSite site;
  PauliString pauli;
};

// Samples the per-wire fault after a gate. `qubit` is the physical index of
// the wire. Deterministic given the draw.
inline std::optional<FaultEvent> sample_fault(const NoiseSpec& spec, FaultSite site, int qubit,
                                              double draw) {
  if (draw >= spec.p) return std::nullopt;
  FaultEvent ev;
  ev.site = site;
  double px = spec.p * (1.0 - spec.epsilon);
  double py = spec.p * spec.epsilon / 2.0;
  if (draw < px) ev.pauli = PauliString::x(qubit);
  else if (draw < px + py) ev.pauli = PauliString::y(qubit);
  else ev.pauli = PauliString::z(qubit);
  return ev;
}

}  // namespace repsim
