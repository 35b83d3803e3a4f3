#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "repsim/circuit.hpp"
#include "repsim/pauli.hpp"

namespace repsim {

// One distance-3 block: ordered physical qubit indices.
struct CodeBlock {
  std::array<int, 3> q = {0, 1, 2};
  int operator[](int i) const { return q.at(i); }
};

// Stabilizer eigenvalues, +1 or -1. Measured ancilla bit 0 maps to +1.
struct Syndrome {
  int z1z2 = 1;
  int z2z3 = 1;
  bool trivial() const { return z1z2 == 1 && z2z3 == 1; }
  bool operator==(const Syndrome& o) const { return z1z2 == o.z1z2 && z2z3 == o.z2z3; }
};

inline Syndrome syndrome_from_bits(int b12, int b23) {
  return {b12 == 0 ? 1 : -1, b23 == 0 ? 1 : -1};
}

// Feedback qubit within the block, or nullopt for identity.
using Feedback = std::optional<int>;

// Single-round lookup: one syndrome, one feedback.
inline Feedback decode_single(const Syndrome& s) {
  if (s.z1z2 == 1 && s.z2z3 == 1) return std::nullopt;
  if (s.z1z2 == -1 && s.z2z3 == 1) return 0;
  if (s.z1z2 == -1 && s.z2z3 == -1) return 1;
  return 2;  // (+1, -1)
}

// Double-round lookup covering the 19 single-fault locations; histories not
// listed decode to identity (detection without correction).
inline Feedback decode_double(const Syndrome& s0, const Syndrome& s1) {
  auto key = [](const Syndrome& a, const Syndrome& b) {
    return ((a.z1z2 < 0) << 3) | ((a.z2z3 < 0) << 2) | ((b.z1z2 < 0) << 1) | (b.z2z3 < 0);
  };
  switch (key(s0, s1)) {
    case 0b1010: return 0;  // persistent X1
    case 0b1111: return 1;  // persistent X2
    case 0b0101: return 2;  // persistent X3
    case 0b0010: return 0;  // appears in round 1: X1
    case 0b0111: return 1;  // (+,-)(-,-): X2
    case 0b0011: return 1;  // (+,+)(-,-): X2
    default: return std::nullopt;
  }
}

// Majority over three equality-comparable values; nullopt when all three are
// mutually distinct (possible for syndrome pairs).
template <typename T>
inline std::optional<T> majority_vote(const T& a, const T& b, const T& c) {
  if (a == b || a == c) return a;
  if (b == c) return b;
  return std::nullopt;
}

inline Feedback ec_decode_feedback(EcScheme scheme, const std::vector<int>& bits) {
  switch (scheme) {
    case EcScheme::SingleRound: {
      if (bits.size() != 2) throw std::invalid_argument("single-round needs 2 bits");
      return decode_single(syndrome_from_bits(bits[0], bits[1]));
    }
    case EcScheme::DoubleRound: {
      if (bits.size() != 4) throw std::invalid_argument("double-round needs 4 bits");
      return decode_double(syndrome_from_bits(bits[0], bits[1]),
                           syndrome_from_bits(bits[2], bits[3]));
    }
    case EcScheme::TripleRoundVote: {
      if (bits.size() != 6) throw std::invalid_argument("triple-round needs 6 bits");
      std::array<Syndrome, 3> s;
      for (int r = 0; r < 3; ++r) s[r] = syndrome_from_bits(bits[2 * r], bits[2 * r + 1]);
      auto maj = majority_vote(s[0], s[1], s[2]);
      if (!maj) return std::nullopt;  // all rounds differ: no feedback
      return decode_single(*maj);
    }
  }
  return std::nullopt;
}

// Emits a|0> + b|1> on a single qubit up to global phase, via Ry then Rz.
inline void append_amplitude_prep(Circuit& c, int qubit, cplx a, cplx b) {
  double n = std::sqrt(std::norm(a) + std::norm(b));
  if (std::abs(n - 1.0) > 1e-9) throw std::invalid_argument("amplitudes not normalized");
  double theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
  double phi = std::arg(b) - std::arg(a);
  c.prep0(qubit);
  if (theta != 0.0) c.add(Gate::ry(qubit, theta));
  if (phi != 0.0) c.add(Gate::rz(qubit, phi));
}

// Codeword encoding: first qubit carries a|0>+b|1>, then CNOT fan-out.
inline void append_encode(Circuit& c, const CodeBlock& blk, cplx a, cplx b) {
  append_amplitude_prep(c, blk[0], a, b);
  c.prep0(blk[1]);
  c.prep0(blk[2]);
  c.add(Gate::cnot(blk[0], blk[1]));
  c.add(Gate::cnot(blk[0], blk[2]));
}

// One syndrome round with a recycled ancilla: measure Z1Z2 then Z2Z3.
// Returns the two classical bits.
inline std::pair<int, int> append_syndrome_round(Circuit& c, const CodeBlock& blk, int anc) {
  for (int i = 0; i < 3; ++i)
    if (blk[i] == anc) throw std::invalid_argument("ancilla collides with block");
  c.prep0(anc);
  c.add(Gate::cnot(blk[0], anc));
  c.add(Gate::cnot(blk[1], anc));
  int c12 = c.measure(anc);
  c.prep0(anc);
  c.add(Gate::cnot(blk[1], anc));
  c.add(Gate::cnot(blk[2], anc));
  int c23 = c.measure(anc);
  c.prep0(anc);  // leave the recycled ancilla clean
  return {c12, c23};
}

// Full error correction: `rounds` syndrome rounds plus decoded feedback.
// rounds = 2 uses the double-round table, rounds = 3 the majority vote.
// rounds = 1 is provided for the fault-tolerance failure demonstration.
inline void append_error_correct(Circuit& c, const CodeBlock& blk, int anc, int rounds) {
  if (rounds < 1 || rounds > 3) throw std::invalid_argument("rounds must be 1, 2 or 3");
  std::vector<int> bits;
  for (int r = 0; r < rounds; ++r) {
    auto [b12, b23] = append_syndrome_round(c, blk, anc);
    bits.push_back(b12);
    bits.push_back(b23);
  }
  EcScheme scheme = rounds == 1   ? EcScheme::SingleRound
                    : rounds == 2 ? EcScheme::DoubleRound
                                  : EcScheme::TripleRoundVote;
  c.ec_feedback(blk.q, bits, scheme);
}

// Logical error rate of the distance-d repetition code under bounded
// distance decoding: 1 - sum_{k<=(d-1)/2} C(d,k) p^k (1-p)^(d-k).
inline double logical_error_rate(int d, double p) {
  if (d < 1 || d % 2 == 0) throw std::invalid_argument("d must be odd and >= 1");
  if (p < 0 || p > 1) throw std::invalid_argument("p out of [0,1]");
  int t = (d - 1) / 2;
  double sum = 0;
  for (int k = 0; k <= t; ++k) {
    double binom = 1;
    for (int j = 0; j < k; ++j) binom = binom * (d - j) / (j + 1);
    sum += binom * std::pow(p, k) * std::pow(1 - p, d - k);
  }
  return 1.0 - sum;
}

// |0>-state factory (noisy-preparation mode). Preparations are modeled as a
// clean reset followed by an identity gate carrying the preparation noise.
// Both stabilizers are measured once; any detection triggers a retry of the
// whole batch. The output is blk[0].
struct ZeroFactory {
  CodeBlock batch;
  int ancilla;
  int output_qubit;
  int checkpoint_instr;
};

inline ZeroFactory append_zero_factory(Circuit& c, const CodeBlock& batch, int anc) {
  int scope_begin = static_cast<int>(c.instrs.size());
  for (int i = 0; i < 3; ++i) {
    c.prep0(batch[i]);
    c.add(Gate::i(batch[i]));  // noisy preparation marker
  }
  auto [b12, b23] = append_syndrome_round(c, batch, anc);
  int chk = c.checkpoint_retry(Condition::any_bit_one({b12, b23}), scope_begin, "zero_factory");
  return {batch, anc, batch[0], chk};
}

}  // namespace repsim
