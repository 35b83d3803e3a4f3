#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "repsim/circuit.hpp"
#include "repsim/rep_code.hpp"

namespace repsim {

// Postselection criterion for the detection syndrome measurements inside
// gadgets (no feedback is ever applied there).
//   DiscardAny:         drop the shot on any nontrivial syndrome.
//   DiscardQ1Signature: drop only on (Z1Z2, Z2Z3) = (-1, +1), the signature
//                       of a first-qubit bit-flip, which is the only pattern
//                       that can hide a phase-flip partner created by a CZ.
enum class PostselectRule : uint8_t { DiscardAny, DiscardQ1Signature };

struct OutcomeSpec {
  enum class Kind : uint8_t { None, Majority3 } kind = Kind::None;
  std::array<int, 3> cbits = {-1, -1, -1};

  int key(const std::vector<int>& record) const {
    if (kind == Kind::None) return 0;
    int ones = record.at(cbits[0]) + record.at(cbits[1]) + record.at(cbits[2]);
    return ones >= 2 ? 1 : 0;
  }
};

struct GadgetMeta {
  std::vector<CodeBlock> output_blocks;
  OutcomeSpec outcome;
  std::vector<int> checkpoint_instrs;
};

inline void append_logical_x(Circuit& c, const CodeBlock& b) {
  c.add(Gate::x(b[0]));
  c.add(Gate::x(b[1]));
  c.add(Gate::x(b[2]));
}

inline void append_logical_y(Circuit& c, const CodeBlock& b) {
  c.add(Gate::y(b[0]));
  c.add(Gate::x(b[1]));
  c.add(Gate::x(b[2]));
}

inline void append_logical_z(Circuit& c, const CodeBlock& b) { c.add(Gate::z(b[0])); }

inline void append_logical_cnot(Circuit& c, const CodeBlock& control, const CodeBlock& target) {
  for (int i = 0; i < 3; ++i) {
    if (control[i] == target[i]) throw std::invalid_argument("blocks overlap");
    c.add(Gate::cnot(control[i], target[i]));
  }
}

// Detection-only syndrome measurement with postselection; returns the
// checkpoint instruction index.
inline int append_detect_sm(Circuit& c, const CodeBlock& blk, int anc, PostselectRule rule,
                            const std::string& label) {
  auto [b12, b23] = append_syndrome_round(c, blk, anc);
  Condition cond = rule == PostselectRule::DiscardAny
                       ? Condition::any_bit_one({b12, b23})
                       : Condition::pattern_eq({b12, b23}, 0b01);
  return c.checkpoint(cond, label);
}

// |+>_L = H on the first qubit, then CNOT fan-out.
inline GadgetMeta append_prep_plus(Circuit& c, const CodeBlock& b) {
  c.prep0(b[0]);
  c.prep0(b[1]);
  c.prep0(b[2]);
  c.add(Gate::h(b[0]));
  c.add(Gate::cnot(b[0], b[1]));
  c.add(Gate::cnot(b[0], b[2]));
  GadgetMeta m;
  m.output_blocks = {b};
  return m;
}

// |+i>_L (sign = +1) or |-i>_L (sign = -1). The S gate can convert a
// preceding bit flip into a Y error; the single Z1Z2 check catches it. With
// retry_until_success the batch is re-prepared instead of discarding the shot.
inline GadgetMeta append_prep_plus_i(Circuit& c, const CodeBlock& b, int anc, int sign,
                                     bool retry_until_success) {
  int scope_begin = static_cast<int>(c.instrs.size());
  append_prep_plus(c, b);
  c.add(sign >= 0 ? Gate::s(b[0]) : Gate::sdg(b[0]));
  c.prep0(anc);
  c.add(Gate::cnot(b[0], anc));
  c.add(Gate::cnot(b[1], anc));
  int cb = c.measure(anc);
  GadgetMeta m;
  m.output_blocks = {b};
  if (retry_until_success) {
    m.checkpoint_instrs.push_back(
        c.checkpoint_retry(Condition::bit_eq_one(cb), scope_begin, "prep_plus_i"));
  } else {
    m.checkpoint_instrs.push_back(c.checkpoint(Condition::bit_eq_one(cb), "prep_plus_i"));
  }
  c.prep0(anc);
  return m;
}

// physical CZ between the first qubits, then a detection syndrome
// measurement on each block. One recycled ancilla.
inline GadgetMeta append_logical_cz(Circuit& c, const CodeBlock& b1, const CodeBlock& b2, int anc,
                                    PostselectRule rule) {
  c.add(Gate::cz(b1[0], b2[0]));
  GadgetMeta m;
  m.output_blocks = {b1, b2};
  m.checkpoint_instrs.push_back(append_detect_sm(c, b1, anc, rule, "cz_sm_block1"));
  m.checkpoint_instrs.push_back(append_detect_sm(c, b2, anc, rule, "cz_sm_block2"));
  c.prep0(anc);
  return m;
}

// indirect X_L measurement, three repetitions with a recycled
// ancilla; the logical outcome is the majority bit.
inline OutcomeSpec append_measure_x_logical(Circuit& c, const CodeBlock& b, int anc) {
  OutcomeSpec out;
  out.kind = OutcomeSpec::Kind::Majority3;
  for (int rep = 0; rep < 3; ++rep) {
    c.prep0(anc);
    c.add(Gate::h(anc));
    c.add(Gate::cnot(anc, b[0]));
    c.add(Gate::cnot(anc, b[1]));
    c.add(Gate::cnot(anc, b[2]));
    c.add(Gate::h(anc));
    out.cbits[rep] = c.measure(anc);
  }
  c.prep0(anc);
  return out;
}

// S (sign = +1) or S-dagger (sign = -1) gate teleportation. The
// resource block is prepared repeat-until-success, transversal CNOTs couple
// it to the data block, the data block is measured out qubit-wise and the
// majority decides the logical Y correction. Output lives on the resource
// block; the consumed data block is reset.
inline GadgetMeta append_s_teleport(Circuit& c, const CodeBlock& data, const CodeBlock& resource,
                                    int anc, int sign) {
  append_prep_plus_i(c, resource, anc, sign, /*retry_until_success=*/true);
  for (int i = 0; i < 3; ++i) c.add(Gate::cnot(resource[i], data[i]));
  std::array<int, 3> bits{};
  for (int i = 0; i < 3; ++i) bits[i] = c.measure(data[i]);
  Condition fire = Condition::majority_one({bits[0], bits[1], bits[2]});
  c.cond_gate(Gate::y(resource[0]), fire);
  c.cond_gate(Gate::x(resource[1]), fire);
  c.cond_gate(Gate::x(resource[2]), fire);
  for (int i = 0; i < 3; ++i) c.prep0(data[i]);
  GadgetMeta m;
  m.output_blocks = {resource};
  m.outcome.kind = OutcomeSpec::Kind::Majority3;
  m.outcome.cbits = bits;
  return m;
}

// H gate teleportation. |+>_L resource, physical CZ, a detection
// syndrome measurement on both blocks, X-basis measurement of the data block,
// and a logical X correction on outcome -1. Output lives on the resource
// block; the consumed data block is reset.
inline GadgetMeta append_h_teleport(Circuit& c, const CodeBlock& data, const CodeBlock& resource,
                                    int anc, PostselectRule rule) {
  append_prep_plus(c, resource);
  c.add(Gate::cz(resource[0], data[0]));
  GadgetMeta m;
  m.output_blocks = {resource};
  m.checkpoint_instrs.push_back(append_detect_sm(c, resource, anc, rule, "h_sm_resource"));
  m.checkpoint_instrs.push_back(append_detect_sm(c, data, anc, rule, "h_sm_data"));
  m.outcome = append_measure_x_logical(c, data, anc);
  Condition fire = Condition::majority_one({m.outcome.cbits[0], m.outcome.cbits[1], m.outcome.cbits[2]});
  c.cond_gate(Gate::x(resource[0]), fire);
  c.cond_gate(Gate::x(resource[1]), fire);
  c.cond_gate(Gate::x(resource[2]), fire);
  for (int i = 0; i < 3; ++i) c.prep0(data[i]);
  return m;
}

// Logical Rz. Transversal CNOTs copy the data block onto a fresh
// ancilla block, the physical rotation acts on its first qubit, a detection
// syndrome measurement catches the |100>-pattern left by a bit flip before
// the rotation, and the X-basis measurement teleports the phase back. The
// conditional Z lands on the third data qubit as drawn.
inline GadgetMeta append_rz_gadget(Circuit& c, const CodeBlock& data, const CodeBlock& ancblk,
                                   int anc, double theta, PostselectRule rule) {
  for (int i = 0; i < 3; ++i) c.prep0(ancblk[i]);
  for (int i = 0; i < 3; ++i) c.add(Gate::cnot(data[i], ancblk[i]));
  c.add(Gate::rz(ancblk[0], theta));
  GadgetMeta m;
  m.output_blocks = {data};
  m.checkpoint_instrs.push_back(append_detect_sm(c, ancblk, anc, rule, "rz_sm"));
  m.outcome = append_measure_x_logical(c, ancblk, anc);
  Condition fire = Condition::majority_one({m.outcome.cbits[0], m.outcome.cbits[1], m.outcome.cbits[2]});
  c.cond_gate(Gate::z(data[2]), fire);
  for (int i = 0; i < 3; ++i) c.prep0(ancblk[i]);
  return m;
}

// Naive transversal S_L = S on the first qubit, applied directly after the
// |+>_L preparation with no check. Not bias-preserving; kept as the control
// case the violation detector must flag.
inline GadgetMeta append_naive_prep_plus_i(Circuit& c, const CodeBlock& b) {
  append_prep_plus(c, b);
  c.add(Gate::s(b[0]));
  GadgetMeta m;
  m.output_blocks = {b};
  return m;
}

// Logical rotation decompositions: Rx = H Rz H, Ry = S H Rz H Sdg (rightmost
// factor applied first).
enum class LogicalOpKind : uint8_t {
  XL, YL, ZL, CnotL, CzL, SL, SdgL, HL, RzL, RxL, RyL, MeasXL, PrepPlus, PrepPlusI, PrepMinusI
};

struct LogicalOpSpec {
  LogicalOpKind kind;
  double theta = 0.0;
  std::array<int, 2> blocks = {0, 0};  // logical qubit indices

  static LogicalOpSpec one(LogicalOpKind k, int b, double th = 0.0) { return {k, th, {b, 0}}; }
  static LogicalOpSpec two(LogicalOpKind k, int b1, int b2) { return {k, 0.0, {b1, b2}}; }
};

inline std::vector<LogicalOpSpec> rotation_decompose(LogicalOpKind kind, int block, double theta) {
  if (kind == LogicalOpKind::RxL) {
    return {LogicalOpSpec::one(LogicalOpKind::HL, block),
            LogicalOpSpec::one(LogicalOpKind::RzL, block, theta),
            LogicalOpSpec::one(LogicalOpKind::HL, block)};
  }
  if (kind == LogicalOpKind::RyL) {
    return {LogicalOpSpec::one(LogicalOpKind::SdgL, block),
            LogicalOpSpec::one(LogicalOpKind::HL, block),
            LogicalOpSpec::one(LogicalOpKind::RzL, block, theta),
            LogicalOpSpec::one(LogicalOpKind::HL, block),
            LogicalOpSpec::one(LogicalOpKind::SL, block)};
  }
  throw std::invalid_argument("only Rx and Ry decompose");
}

}  // namespace repsim
