#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "repsim/gates.hpp"

namespace repsim {

// Classical predicates evaluated over the measurement record.
struct Condition {
  enum class Kind : uint8_t {
    Always,
    BitEqOne,      // cbits[0] == 1
    AnyBitOne,     // OR of all listed cbits
    PatternEq,     // listed cbits equal `pattern` bit-for-bit (LSB = first cbit)
    MajorityOne,   // majority of listed bits is 1
  };
  Kind kind = Kind::Always;
  std::vector<int> cbits;
  uint32_t pattern = 0;

  static Condition always() { return {}; }
  static Condition bit_eq_one(int c) { return {Kind::BitEqOne, {c}, 0}; }
  static Condition any_bit_one(std::vector<int> cs) { return {Kind::AnyBitOne, std::move(cs), 0}; }
  static Condition pattern_eq(std::vector<int> cs, uint32_t pat) {
    return {Kind::PatternEq, std::move(cs), pat};
  }
  static Condition majority_one(std::vector<int> cs) { return {Kind::MajorityOne, std::move(cs), 0}; }

  bool eval(const std::vector<int>& record) const {
    switch (kind) {
      case Kind::Always: return true;
      case Kind::BitEqOne: return record.at(cbits[0]) == 1;
      case Kind::AnyBitOne: {
        for (int c : cbits)
          if (record.at(c) == 1) return true;
        return false;
      }
      case Kind::PatternEq: {
        for (size_t i = 0; i < cbits.size(); ++i)
          if (record.at(cbits[i]) != static_cast<int>((pattern >> i) & 1u)) return false;
        return true;
      }
      case Kind::MajorityOne: {
        int ones = 0;
        for (int c : cbits) ones += record.at(c);
        return 2 * ones > static_cast<int>(cbits.size());
      }
    }
    return false;
  }
};

// Error-correction feedback schemes; the decode logic lives in rep_code.hpp.
enum class EcScheme : uint8_t { SingleRound, DoubleRound, TripleRoundVote };

struct Instruction {
  enum class Op : uint8_t {
    Prep0,       // reset qubit to |0>; noiseless
    Unitary,     // noisy gate (fault sites live here)
    Measure,     // Z measurement into a classical bit; noiseless
    CondGate,    // gate applied when cond fires; noisy when applied
    EcFeedback,  // decode cbits per scheme, apply X feedback to the block; noisy when applied
    Checkpoint,  // postselection: shot handling decided by `cond` and checkpoint policy
  };

  Op op = Op::Unitary;
  Gate gate;              // Unitary / CondGate
  int qubit = -1;         // Prep0 / Measure
  int cbit = -1;          // Measure destination
  Condition cond;         // CondGate / Checkpoint (fires => apply / discard)
  EcScheme scheme = EcScheme::DoubleRound;   // EcFeedback
  std::array<int, 3> block = {-1, -1, -1};   // EcFeedback target block
  std::vector<int> cbits;                    // EcFeedback syndrome bits, in round order
  bool retry_scope = false;  // Checkpoint: repeat-until-success instead of discard
  int scope_begin = -1;      // Checkpoint with retry_scope: first instruction of the scope
  std::string label;         // Checkpoint label for discard accounting
};

class Circuit {
public:
  int n_qubits = 0;
  int n_cbits = 0;
  // Instructions before body_begin form a noiseless prologue (input-state
  // injection for oracle runs); fault sites and sampled noise start here.
  int body_begin = 0;
  std::vector<Instruction> instrs;

  void mark_body_begin() { body_begin = static_cast<int>(instrs.size()); }

  void require_qubits(int n) { if (n > n_qubits) n_qubits = n; }

  int alloc_cbit() { return n_cbits++; }

  int prep0(int q) {
    require_qubits(q + 1);
    Instruction in;
    in.op = Instruction::Op::Prep0;
    in.qubit = q;
    instrs.push_back(in);
    return static_cast<int>(instrs.size()) - 1;
  }

  int add(const Gate& g) {
    require_qubits(std::max(g.qubits[0], g.arity() == 2 ? g.qubits[1] : g.qubits[0]) + 1);
    Instruction in;
    in.op = Instruction::Op::Unitary;
    in.gate = g;
    instrs.push_back(in);
    return static_cast<int>(instrs.size()) - 1;
  }

  // Measures qubit q into a fresh classical bit; returns the cbit index.
  int measure(int q) {
    require_qubits(q + 1);
    Instruction in;
    in.op = Instruction::Op::Measure;
    in.qubit = q;
    in.cbit = alloc_cbit();
    instrs.push_back(in);
    return in.cbit;
  }

  int cond_gate(const Gate& g, Condition c) {
    require_qubits(std::max(g.qubits[0], g.arity() == 2 ? g.qubits[1] : g.qubits[0]) + 1);
    Instruction in;
    in.op = Instruction::Op::CondGate;
    in.gate = g;
    in.cond = std::move(c);
    instrs.push_back(in);
    return static_cast<int>(instrs.size()) - 1;
  }

  int ec_feedback(const std::array<int, 3>& block, std::vector<int> cbits, EcScheme scheme) {
    Instruction in;
    in.op = Instruction::Op::EcFeedback;
    in.block = block;
    in.cbits = std::move(cbits);
    in.scheme = scheme;
    instrs.push_back(in);
    return static_cast<int>(instrs.size()) - 1;
  }

  // Discard-style checkpoint: the shot is dropped when cond fires.
  int checkpoint(Condition c, std::string label) {
    Instruction in;
    in.op = Instruction::Op::Checkpoint;
    in.cond = std::move(c);
    in.label = std::move(label);
    instrs.push_back(in);
    return static_cast<int>(instrs.size()) - 1;
  }

  // Repeat-until-success checkpoint: on firing, execution rolls back to
  // scope_begin with the scope's preparations redone.
  int checkpoint_retry(Condition c, int scope_begin, std::string label) {
    Instruction in;
    in.op = Instruction::Op::Checkpoint;
    in.cond = std::move(c);
    in.retry_scope = true;
    in.scope_begin = scope_begin;
    in.label = std::move(label);
    instrs.push_back(in);
    return static_cast<int>(instrs.size()) - 1;
  }

  size_t size() const { return instrs.size(); }
};

// A fault site: one wire of one noisy gate instruction. wire is 0 for the
// first qubit of the gate (control for CNOT) and 1 for the second.
struct FaultSite {
  int instr = -1;
  int wire = 0;
  bool operator==(const FaultSite& o) const { return instr == o.instr && wire == o.wire; }
};

}  // namespace repsim
