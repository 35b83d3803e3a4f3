#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "repsim/circuit.hpp"
#include "repsim/noise.hpp"
#include "repsim/rep_code.hpp"
#include "repsim/state_vector.hpp"

namespace repsim {

struct FaultInjection {
  FaultSite site;
  PauliLetter letter = PauliLetter::X;
};

// One terminal branch of an exact circuit execution. Probabilities of all
// leaves of a run sum to 1.
struct ExactLeaf {
  double prob = 1.0;
  bool accepted = true;
  std::string discard_label;
  int discard_instr = -1;
  StateVector state{0};
  std::vector<int> cbits;
  int retries = 0;
};

// Exact executor: enumerates every internal measurement branch with its Born
// probability instead of sampling. Noiseless except for one optionally
// injected Pauli fault; repeat-until-success checkpoints roll back and re-run
// their scope (the retry is noiseless, exact to first order in p).
class ExactRunner {
public:
  explicit ExactRunner(const Circuit& c, std::optional<FaultInjection> fault = std::nullopt,
                       double branch_tol = 1e-12, int max_retries = 64)
      : c_(c), fault_(fault), branch_tol_(branch_tol), max_retries_(max_retries) {}

  std::vector<ExactLeaf> run() {
    leaves_.clear();
    PathState s;
    s.state = StateVector(c_.n_qubits);
    s.cbits.assign(c_.n_cbits, 0);
    execute(std::move(s), 0);
    return std::move(leaves_);
  }

private:
  struct PathState {
    StateVector state{0};
    std::vector<int> cbits;
    double prob = 1.0;
    bool fault_applied = false;
    int retries = 0;
  };

  void maybe_inject(PathState& s, int instr_idx, const Instruction& in) {
    if (!fault_ || s.fault_applied || fault_->site.instr != instr_idx) return;
    int q = -1;
    if (in.op == Instruction::Op::Unitary || in.op == Instruction::Op::CondGate)
      q = in.gate.qubits[fault_->site.wire];
    if (q < 0) return;
    s.state.apply_gate(Gate::pauli(q, fault_->letter));
    s.fault_applied = true;
  }

  void execute(PathState s, size_t pc) {
    while (pc < c_.instrs.size()) {
      const Instruction& in = c_.instrs[pc];
      switch (in.op) {
        case Instruction::Op::Prep0:
          s.state.reset_to_zero(in.qubit);
          break;
        case Instruction::Op::Unitary:
          s.state.apply_gate(in.gate);
          maybe_inject(s, static_cast<int>(pc), in);
          break;
        case Instruction::Op::CondGate:
          if (in.cond.eval(s.cbits)) {
            s.state.apply_gate(in.gate);
            maybe_inject(s, static_cast<int>(pc), in);
          }
          break;
        case Instruction::Op::Measure: {
          double p1 = s.state.prob_one(in.qubit);
          bool take0 = 1.0 - p1 > branch_tol_;
          bool take1 = p1 > branch_tol_;
          if (take0 && take1) {
            PathState other = s;
            other.prob *= p1;
            other.state.project(in.qubit, 1);
            other.cbits[in.cbit] = 1;
            execute(std::move(other), pc + 1);
            s.prob *= 1.0 - p1;
            s.state.project(in.qubit, 0);
            s.cbits[in.cbit] = 0;
          } else if (take1) {
            s.prob *= p1;
            s.state.project(in.qubit, 1);
            s.cbits[in.cbit] = 1;
          } else {
            s.prob *= 1.0 - p1;
            s.state.project(in.qubit, 0);
            s.cbits[in.cbit] = 0;
          }
          break;
        }
        case Instruction::Op::EcFeedback: {
          std::vector<int> bits;
          bits.reserve(in.cbits.size());
          for (int cb : in.cbits) bits.push_back(s.cbits.at(cb));
          Feedback fb = ec_decode_feedback(in.scheme, bits);
          if (fb) s.state.apply_x(in.block[*fb]);
          break;
        }
        case Instruction::Op::Checkpoint: {
          if (in.cond.eval(s.cbits)) {
            if (in.retry_scope) {
              if (++s.retries > max_retries_) throw std::runtime_error("retry limit exceeded");
              pc = static_cast<size_t>(in.scope_begin);
              continue;
            }
            ExactLeaf leaf;
            leaf.prob = s.prob;
            leaf.accepted = false;
            leaf.discard_label = in.label;
            leaf.discard_instr = static_cast<int>(pc);
            leaf.state = std::move(s.state);
            leaf.cbits = std::move(s.cbits);
            leaf.retries = s.retries;
            leaves_.push_back(std::move(leaf));
            return;
          }
          break;
        }
      }
      ++pc;
    }
    ExactLeaf leaf;
    leaf.prob = s.prob;
    leaf.accepted = true;
    leaf.state = std::move(s.state);
    leaf.cbits = std::move(s.cbits);
    leaf.retries = s.retries;
    leaves_.push_back(std::move(leaf));
  }

  const Circuit& c_;
  std::optional<FaultInjection> fault_;
  double branch_tol_;
  int max_retries_;
  std::vector<ExactLeaf> leaves_;
};

}  // namespace repsim
