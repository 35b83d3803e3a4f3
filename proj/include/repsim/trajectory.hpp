#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "repsim/circuit.hpp"
#include "repsim/noise.hpp"
#include "repsim/rep_code.hpp"
#include "repsim/state_vector.hpp"

namespace repsim {

// splitmix64: per-shot seeds derived from (master seed, shot index) so results
// do not depend on how shots are distributed over threads.
inline uint64_t mix_seed(uint64_t master, uint64_t shot) {
  uint64_t z = master + 0x9e3779b97f4a7c15ULL * (shot + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct ShotStatus {
  bool accepted = true;
  std::string discard_label;
  int discard_instr = -1;
  int retries = 0;
};

// Monte Carlo trajectory over a circuit: Pauli faults are sampled after every
// executed gate wire at instructions past body_begin (preparation, measurement
// and idle wires stay noiseless). States remain pure because all channels in
// scope are Pauli channels.
class TrajectoryRunner {
public:
  TrajectoryRunner(const Circuit& c, NoiseSpec noise, uint64_t seed)
      : c_(c), noise_(noise), rng_(seed), state_(c.n_qubits), cbits_(c.n_cbits, 0) {}

  const StateVector& state() const { return state_; }
  StateVector& state() { return state_; }
  const std::vector<int>& cbits() const { return cbits_; }
  int total_retries() const { return retries_; }

  // Runs instructions [from, to). Returns early on a discard checkpoint.
  ShotStatus run_range(size_t from, size_t to) {
    ShotStatus st;
    size_t pc = from;
    while (pc < to) {
      const Instruction& in = c_.instrs[pc];
      switch (in.op) {
        case Instruction::Op::Prep0:
          state_.reset_to_zero(in.qubit);
          break;
        case Instruction::Op::Unitary:
          apply_noisy(in.gate, static_cast<int>(pc));
          break;
        case Instruction::Op::CondGate:
          if (in.cond.eval(cbits_)) apply_noisy(in.gate, static_cast<int>(pc));
          break;
        case Instruction::Op::Measure:
          cbits_[in.cbit] = state_.measure_z(in.qubit, uniform());
          break;
        case Instruction::Op::EcFeedback: {
          std::vector<int> bits;
          bits.reserve(in.cbits.size());
          for (int cb : in.cbits) bits.push_back(cbits_.at(cb));
          Feedback fb = ec_decode_feedback(in.scheme, bits);
          if (fb) apply_noisy(Gate::x(in.block[*fb]), static_cast<int>(pc));
          break;
        }
        case Instruction::Op::Checkpoint:
          if (in.cond.eval(cbits_)) {
            if (in.retry_scope) {
              if (++retries_ > max_retries_) throw std::runtime_error("retry limit exceeded");
              pc = static_cast<size_t>(in.scope_begin);
              continue;
            }
            st.accepted = false;
            st.discard_label = in.label;
            st.discard_instr = static_cast<int>(pc);
            st.retries = retries_;
            return st;
          }
          break;
      }
      ++pc;
    }
    st.retries = retries_;
    return st;
  }

  ShotStatus run_all() { return run_range(0, c_.instrs.size()); }

private:
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  void apply_noisy(const Gate& g, int instr_idx) {
    state_.apply_gate(g);
    if (noise_.p <= 0 || instr_idx < c_.body_begin) return;
    int wires = g.arity();
    for (int w = 0; w < wires; ++w) {
      auto ev = sample_fault(noise_, {instr_idx, w}, g.qubits[w], uniform());
      if (ev) state_.apply_pauli(ev->pauli);
    }
  }

  const Circuit& c_;
  NoiseSpec noise_;
  std::mt19937_64 rng_;
  StateVector state_;
  std::vector<int> cbits_;
  int retries_ = 0;
  int max_retries_ = 10000;
};

}  // namespace repsim
