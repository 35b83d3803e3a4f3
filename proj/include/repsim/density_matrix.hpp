#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "repsim/circuit.hpp"
#include "repsim/noise.hpp"
#include "repsim/rep_code.hpp"
#include "repsim/state_vector.hpp"

namespace repsim {

// Small-system density operator, capped at 12 qubits (4^12 entries is the
// desk-scale ceiling). Used as the verification oracle for trajectory runs.
class DensityMatrix {
public:
  explicit DensityMatrix(int n_qubits) : n_(n_qubits), dim_(size_t{1} << n_qubits) {
    if (n_qubits < 0 || n_qubits > 12) throw std::invalid_argument("density matrix capped at 12 qubits");
    rho_.assign(dim_ * dim_, cplx{0, 0});
    rho_[0] = 1.0;
  }

  static DensityMatrix from_pure(const StateVector& psi) {
    DensityMatrix dm(psi.n_qubits());
    for (size_t r = 0; r < dm.dim_; ++r)
      for (size_t c = 0; c < dm.dim_; ++c)
        dm.at(r, c) = psi[r] * std::conj(psi[c]);
    return dm;
  }

  int n_qubits() const { return n_; }
  size_t dim() const { return dim_; }
  cplx& at(size_t r, size_t c) { return rho_[r * dim_ + c]; }
  const cplx& at(size_t r, size_t c) const { return rho_[r * dim_ + c]; }

  double trace() const {
    double t = 0;
    for (size_t i = 0; i < dim_; ++i) t += at(i, i).real();
    return t;
  }

  double max_hermiticity_violation() const {
    double m = 0;
    for (size_t r = 0; r < dim_; ++r)
      for (size_t c = r; c < dim_; ++c)
        m = std::max(m, std::abs(at(r, c) - std::conj(at(c, r))));
    return m;
  }

  void scale(double f) {
    for (auto& v : rho_) v *= f;
  }

  void normalize() {
    double t = trace();
    if (t <= 0) throw std::runtime_error("cannot normalize zero-trace state");
    scale(1.0 / t);
  }

  void add_scaled(const DensityMatrix& o, double w) {
    for (size_t i = 0; i < rho_.size(); ++i) rho_[i] += w * o.rho_[i];
  }

  void apply_gate(const Gate& g) {
    switch (g.kind) {
      case GateKind::I: return;
      case GateKind::Cnot: apply_cnot(g.qubits[0], g.qubits[1]); return;
      case GateKind::Cz: apply_cz(g.qubits[0], g.qubits[1]); return;
      default: apply_1q(g.qubits[0], gate_matrix_1q(g)); return;
    }
  }

  void apply_1q(int q, const std::array<cplx, 4>& u) {
    size_t bit = size_t{1} << q;
    // rho -> U rho
    for (size_t r = 0; r < dim_; ++r) {
      if (r & bit) continue;
      for (size_t c = 0; c < dim_; ++c) {
        cplx a = at(r, c), b = at(r | bit, c);
        at(r, c) = u[0] * a + u[1] * b;
        at(r | bit, c) = u[2] * a + u[3] * b;
      }
    }
    // rho -> rho U^dagger
    for (size_t c = 0; c < dim_; ++c) {
      if (c & bit) continue;
      for (size_t r = 0; r < dim_; ++r) {
        cplx a = at(r, c), b = at(r, c | bit);
        at(r, c) = a * std::conj(u[0]) + b * std::conj(u[1]);
        at(r, c | bit) = a * std::conj(u[2]) + b * std::conj(u[3]);
      }
    }
  }

  void apply_cnot(int control, int target) {
    size_t cb = size_t{1} << control, tb = size_t{1} << target;
    auto flip = [&](size_t i) { return (i & cb) ? (i ^ tb) : i; };
    permute(flip);
  }

  void apply_cz(int q1, int q2) {
    size_t b1 = size_t{1} << q1, b2 = size_t{1} << q2;
    for (size_t r = 0; r < dim_; ++r)
      for (size_t c = 0; c < dim_; ++c) {
        int sign = 0;
        if ((r & b1) && (r & b2)) sign ^= 1;
        if ((c & b1) && (c & b2)) sign ^= 1;
        if (sign) at(r, c) = -at(r, c);
      }
  }

  void apply_pauli(const PauliString& p) {
    for (const auto& [q, l] : p.letters()) apply_gate(Gate::pauli(q, l));
  }

  // rho -> sum_k w_k P_k rho P_k
  void apply_pauli_channel(const std::vector<KrausTerm>& terms) {
    DensityMatrix out(n_);
    out.rho_.assign(dim_ * dim_, cplx{0, 0});
    for (const auto& t : terms) {
      if (t.weight == 0) continue;
      DensityMatrix branch = *this;
      branch.apply_pauli(t.pauli);
      out.add_scaled(branch, t.weight);
    }
    rho_ = std::move(out.rho_);
  }

  // Reset channel: measure-and-rotate-to-zero.
  void reset_to_zero(int q) {
    size_t bit = size_t{1} << q;
    DensityMatrix out(n_);
    out.rho_.assign(dim_ * dim_, cplx{0, 0});
    for (size_t r = 0; r < dim_; ++r)
      for (size_t c = 0; c < dim_; ++c) {
        if ((r & bit) == 0 && (c & bit) == 0) out.at(r, c) += at(r, c);
        if ((r & bit) && (c & bit)) out.at(r & ~bit, c & ~bit) += at(r, c);
      }
    rho_ = std::move(out.rho_);
  }

  // Unnormalized projection onto a measurement outcome; returns the branch
  // probability (trace change).
  double project(int q, int outcome) {
    size_t bit = size_t{1} << q;
    for (size_t r = 0; r < dim_; ++r)
      for (size_t c = 0; c < dim_; ++c) {
        bool rkeep = ((r & bit) != 0) == (outcome == 1);
        bool ckeep = ((c & bit) != 0) == (outcome == 1);
        if (!rkeep || !ckeep) at(r, c) = 0;
      }
    return trace();
  }

  double prob_one(int q) const {
    size_t bit = size_t{1} << q;
    double p = 0;
    for (size_t i = 0; i < dim_; ++i)
      if (i & bit) p += at(i, i).real();
    return p;
  }

  double expectation_pauli(const PauliString& p) const {
    DensityMatrix tmp = *this;
    // tr(P rho): apply P from the left only, then take the trace.
    tmp.apply_left_pauli(p);
    cplx t{0, 0};
    for (size_t i = 0; i < tmp.dim_; ++i) t += tmp.at(i, i);
    return t.real();
  }

  // Fidelity against a pure state: <psi| rho |psi>.
  double fidelity_with_pure(const StateVector& psi) const {
    cplx acc{0, 0};
    for (size_t r = 0; r < dim_; ++r)
      for (size_t c = 0; c < dim_; ++c) acc += std::conj(psi[r]) * at(r, c) * psi[c];
    return acc.real();
  }

private:
  void apply_left_pauli(const PauliString& p) {
    // Left multiplication by a Pauli: permutation plus phases on rows.
    std::vector<cplx> out(dim_ * dim_, cplx{0, 0});
    for (size_t r = 0; r < dim_; ++r) {
      size_t rr = r;
      cplx phase = p.phase();
      for (const auto& [q, l] : p.letters()) {
        size_t bit = size_t{1} << q;
        bool one = (rr & bit) != 0;
        switch (l) {
          case PauliLetter::X: rr ^= bit; break;
          case PauliLetter::Y: phase *= one ? cplx{0, -1} : cplx{0, 1}; rr ^= bit; break;
          case PauliLetter::Z: if (one) phase = -phase; break;
          default: break;
        }
      }
      // rr is the source row index mapped from r by P acting on kets:
      // (P rho)[r'] rows: P|r> = phase |rr>. Accumulate accordingly.
      for (size_t c = 0; c < dim_; ++c) out[rr * dim_ + c] += phase * rho_[r * dim_ + c];
    }
    rho_ = std::move(out);
  }

  template <typename F>
  void permute(F&& index_map) {
    std::vector<cplx> out(dim_ * dim_, cplx{0, 0});
    for (size_t r = 0; r < dim_; ++r) {
      size_t rr = index_map(r);
      for (size_t c = 0; c < dim_; ++c) out[rr * dim_ + index_map(c)] = rho_[r * dim_ + c];
    }
    rho_ = std::move(out);
  }

  int n_;
  size_t dim_;
  std::vector<cplx> rho_;
};

// Exact density-matrix evolution of a circuit under the gate noise model.
// Unitary instructions are followed by their Kraus channel; measurements
// branch on the classical record; discard checkpoints drop the branch.
// Returns the accepted density matrix (normalized) and the acceptance
// probability.
struct DmResult {
  DensityMatrix rho{0};
  double acceptance = 1.0;
};

inline DmResult evolve_density(const StateVector& input, const Circuit& c, const NoiseSpec& noise,
                               int max_retries = 64, double weight_floor = 1e-14) {
  if (c.n_qubits > 12) throw std::invalid_argument("density oracle capacity exceeded");
  struct Branch {
    DensityMatrix rho{0};
    std::vector<int> cbits;
    double weight = 1.0;
    size_t pc = 0;
    int retries = 0;
  };

  auto apply_noise = [&](DensityMatrix& rho, const Gate& g, int instr_idx) {
    if (noise.p <= 0 || instr_idx < c.body_begin) return;
    if (g.arity() == 2) {
      if (noise.epsilon == 0.0) {
        rho.apply_pauli_channel(two_qubit_kraus(noise, g.qubits[0], g.qubits[1]));
      } else {
        rho.apply_pauli_channel(single_qubit_kraus(noise, g.qubits[0]));
        rho.apply_pauli_channel(single_qubit_kraus(noise, g.qubits[1]));
      }
    } else {
      rho.apply_pauli_channel(single_qubit_kraus(noise, g.qubits[0]));
    }
  };

  std::vector<Branch> live;
  Branch b0;
  b0.rho = DensityMatrix::from_pure(input);
  b0.cbits.assign(c.n_cbits, 0);
  live.push_back(std::move(b0));

  DensityMatrix accepted(c.n_qubits);
  accepted.scale(0.0);
  double acc_weight = 0.0;

  while (!live.empty()) {
    Branch br = std::move(live.back());
    live.pop_back();
    bool dead = false;
    while (br.pc < c.instrs.size()) {
      const Instruction& in = c.instrs[br.pc];
      switch (in.op) {
        case Instruction::Op::Prep0:
          br.rho.reset_to_zero(in.qubit);
          break;
        case Instruction::Op::Unitary:
          br.rho.apply_gate(in.gate);
          apply_noise(br.rho, in.gate, static_cast<int>(br.pc));
          break;
        case Instruction::Op::CondGate:
          if (in.cond.eval(br.cbits)) {
            br.rho.apply_gate(in.gate);
            apply_noise(br.rho, in.gate, static_cast<int>(br.pc));
          }
          break;
        case Instruction::Op::Measure: {
          DensityMatrix r1 = br.rho;
          double p1 = r1.project(in.qubit, 1);
          double p0 = br.rho.project(in.qubit, 0);
          if (br.weight * p1 > weight_floor) {
            Branch child = br;
            child.rho = std::move(r1);
            child.rho.normalize();
            child.weight = br.weight * p1;
            child.cbits[in.cbit] = 1;
            child.pc = br.pc + 1;
            live.push_back(std::move(child));
          }
          if (br.weight * p0 <= weight_floor) { dead = true; break; }
          br.rho.normalize();
          br.weight *= p0;
          br.cbits[in.cbit] = 0;
          break;
        }
        case Instruction::Op::EcFeedback: {
          std::vector<int> bits;
          for (int cb : in.cbits) bits.push_back(br.cbits.at(cb));
          Feedback fb = ec_decode_feedback(in.scheme, bits);
          if (fb) {
            Gate g = Gate::x(in.block[*fb]);
            br.rho.apply_gate(g);
            apply_noise(br.rho, g, static_cast<int>(br.pc));
          }
          break;
        }
        case Instruction::Op::Checkpoint:
          if (in.cond.eval(br.cbits)) {
            if (in.retry_scope) {
              // Retry weight decays geometrically; past the cap the branch
              // carries negligible probability and is dropped.
              if (++br.retries > max_retries) { dead = true; break; }
              br.pc = static_cast<size_t>(in.scope_begin);
              continue;
            }
            dead = true;
          }
          break;
      }
      if (dead) break;
      ++br.pc;
    }
    if (!dead) {
      accepted.add_scaled(br.rho, br.weight);
      acc_weight += br.weight;
    }
  }

  if (acc_weight <= 0) throw std::runtime_error("zero acceptance probability");
  DmResult res;
  accepted.scale(1.0 / acc_weight);
  res.rho = std::move(accepted);
  res.acceptance = acc_weight;
  return res;
}

}  // namespace repsim
