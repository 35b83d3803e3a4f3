#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "repsim/executor.hpp"
#include "repsim/gadgets.hpp"

namespace repsim {

// One X-insertion point per single-qubit gate wire, two per two-qubit gate,
// none on preparations and measurements. Conditional correction gates count
// when they fire. Prologue instructions (before body_begin) are excluded.
inline std::vector<FaultSite> enumerate_faults(const Circuit& c) {
  std::vector<FaultSite> sites;
  for (int i = c.body_begin; i < static_cast<int>(c.instrs.size()); ++i) {
    const auto& in = c.instrs[i];
    if (in.op == Instruction::Op::Unitary || in.op == Instruction::Op::CondGate) {
      for (int w = 0; w < in.gate.arity(); ++w) sites.push_back({i, w});
    }
  }
  return sites;
}

struct Classification {
  enum class Kind : uint8_t { Identity, SingleX, MultiBlockX, Violation } kind = Kind::Identity;
  int block = -1;
  int j = -1;
  double best_overlap = 0.0;
  bool ambiguous = false;
};

// Compares an accepted output against the ideal and every single-X-shifted
// ideal; VIOLATION when nothing reaches 1 - 1e-9 (a Y/Z component or an
// uncorrectable X pattern escaped). With allow_multi_block, correctable
// patterns of at most one X per block are also accepted (transversal CNOT
// spreads a control fault to one X on each block).
inline Classification classify_output(const StateVector& output, const StateVector& ideal,
                                      const std::vector<CodeBlock>& blocks, double thresh = 1e-9,
                                      bool allow_multi_block = false) {
  Classification best;
  best.kind = Classification::Kind::Violation;
  int matches = 0;
  double id_ov = output.squared_overlap(ideal);
  best.best_overlap = id_ov;
  if (id_ov > 1.0 - thresh) {
    best = {Classification::Kind::Identity, -1, -1, id_ov, false};
    ++matches;
  }
  // patterns: per block, -1 (no X) or qubit index 0..2; at least one X
  int nb = static_cast<int>(blocks.size());
  std::vector<int> pattern(nb, -1);
  auto advance = [&]() {
    for (int a = 0; a < nb; ++a) {
      if (pattern[a] < 2) { ++pattern[a]; return true; }
      pattern[a] = -1;
    }
    return false;
  };
  while (advance()) {
    int blocks_with_x = 0;
    for (int a = 0; a < nb; ++a) blocks_with_x += pattern[a] >= 0;
    if (blocks_with_x == 0) continue;
    if (!allow_multi_block && blocks_with_x > 1) continue;
    StateVector cand = ideal;
    for (int a = 0; a < nb; ++a)
      if (pattern[a] >= 0) cand.apply_x(blocks[a][pattern[a]]);
    double ov = output.squared_overlap(cand);
    if (ov > best.best_overlap && matches == 0) best.best_overlap = ov;
    if (ov > 1.0 - thresh) {
      if (matches == 0) {
        if (blocks_with_x == 1) {
          int a = 0;
          while (pattern[a] < 0) ++a;
          best = {Classification::Kind::SingleX, a, pattern[a], ov, false};
        } else {
          best = {Classification::Kind::MultiBlockX, -1, -1, ov, false};
        }
      }
      ++matches;
    }
  }
  if (matches > 1) best.ambiguous = true;
  return best;
}

struct ViolationReport {
  FaultSite site;
  int input_index = 0;
  int outcome_key = 0;
  double best_overlap = 0.0;
  bool ambiguous = false;
};

// Leading-order output decomposition of a gadget. Coefficients are in units
// of p: identity coefficient is 1 - (sum of x_coeffs) p + O(p^2) after
// renormalization by the acceptance probability.
struct ErrorExpansion {
  std::map<int, std::map<std::pair<int, int>, double>> x_coeffs;  // key -> (block, j) -> coeff
  std::map<int, double> outcome_prob;                             // ideal P(key)
  double discard_coeff = 0.0;                                     // coefficient of p
  std::vector<ViolationReport> violations;
  int n_sites = 0;
  // per-site diagnostic: "instr.wire -> class summary", for failure reports
  std::vector<std::pair<std::string, std::string>> site_classes;

  double deficit(int key) const {
    double s = 0;
    auto it = x_coeffs.find(key);
    if (it != x_coeffs.end())
      for (const auto& [qj, v] : it->second) s += v;
    return s;
  }
};

// A gadget circuit prepared for fault enumeration: prologue encodes the
// logical inputs, body carries the fault sites.
struct GadgetFixture {
  std::string name;
  Circuit circuit;
  GadgetMeta meta;
};

// Exact single-fault expansion: every catalog site is run through the exact
// branching executor and each accepted leaf is classified by state overlap
// against the outcome-matched ideal leaf.
inline ErrorExpansion derive_expansion_exact(const GadgetFixture& fx) {
  ErrorExpansion ex;
  auto sites = enumerate_faults(fx.circuit);
  ex.n_sites = static_cast<int>(sites.size());

  // Ideal run: unique output state per outcome key.
  std::map<int, StateVector> ideal_states;
  {
    auto leaves = ExactRunner(fx.circuit).run();
    for (const auto& leaf : leaves) {
      if (!leaf.accepted) throw std::runtime_error(fx.name + ": ideal run hit a checkpoint");
      int key = fx.meta.outcome.key(leaf.cbits);
      ex.outcome_prob[key] += leaf.prob;
      auto it = ideal_states.find(key);
      if (it == ideal_states.end()) {
        ideal_states.emplace(key, leaf.state);
      } else if (leaf.state.squared_overlap(it->second) < 1.0 - 1e-9) {
        throw std::runtime_error(fx.name + ": ideal output not unique per outcome");
      }
    }
  }

  for (const auto& site : sites) {
    auto leaves = ExactRunner(fx.circuit, FaultInjection{site, PauliLetter::X}).run();
    double total = 0;
    std::string summary;
    for (const auto& leaf : leaves) {
      total += leaf.prob;
      if (!leaf.accepted) {
        ex.discard_coeff += leaf.prob;
        if (summary.find("discard") == std::string::npos) summary += "discard;";
        continue;
      }
      int key = fx.meta.outcome.key(leaf.cbits);
      auto it = ideal_states.find(key);
      if (it == ideal_states.end())
        throw std::runtime_error(fx.name + ": faulted run reached unseen outcome");
      Classification cl = classify_output(leaf.state, it->second, fx.meta.output_blocks);
      if (cl.kind == Classification::Kind::Violation || cl.ambiguous) {
        ex.violations.push_back({site, 0, key, cl.best_overlap, cl.ambiguous});
        summary += cl.ambiguous ? "AMBIGUOUS;" : "VIOLATION;";
      } else if (cl.kind == Classification::Kind::SingleX) {
        ex.x_coeffs[key][{cl.block, cl.j}] += leaf.prob / ex.outcome_prob[key];
        summary += "X(" + std::to_string(cl.block) + "," + std::to_string(cl.j) + ")@" +
                   std::to_string(key) + ";";
      } else if (summary.find("id;") == std::string::npos) {
        summary += "id;";
      }
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::runtime_error(fx.name + ": leaf probabilities do not sum to 1");
    ex.site_classes.push_back(
        {std::to_string(site.instr) + "." + std::to_string(site.wire), summary});
  }
  return ex;
}

// Clifford X-frame propagation: the leading-order bookkeeping used for the
// reference CZ and H expansions. The injected X is conjugated through the
// remaining gates, measurement-outcome coupling is ignored, and the X pattern
// on each output block is reduced to minimum weight modulo the logical X.
// Only Clifford instructions are supported.
class PauliFramePropagator {
public:
  explicit PauliFramePropagator(int n_qubits) : x_(n_qubits, 0), z_(n_qubits, 0) {}

  void inject_x(int q) { x_[q] ^= 1; }

  void conjugate(const Gate& g) {
    switch (g.kind) {
      case GateKind::I:
      case GateKind::X:
      case GateKind::Y:
      case GateKind::Z:
        return;
      case GateKind::H:
        std::swap(x_[g.qubits[0]], z_[g.qubits[0]]);
        return;
      case GateKind::S:
      case GateKind::Sdg:
        z_[g.qubits[0]] ^= x_[g.qubits[0]];
        return;
      case GateKind::Cnot:
        x_[g.qubits[1]] ^= x_[g.qubits[0]];
        z_[g.qubits[0]] ^= z_[g.qubits[1]];
        return;
      case GateKind::Cz:
        z_[g.qubits[1]] ^= x_[g.qubits[0]];
        z_[g.qubits[0]] ^= x_[g.qubits[1]];
        return;
      default:
        throw std::invalid_argument("frame propagation requires Clifford gates");
    }
  }

  void clear(int q) { x_[q] = 0; z_[q] = 0; }
  void clear_z(int q) { z_[q] = 0; }
  int x_bit(int q) const { return x_[q]; }

private:
  std::vector<uint8_t> x_, z_;
};

// Frame-accounting expansion for a given conditional branch: branch_fired
// selects whether conditional correction gates execute (and contribute their
// own fault sites).
inline ErrorExpansion derive_expansion_frame(const GadgetFixture& fx, int branch_fired) {
  ErrorExpansion ex;
  const Circuit& c = fx.circuit;
  std::vector<FaultSite> sites;
  for (int i = c.body_begin; i < static_cast<int>(c.instrs.size()); ++i) {
    const auto& in = c.instrs[i];
    if (in.op == Instruction::Op::Unitary ||
        (in.op == Instruction::Op::CondGate && branch_fired))
      for (int w = 0; w < in.gate.arity(); ++w) sites.push_back({i, w});
  }
  ex.n_sites = static_cast<int>(sites.size());
  ex.outcome_prob[branch_fired] = 1.0;

  for (const auto& site : sites) {
    PauliFramePropagator frame(c.n_qubits);
    bool injected = false;
    for (int i = site.instr; i < static_cast<int>(c.instrs.size()); ++i) {
      const auto& in = c.instrs[i];
      switch (in.op) {
        case Instruction::Op::Unitary:
        case Instruction::Op::CondGate: {
          bool fires = in.op == Instruction::Op::Unitary || branch_fired;
          if (i == site.instr) {
            if (!fires) break;
            frame.inject_x(in.gate.qubits[site.wire]);
            injected = true;
            break;
          }
          if (fires) frame.conjugate(in.gate);
          break;
        }
        case Instruction::Op::Prep0:
          frame.clear(in.qubit);
          break;
        case Instruction::Op::Measure:
          frame.clear_z(in.qubit);
          break;
        case Instruction::Op::EcFeedback:
          throw std::invalid_argument("frame accounting does not support EC feedback");
        case Instruction::Op::Checkpoint:
          break;
      }
    }
    if (!injected) continue;
    for (int a = 0; a < static_cast<int>(fx.meta.output_blocks.size()); ++a) {
      const CodeBlock& b = fx.meta.output_blocks[a];
      std::array<int, 3> bits = {frame.x_bit(b[0]), frame.x_bit(b[1]), frame.x_bit(b[2])};
      int w = bits[0] + bits[1] + bits[2];
      if (w == 1) {
        int j = bits[0] ? 0 : bits[1] ? 1 : 2;
        ex.x_coeffs[branch_fired][{a, j}] += 1.0;
      } else if (w == 2) {
        int j = !bits[0] ? 0 : !bits[1] ? 1 : 2;  // complement, modulo X_L
        ex.x_coeffs[branch_fired][{a, j}] += 1.0;
      }
      // w == 0 or 3: identity modulo the logical X
    }
  }
  return ex;
}

}  // namespace repsim
