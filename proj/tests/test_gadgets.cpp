#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "repsim/executor.hpp"
#include "repsim/gadgets.hpp"
#include "repsim/verify.hpp"

using namespace repsim;

namespace {

// Decodes a block of an output state against a 1-qubit reference: builds the
// encoded reference on the same wires and compares.
double decoded_overlap(const StateVector& out, const Circuit& shape, const CodeBlock& blk,
                       const std::array<cplx, 2>& ref) {
  Circuit c;
  c.require_qubits(shape.n_qubits);
  append_encode(c, blk, ref[0], ref[1]);
  auto leaves = ExactRunner(c).run();
  return out.squared_overlap(leaves[0].state);
}

std::array<cplx, 2> apply_1q(const std::array<cplx, 4>& u, const std::array<cplx, 2>& v) {
  return {u[0] * v[0] + u[1] * v[1], u[2] * v[0] + u[3] * v[1]};
}

std::array<cplx, 2> normalized(std::array<cplx, 2> v) {
  double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  return {v[0] / n, v[1] / n};
}

std::pair<cplx, cplx> random_input(uint64_t seed) {
  return random_logical_inputs(1, seed)[0];
}

}  // namespace

TEST(Gadgets, LogicalPaulis) {
  Circuit c;
  CodeBlock b{{0, 1, 2}};
  for (int q = 0; q < 3; ++q) c.prep0(q);
  append_logical_x(c, b);
  auto leaves = ExactRunner(c).run();
  StateVector ones(3);
  ones.apply_x(0);
  ones.apply_x(1);
  ones.apply_x(2);
  EXPECT_NEAR(leaves[0].state.squared_overlap(ones), 1.0, 1e-12);

  // Z_L flips the sign of |111> relative to |000>
  Circuit c2;
  append_encode(c2, b, 1 / std::sqrt(2), 1 / std::sqrt(2));
  append_logical_z(c2, b);
  auto l2 = ExactRunner(c2).run();
  Circuit c3;
  append_encode(c3, b, 1 / std::sqrt(2), -1 / std::sqrt(2));
  auto l3 = ExactRunner(c3).run();
  EXPECT_NEAR(l2[0].state.squared_overlap(l3[0].state), 1.0, 1e-12);

  // Y_L is an involution on the codespace
  Circuit c4;
  append_encode(c4, b, cplx{0.6, 0}, cplx{0, 0.8});
  append_logical_y(c4, b);
  append_logical_y(c4, b);
  auto l4 = ExactRunner(c4).run();
  Circuit c5;
  append_encode(c5, b, cplx{0.6, 0}, cplx{0, 0.8});
  auto l5 = ExactRunner(c5).run();
  EXPECT_NEAR(l4[0].state.squared_overlap(l5[0].state), 1.0, 1e-12);
}

TEST(Gadgets, LogicalCnotActsOnCodewords) {
  Circuit c;
  CodeBlock b1{{0, 1, 2}}, b2{{3, 4, 5}};
  append_encode(c, b1, 0, 1);  // |1>_L
  append_encode(c, b2, 1, 0);  // |0>_L
  append_logical_cnot(c, b1, b2);
  auto leaves = ExactRunner(c).run();
  Circuit ref;
  append_encode(ref, b1, 0, 1);
  append_encode(ref, b2, 0, 1);
  auto rl = ExactRunner(ref).run();
  EXPECT_NEAR(leaves[0].state.squared_overlap(rl[0].state), 1.0, 1e-12);
}

TEST(Gadgets, PrepPlusNoiseless) {
  Circuit c;
  CodeBlock b{{0, 1, 2}};
  append_prep_plus(c, b);
  auto leaves = ExactRunner(c).run();
  Circuit ref;
  append_encode(ref, b, 1 / std::sqrt(2), 1 / std::sqrt(2));
  auto rl = ExactRunner(ref).run();
  EXPECT_NEAR(leaves[0].state.squared_overlap(rl[0].state), 1.0, 1e-12);
}

TEST(Gadgets, PrepPlusINoiseless) {
  for (int sign : {+1, -1}) {
    Circuit c;
    c.require_qubits(4);
    CodeBlock b{{0, 1, 2}};
    append_prep_plus_i(c, b, 3, sign, false);
    auto leaves = ExactRunner(c).run();
    ASSERT_EQ(leaves.size(), 1u);
    EXPECT_TRUE(leaves[0].accepted);
    Circuit ref;
    ref.require_qubits(4);
    append_encode(ref, b, 1 / std::sqrt(2), cplx{0, sign / std::sqrt(2)});
    auto rl = ExactRunner(ref).run();
    EXPECT_NEAR(leaves[0].state.squared_overlap(rl[0].state), 1.0, 1e-12);
  }
}

TEST(Gadgets, CzNoiselessPhase) {
  // |1>_L |1>_L picks up the -1 phase relative to untouched codewords
  Circuit c;
  CodeBlock b1{{0, 1, 2}}, b2{{3, 4, 5}};
  c.require_qubits(7);
  double r = 1 / std::sqrt(2);
  append_encode(c, b1, r, r);
  append_encode(c, b2, 0, 1);
  append_logical_cz(c, b1, b2, 6, PostselectRule::DiscardAny);
  auto leaves = ExactRunner(c).run();
  ASSERT_EQ(leaves.size(), 1u);
  EXPECT_TRUE(leaves[0].accepted);
  // CZ_L (|0>+|1>)|1> = (|0>-|1>)|1>
  Circuit ref;
  ref.require_qubits(7);
  append_encode(ref, b1, r, -r);
  append_encode(ref, b2, 0, 1);
  auto rl = ExactRunner(ref).run();
  EXPECT_NEAR(leaves[0].state.squared_overlap(rl[0].state), 1.0, 1e-12);
}

TEST(Gadgets, MeasureXLogicalDeterministicOnEigenstates) {
  for (int sign : {+1, -1}) {
    Circuit c;
    c.require_qubits(4);
    CodeBlock b{{0, 1, 2}};
    double r = 1 / std::sqrt(2);
    append_encode(c, b, r, sign * r);
    OutcomeSpec out = append_measure_x_logical(c, b, 3);
    auto leaves = ExactRunner(c).run();
    ASSERT_EQ(leaves.size(), 1u);
    int key = out.key(leaves[0].cbits);
    EXPECT_EQ(key, sign > 0 ? 0 : 1);
  }
}

TEST(Gadgets, STeleportImplementsS) {
  for (int sign : {+1, -1}) {
    for (uint64_t seed : {1u, 2u, 3u}) {
      auto [a, b] = random_input(seed);
      Circuit c;
      c.require_qubits(7);
      CodeBlock data{{0, 1, 2}}, res{{3, 4, 5}};
      append_encode(c, data, a, b);
      auto meta = append_s_teleport(c, data, res, 6, sign);
      auto leaves = ExactRunner(c).run();
      auto u = gate_matrix_1q(sign > 0 ? Gate::s(0) : Gate::sdg(0));
      auto refamp = normalized(apply_1q(u, {a, b}));
      double total = 0;
      for (const auto& leaf : leaves) {
        ASSERT_TRUE(leaf.accepted);
        total += leaf.prob;
        EXPECT_NEAR(decoded_overlap(leaf.state, c, res, refamp), 1.0, 1e-10);
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Gadgets, HTeleportImplementsH) {
  for (uint64_t seed : {4u, 5u, 6u}) {
    auto [a, b] = random_input(seed);
    Circuit c;
    c.require_qubits(7);
    CodeBlock data{{0, 1, 2}}, res{{3, 4, 5}};
    append_encode(c, data, a, b);
    auto meta = append_h_teleport(c, data, res, 6, PostselectRule::DiscardAny);
    auto leaves = ExactRunner(c).run();
    auto refamp = normalized(apply_1q(gate_matrix_1q(Gate::h(0)), {a, b}));
    double total = 0;
    for (const auto& leaf : leaves) {
      ASSERT_TRUE(leaf.accepted);
      total += leaf.prob;
      EXPECT_NEAR(decoded_overlap(leaf.state, c, res, refamp), 1.0, 1e-10);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Gadgets, RzGadgetImplementsRz) {
  for (double theta : {M_PI / 7, M_PI / 3, 1.0, 0.0}) {
    auto [a, b] = random_input(77);
    Circuit c;
    c.require_qubits(7);
    CodeBlock data{{0, 1, 2}}, ancblk{{3, 4, 5}};
    append_encode(c, data, a, b);
    auto meta = append_rz_gadget(c, data, ancblk, 6, theta, PostselectRule::DiscardAny);
    auto leaves = ExactRunner(c).run();
    auto refamp = normalized(apply_1q(gate_matrix_1q(Gate::rz(0, theta)), {a, b}));
    double total = 0;
    for (const auto& leaf : leaves) {
      ASSERT_TRUE(leaf.accepted);
      total += leaf.prob;
      EXPECT_NEAR(decoded_overlap(leaf.state, c, data, refamp), 1.0, 1e-10);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Gadgets, RotationDecompositionsMatchDirectGates) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uth(-M_PI, M_PI);
  for (int trial = 0; trial < 10; ++trial) {
    double th = uth(rng);
    // physical-level identity check of the decompositions
    StateVector s(1);
    s.apply_gate(Gate::ry(0, 0.9));  // arbitrary start

    StateVector direct = s;
    direct.apply_gate(Gate::rx(0, th));
    StateVector dec = s;
    for (auto& op : rotation_decompose(LogicalOpKind::RxL, 0, th)) {
      switch (op.kind) {
        case LogicalOpKind::HL: dec.apply_gate(Gate::h(0)); break;
        case LogicalOpKind::RzL: dec.apply_gate(Gate::rz(0, op.theta)); break;
        default: FAIL();
      }
    }
    EXPECT_NEAR(dec.squared_overlap(direct), 1.0, 1e-10);

    StateVector direct_y = s;
    direct_y.apply_gate(Gate::ry(0, th));
    StateVector dec_y = s;
    for (auto& op : rotation_decompose(LogicalOpKind::RyL, 0, th)) {
      switch (op.kind) {
        case LogicalOpKind::HL: dec_y.apply_gate(Gate::h(0)); break;
        case LogicalOpKind::RzL: dec_y.apply_gate(Gate::rz(0, op.theta)); break;
        case LogicalOpKind::SL: dec_y.apply_gate(Gate::s(0)); break;
        case LogicalOpKind::SdgL: dec_y.apply_gate(Gate::sdg(0)); break;
        default: FAIL();
      }
    }
    EXPECT_NEAR(dec_y.squared_overlap(direct_y), 1.0, 1e-10);
  }
}

TEST(Gadgets, SingleFaultExamplesFromFigures) {
  // X right after the H in |+>_L preparation leaves the state invariant
  Circuit c;
  CodeBlock b{{0, 1, 2}};
  append_prep_plus(c, b);
  auto sites = enumerate_faults(c);
  // sites: H wire, then cnot wires
  auto ideal = ExactRunner(c).run();
  auto leaves = ExactRunner(c, FaultInjection{sites[0], PauliLetter::X}).run();
  EXPECT_NEAR(leaves[0].state.squared_overlap(ideal[0].state), 1.0, 1e-12);
}

TEST(Gadgets, PrepPlusIDetectsYConversion) {
  // X on the first qubit before S becomes a Y error, caught by the Z1Z2 check
  Circuit c;
  c.require_qubits(4);
  CodeBlock b{{0, 1, 2}};
  append_prep_plus_i(c, b, 3, +1, false);
  auto sites = enumerate_faults(c);
  // find the site on the last fan-out CNOT's control wire (X1 before S)
  // body sites: H(0), cnot(0,1) x2 wires, cnot(0,2) x2 wires, S, sm cnots...
  FaultSite x1_before_s = sites[3];  // cnot(0,2) control wire
  auto leaves = ExactRunner(c, FaultInjection{x1_before_s, PauliLetter::X}).run();
  ASSERT_EQ(leaves.size(), 1u);
  EXPECT_FALSE(leaves[0].accepted);  // discarded by postselection
}

TEST(Gadgets, CzIncomingXOnFirstQubitIsDiscarded) {
  // an incoming X on block1 qubit 1 creates a Z partner through the CZ and
  // fires the block-1 syndrome measurement
  Circuit c;
  c.require_qubits(7);
  CodeBlock b1{{0, 1, 2}}, b2{{3, 4, 5}};
  double r = 1 / std::sqrt(2);
  append_encode(c, b1, r, r);
  append_encode(c, b2, r, r);
  c.mark_body_begin();
  c.add(Gate::i(0));  // incoming-error marker on block1 qubit 1
  append_logical_cz(c, b1, b2, 6, PostselectRule::DiscardQ1Signature);
  auto sites = enumerate_faults(c);
  auto leaves = ExactRunner(c, FaultInjection{sites[0], PauliLetter::X}).run();
  for (const auto& leaf : leaves) EXPECT_FALSE(leaf.accepted);
}
