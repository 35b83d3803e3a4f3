#include <gtest/gtest.h>

#include <cmath>

#include "repsim/density_matrix.hpp"
#include "repsim/fault_oracle.hpp"
#include "repsim/verify.hpp"

using namespace repsim;

namespace {

double coeff(const ErrorExpansion& ex, int key, int block, int j) {
  auto itk = ex.x_coeffs.find(key);
  if (itk == ex.x_coeffs.end()) return 0.0;
  auto itc = itk->second.find({block, j});
  return itc == itk->second.end() ? 0.0 : itc->second;
}

}  // namespace

TEST(FaultOracle, SiteCounts) {
  // single-round syndrome measurement with incoming-error markers: 11 sites
  Circuit c;
  CodeBlock blk{{0, 1, 2}};
  c.require_qubits(4);
  for (int q = 0; q < 3; ++q) c.prep0(q);
  c.mark_body_begin();
  for (int q = 0; q < 3; ++q) c.add(Gate::i(q));
  append_syndrome_round(c, blk, 3);
  EXPECT_EQ(enumerate_faults(c).size(), 11u);

  append_syndrome_round(c, blk, 3);
  EXPECT_EQ(enumerate_faults(c).size(), 19u);

  Circuit empty;
  EXPECT_EQ(enumerate_faults(empty).size(), 0u);
}

TEST(FaultOracle, ClassifyIdentityAndSingleX) {
  Circuit c;
  CodeBlock b{{0, 1, 2}};
  append_encode(c, b, cplx{0.6, 0}, cplx{0.8, 0});
  auto ideal = ExactRunner(c).run()[0].state;
  auto cl = classify_output(ideal, ideal, {b});
  EXPECT_EQ(cl.kind, Classification::Kind::Identity);

  StateVector shifted = ideal;
  shifted.apply_x(1);
  cl = classify_output(shifted, ideal, {b});
  EXPECT_EQ(cl.kind, Classification::Kind::SingleX);
  EXPECT_EQ(cl.block, 0);
  EXPECT_EQ(cl.j, 1);

  StateVector zerr = ideal;
  zerr.apply_z(0);
  cl = classify_output(zerr, ideal, {b});
  EXPECT_EQ(cl.kind, Classification::Kind::Violation);
}

TEST(FaultOracle, Ec2Expansion) {
  auto fx = make_gadget_fixture(GadgetId::Ec2, PostselectRule::DiscardAny,
                                random_logical_inputs(1, 5));
  auto ex = derive_expansion_exact(fx);
  EXPECT_EQ(ex.violations.size(), 0u);
  EXPECT_NEAR(coeff(ex, 0, 0, 0), 3.0, 1e-9);
  EXPECT_NEAR(coeff(ex, 0, 0, 1), 2.0, 1e-9);
  EXPECT_NEAR(coeff(ex, 0, 0, 2), 2.0, 1e-9);
  EXPECT_NEAR(ex.deficit(0), 7.0, 1e-9);
}

TEST(FaultOracle, Ec3Expansion) {
  auto fx = make_gadget_fixture(GadgetId::Ec3, PostselectRule::DiscardAny,
                                random_logical_inputs(1, 6));
  auto ex = derive_expansion_exact(fx);
  EXPECT_EQ(ex.violations.size(), 0u);
  EXPECT_NEAR(coeff(ex, 0, 0, 0), 2.0, 1e-9);
  EXPECT_NEAR(coeff(ex, 0, 0, 1), 4.0, 1e-9);
  EXPECT_NEAR(coeff(ex, 0, 0, 2), 2.0, 1e-9);
  EXPECT_NEAR(ex.deficit(0), 8.0, 1e-9);
}

TEST(FaultOracle, PrepPlusExpansion) {
  auto fx = make_gadget_fixture(GadgetId::PrepPlus, PostselectRule::DiscardAny, {});
  auto ex = derive_expansion_exact(fx);
  EXPECT_EQ(ex.n_sites, 5);
  EXPECT_NEAR(coeff(ex, 0, 0, 0), 1.0, 1e-9);
  EXPECT_NEAR(coeff(ex, 0, 0, 1), 2.0, 1e-9);
  EXPECT_NEAR(coeff(ex, 0, 0, 2), 1.0, 1e-9);
}

TEST(FaultOracle, PrepPlusIExpansionAndDiscard) {
  auto fx = make_gadget_fixture(GadgetId::PrepPlusI, PostselectRule::DiscardAny, {});
  auto ex = derive_expansion_exact(fx);
  EXPECT_EQ(ex.n_sites, 10);
  EXPECT_NEAR(coeff(ex, 0, 0, 0), 1.0, 1e-9);
  EXPECT_NEAR(coeff(ex, 0, 0, 1), 1.0, 1e-9);
  EXPECT_NEAR(coeff(ex, 0, 0, 2), 1.0, 1e-9);
  EXPECT_NEAR(ex.discard_coeff, 6.0, 1e-9);
}

TEST(FaultOracle, STeleportExpansions) {
  auto fx = make_gadget_fixture(GadgetId::STeleport, PostselectRule::DiscardAny,
                                random_logical_inputs(1, 7));
  auto ex = derive_expansion_exact(fx);
  EXPECT_EQ(ex.violations.size(), 0u);
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(coeff(ex, 0, 0, j), 2.0, 1e-9) << j;
    EXPECT_NEAR(coeff(ex, 1, 0, j), 3.0, 1e-9) << j;
  }
  // repeat-until-success preparation: the teleport itself never discards
  EXPECT_NEAR(ex.discard_coeff, 0.0, 1e-9);
}

TEST(FaultOracle, RzExpansions) {
  for (double theta : {M_PI / 7, M_PI / 3, 1.0}) {
    auto fx = make_gadget_fixture(GadgetId::RzGadget, PostselectRule::DiscardAny,
                                  random_logical_inputs(1, 8), theta);
    auto ex = derive_expansion_exact(fx);
    EXPECT_EQ(ex.violations.size(), 0u) << theta;
    EXPECT_NEAR(coeff(ex, 0, 0, 0), 1.0, 1e-9);
    EXPECT_NEAR(coeff(ex, 0, 0, 1), 1.0, 1e-9);
    EXPECT_NEAR(coeff(ex, 0, 0, 2), 1.0, 1e-9);
    EXPECT_NEAR(coeff(ex, 1, 0, 0), 1.0, 1e-9);
    EXPECT_NEAR(coeff(ex, 1, 0, 1), 1.0, 1e-9);
    EXPECT_NEAR(coeff(ex, 1, 0, 2), 2.0, 1e-9);
  }
}

TEST(FaultOracle, CzFrameAccountingMatchesPublished) {
  auto fx = make_gadget_fixture(GadgetId::Cz, PostselectRule::DiscardAny,
                                random_logical_inputs(2, 9));
  auto ex = derive_expansion_frame(fx, 0);
  for (int a = 0; a < 2; ++a) {
    EXPECT_NEAR(coeff(ex, 0, a, 0), 2.0, 1e-9);
    EXPECT_NEAR(coeff(ex, 0, a, 1), 2.0, 1e-9);
    EXPECT_NEAR(coeff(ex, 0, a, 2), 1.0, 1e-9);
  }
  EXPECT_NEAR(ex.deficit(0), 10.0, 1e-9);
}

TEST(FaultOracle, HFrameAccountingMatchesPublished) {
  auto fx = make_gadget_fixture(GadgetId::HTeleport, PostselectRule::DiscardAny,
                                random_logical_inputs(1, 10));
  auto ex0 = derive_expansion_frame(fx, 0);
  EXPECT_NEAR(coeff(ex0, 0, 0, 0), 3.0, 1e-9);
  EXPECT_NEAR(coeff(ex0, 0, 0, 1), 4.0, 1e-9);
  EXPECT_NEAR(coeff(ex0, 0, 0, 2), 2.0, 1e-9);
  auto ex1 = derive_expansion_frame(fx, 1);
  EXPECT_NEAR(coeff(ex1, 1, 0, 0), 4.0, 1e-9);
  EXPECT_NEAR(coeff(ex1, 1, 0, 1), 5.0, 1e-9);
  EXPECT_NEAR(coeff(ex1, 1, 0, 2), 3.0, 1e-9);
}

TEST(FaultOracle, CzExactPostselectedExpansion) {
  // Under exact postselected simulation (discard on any nontrivial syndrome)
  // the CZ gadget keeps one residual X per wire position and block.
  auto fx = make_gadget_fixture(GadgetId::Cz, PostselectRule::DiscardAny,
                                random_logical_inputs(2, 11));
  auto ex = derive_expansion_exact(fx);
  EXPECT_EQ(ex.violations.size(), 0u);
  for (int a = 0; a < 2; ++a)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(coeff(ex, 0, a, j), 1.0, 1e-9);
}

TEST(FaultOracle, NaiveTransversalSViolatesBiasPreservation) {
  auto fx = make_gadget_fixture(GadgetId::NaiveSPrep, PostselectRule::DiscardAny, {});
  auto ex = derive_expansion_exact(fx);
  EXPECT_GT(ex.violations.size(), 0u);
}

TEST(FaultOracle, CnotControlFaultSpreadsCorrectably) {
  auto fx = make_gadget_fixture(GadgetId::CnotL, PostselectRule::DiscardAny,
                                random_logical_inputs(2, 12));
  auto sites = enumerate_faults(fx.circuit);
  ASSERT_EQ(sites.size(), 6u);
  auto ideal = ExactRunner(fx.circuit).run()[0].state;
  // every gate-site fault yields a correctable pattern
  for (const auto& site : sites) {
    auto leaves = ExactRunner(fx.circuit, FaultInjection{site, PauliLetter::X}).run();
    for (const auto& leaf : leaves) {
      auto cl = classify_output(leaf.state, ideal, fx.meta.output_blocks, 1e-9, true);
      EXPECT_NE(cl.kind, Classification::Kind::Violation);
    }
  }
}

TEST(FaultOracle, CnotIncomingControlFaultHitsBothBlocksOnce) {
  // an X entering on a control wire spreads to exactly one X on each block
  Circuit c;
  CodeBlock b1{{0, 1, 2}}, b2{{3, 4, 5}};
  auto inputs = random_logical_inputs(2, 14);
  append_encode(c, b1, inputs[0].first, inputs[0].second);
  append_encode(c, b2, inputs[1].first, inputs[1].second);
  c.mark_body_begin();
  c.add(Gate::i(b1[1]));  // incoming-error marker on the control block
  append_logical_cnot(c, b1, b2);
  auto ideal = ExactRunner(c).run()[0].state;
  auto leaves = ExactRunner(c, FaultInjection{enumerate_faults(c)[0], PauliLetter::X}).run();
  auto cl = classify_output(leaves[0].state, ideal, {b1, b2}, 1e-9, true);
  EXPECT_EQ(cl.kind, Classification::Kind::MultiBlockX);
  // and the exact pattern is X on qubit 2 of each block
  StateVector cand = ideal;
  cand.apply_x(b1[1]);
  cand.apply_x(b2[1]);
  EXPECT_NEAR(leaves[0].state.squared_overlap(cand), 1.0, 1e-10);
}

TEST(FaultOracle, FullVerificationReportPasses) {
  auto rep = run_verification(PostselectRule::DiscardAny);
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(row.pass) << row.gadget << " outcome " << row.outcome_key << " deficit "
                          << row.derived_deficit << " expected " << row.expected_deficit;
  }
  EXPECT_TRUE(rep.control_ok);
  EXPECT_TRUE(rep.all_pass);
}

TEST(FaultOracle, VerificationStableUnderQ1Rule) {
  // the exact-convention rows are insensitive to the postselection rule
  auto rep = run_verification(PostselectRule::DiscardQ1Signature);
  for (const auto& row : rep.rows)
    EXPECT_TRUE(row.pass) << row.gadget << " outcome " << row.outcome_key;
}

TEST(FaultOracle, BiasScanFindsNoViolations) {
  for (auto rule : {PostselectRule::DiscardAny, PostselectRule::DiscardQ1Signature}) {
    auto res = bias_preservation_scan(rule);
    EXPECT_EQ(res.violations, 0) << (res.details.empty() ? "" : res.details[0]);
    EXPECT_GT(res.total_sites, 100);
  }
}

TEST(FaultOracle, PrepPlusIExpansionCrossCheckedAgainstDensityMatrix) {
  // Independent route: extract the linear coefficient of the post-selected
  // identity deficit from small-p density-matrix runs and compare with the
  // tree-derived 3p.
  Circuit c;
  c.require_qubits(4);
  CodeBlock b{{0, 1, 2}};
  append_prep_plus_i(c, b, 3, +1, false);
  auto ideal = ExactRunner(c).run()[0].state;

  auto deficit_at = [&](double p) {
    auto res = evolve_density(StateVector(4), c, NoiseSpec(p));
    return 1.0 - res.rho.fidelity_with_pure(ideal);
  };
  double p1 = 1e-4, p2 = 2e-4;
  double d1 = deficit_at(p1), d2 = deficit_at(p2);
  // Richardson: linear coefficient = (4 d1 - d2) / (2 p1) cancels the p^2 term
  double slope = (4 * d1 - d2) / (2 * p1);
  EXPECT_NEAR(slope, 3.0, 0.02);
}

TEST(FaultOracle, GadgetCatalogLooksSane) {
  auto cat = gadget_catalog(PostselectRule::DiscardAny);
  EXPECT_GE(cat.size(), 8u);
  for (const auto& e : cat) {
    EXPECT_GT(e.n_qubits, 2);
    EXPECT_GT(e.n_fault_sites, 0);
  }
}
