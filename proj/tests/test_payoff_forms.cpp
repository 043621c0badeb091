#include <doctest.h>

#include <cmath>

#include "qgkd/constants.hpp"
#include "qgkd/payoff_forms.hpp"
#include "qgkd/state_core.hpp"

using namespace qgkd;

namespace {

PayoffMatrix random_matrix(Rng& rng) {
  PayoffMatrix m;
  for (auto& row : m.entries)
    for (double& v : row) v = rng.uniform(-3.0, 3.0);
  return m;
}

PayoffMatrix random_dual_matrix(Rng& rng) {
  PayoffMatrix m;
  for (int k = 0; k < 3; ++k)
    for (int lab = 0; lab < 4; ++lab) {
      const double v = rng.uniform(-3.0, 3.0);
      m.entries[k][lab] = v;
      m.entries[k][7 - lab] = v;
    }
  return m;
}

StrategyTriple random_strategies(Rng& rng) {
  StrategyTriple s;
  for (Player k : {Player::A, Player::B, Player::C})
    s.of(k) = {rng.uniform(0.0, kPi), rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)};
  return s;
}

StrategyTriple random_theta_only(Rng& rng) {
  return StrategyTriple::from_theta(rng.uniform(0.0, kPi), rng.uniform(0.0, kPi),
                                    rng.uniform(0.0, kPi));
}

double max_abs_diff(const Payoffs& a, const Payoffs& b) {
  double worst = 0;
  for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

}  // namespace

TEST_CASE("closed form equals oracle across the full parameter space") {
  Rng rng(101);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const EntanglementConfig cfg{rng.uniform(0.0, kPi / 2), rng.uniform(0.0, kPi / 2)};
    const StrategyTriple s = random_strategies(rng);
    const PayoffMatrix m = random_matrix(rng);
    worst = std::max(worst, max_abs_diff(expected_payoffs_closed(cfg, s, m),
                                         expected_payoffs_oracle(cfg, s, m)));
  }
  CHECK(worst < tol::kClosedForm);
}

TEST_CASE("transcribed variant of the closed form diverges from the oracle") {
  // One phase argument in the source text carries a sign typo; the variant
  // reproducing it must measurably disagree with the oracle somewhere.
  Rng rng(102);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const EntanglementConfig cfg{rng.uniform(0.1, kPi / 2), rng.uniform(0.1, kPi / 2)};
    const StrategyTriple s = random_strategies(rng);
    const PayoffMatrix m = random_matrix(rng);
    worst = std::max(worst, max_abs_diff(expected_payoffs_as_printed(cfg, s, m),
                                         expected_payoffs_oracle(cfg, s, m)));
  }
  CHECK(worst > 0.01);
}

TEST_CASE("closed form product case") {
  Rng rng(103);
  const PayoffMatrix m = random_matrix(rng);
  const Payoffs p = expected_payoffs_closed(non_entangled(), StrategyTriple{}, m);
  for (Player k : {Player::A, Player::B, Player::C})
    CHECK(p[index(k)] == doctest::Approx(m.at(k, 0b000)).epsilon(1e-12));
}

TEST_CASE("interference term vanishes at regime endpoints") {
  Rng rng(104);
  for (int i = 0; i < 50; ++i) {
    const PayoffMatrix m = random_matrix(rng);
    StrategyTriple s = random_theta_only(rng);
    SUBCASE("") {}
    // theta endpoint
    StrategyTriple se = s;
    se.of(Player::B).theta = (i % 2) ? 0.0 : kPi;
    const EntanglementConfig cfg{rng.uniform(0.0, kPi / 2), rng.uniform(0.0, kPi / 2)};
    for (Player k : {Player::A, Player::B, Player::C}) {
      CHECK(std::abs(interference_term(cfg, se, m, k)) < tol::kLastTermVanish);
      CHECK(std::abs(interference_term(non_entangled(), s, m, k)) < tol::kLastTermVanish);
      CHECK(std::abs(interference_term(max_entangled(), s, m, k)) < tol::kLastTermVanish);
    }
  }
}

TEST_CASE("coefficient quads: endpoints and convexity") {
  Rng rng(105);
  const PayoffMatrix m = random_matrix(rng);
  for (Player k : {Player::A, Player::B, Player::C}) {
    const CoefficientQuad one = coefficient_quad(m, k, Player::B, 1.0, QuadVariant::NonEntangled);
    CHECK(one.d == m.at(k, 0b000));
    CHECK(one.e == m.at(k, 0b100));
    CHECK(one.f == m.at(k, 0b001));
    CHECK(one.g == m.at(k, 0b101));
    const CoefficientQuad zero = coefficient_quad(m, k, Player::B, 0.0, QuadVariant::NonEntangled);
    CHECK(zero.d == m.at(k, 0b010));
    CHECK(zero.e == m.at(k, 0b110));
    CHECK(zero.f == m.at(k, 0b011));
    CHECK(zero.g == m.at(k, 0b111));
    const CoefficientQuad mid = coefficient_quad(m, k, Player::B, 0.5, QuadVariant::NonEntangled);
    CHECK(mid.d == doctest::Approx(0.5 * (m.at(k, 0b000) + m.at(k, 0b010))).epsilon(1e-14));
    CHECK(mid.g == doctest::Approx(0.5 * (m.at(k, 0b101) + m.at(k, 0b111))).epsilon(1e-14));
  }
  CHECK_THROWS_AS(coefficient_quad(m, Player::A, Player::B, 1.5, QuadVariant::NonEntangled),
                  std::domain_error);
}

TEST_CASE("non-entangled bilinear views match the oracle") {
  Rng rng(106);
  const PayoffMatrix m = random_matrix(rng);
  // Bob's view endpoints
  for (Player k : {Player::A, Player::B, Player::C}) {
    const double cb = rng.uniform(0.0, 1.0);
    const CoefficientQuad q = coefficient_quad(m, k, Player::B, cb, QuadVariant::NonEntangled);
    CHECK(nonentangled_payoff_view(m, Player::B, {1.0, cb, 1.0}, k) ==
          doctest::Approx(q.d).epsilon(1e-12));
    CHECK(nonentangled_payoff_view(m, Player::B, {1.0, cb, 0.0}, k) ==
          doctest::Approx(q.f).epsilon(1e-12));
  }
  for (int i = 0; i < 200; ++i) {
    const PayoffMatrix mt = random_matrix(rng);
    const StrategyTriple s = random_theta_only(rng);
    const std::array<double, 3> C{s.C(Player::A), s.C(Player::B), s.C(Player::C)};
    const Payoffs oracle = expected_payoffs_oracle(non_entangled(), s, mt);
    for (Player viewer : {Player::A, Player::B, Player::C})
      for (Player k : {Player::A, Player::B, Player::C})
        CHECK(std::abs(nonentangled_payoff_view(mt, viewer, C, k) - oracle[index(k)]) <
              tol::kClosedForm);
  }
}

TEST_CASE("maximally entangled bilinear views match the oracle") {
  Rng rng(107);
  for (int i = 0; i < 200; ++i) {
    const PayoffMatrix m = random_matrix(rng);
    const StrategyTriple s = random_theta_only(rng);
    const std::array<double, 3> C{s.C(Player::A), s.C(Player::B), s.C(Player::C)};
    const Payoffs oracle = expected_payoffs_oracle(max_entangled(), s, m);
    for (Player viewer : {Player::A, Player::B, Player::C})
      for (Player k : {Player::A, Player::B, Player::C})
        CHECK(std::abs(maxentangled_payoff_view(m, viewer, C, k) - oracle[index(k)]) <
              tol::kClosedForm);
  }
}

TEST_CASE("single-player reduction at maximum entanglement pairs 000 with 011") {
  Rng rng(108);
  for (int i = 0; i < 50; ++i) {
    const PayoffMatrix m = random_matrix(rng);
    StrategyTriple s = StrategyTriple::from_theta(rng.uniform(0.0, kPi), 0.0, 0.0);
    const Payoffs p = expected_payoffs_oracle(max_entangled(), s, m);
    for (Player k : {Player::A, Player::B, Player::C})
      CHECK(p[index(k)] == doctest::Approx(s.C(Player::A) * m.at(k, 0b000) +
                                           s.S(Player::A) * m.at(k, 0b011))
                               .epsilon(1e-10));
  }
}

TEST_CASE("outcome-pair swap is an involution and links the two regimes") {
  Rng rng(109);
  const PayoffMatrix fixed = PayoffMatrix::constant(1.7);
  const PayoffMatrix same = symmetry_permute_matrix(fixed);
  for (int k = 0; k < 3; ++k)
    for (int lab = 0; lab < 8; ++lab) CHECK(same.entries[k][lab] == 1.7);

  for (int i = 0; i < 100; ++i) {
    const PayoffMatrix m = random_matrix(rng);
    const PayoffMatrix twice = symmetry_permute_matrix(symmetry_permute_matrix(m));
    for (int k = 0; k < 3; ++k)
      for (int lab = 0; lab < 8; ++lab) CHECK(twice.entries[k][lab] == m.entries[k][lab]);

    const StrategyTriple s = random_theta_only(rng);
    const Payoffs maxp = expected_payoffs_oracle(max_entangled(), s, m);
    const Payoffs nonp = expected_payoffs_oracle(non_entangled(), s, symmetry_permute_matrix(m));
    CHECK(max_abs_diff(maxp, nonp) < tol::kSymmetryMap);
  }
}

TEST_CASE("phase absorption into the payoff matrix") {
  Rng rng(110);
  // alpha = beta = 0 at either endpoint: identity map
  const PayoffMatrix m0 = random_matrix(rng);
  for (const EntanglementConfig cfg : {non_entangled(), max_entangled()}) {
    const PayoffMatrix t = phase_transform_matrix(m0, StrategyTriple{}, cfg);
    for (int k = 0; k < 3; ++k)
      for (int lab = 0; lab < 8; ++lab)
        CHECK(t.entries[k][lab] == doctest::Approx(m0.entries[k][lab]).epsilon(1e-12));
  }

  for (const EntanglementConfig cfg : {non_entangled(), max_entangled()}) {
    for (int i = 0; i < 200; ++i) {
      const PayoffMatrix m = random_matrix(rng);
      const StrategyTriple s = random_strategies(rng);
      StrategyTriple bare = s;
      for (Player k : {Player::A, Player::B, Player::C}) {
        bare.of(k).alpha = 0;
        bare.of(k).beta = 0;
      }
      const Payoffs with_phases = expected_payoffs_oracle(cfg, s, m);
      const Payoffs absorbed =
          expected_payoffs_oracle(cfg, bare, phase_transform_matrix(m, s, cfg));
      CHECK(max_abs_diff(with_phases, absorbed) < tol::kPhaseTransform);
    }
  }
  CHECK_THROWS_AS(
      phase_transform_matrix(m0, StrategyTriple{}, EntanglementConfig{0.3, 0.3}),
      std::domain_error);
}

TEST_CASE("partial-regime payoff matches the oracle on both branches") {
  Rng rng(111);
  for (PartialBranch branch : {PartialBranch::DeltaZero, PartialBranch::GammaZero}) {
    const EntanglementConfig cfg = partial_branch_config(branch);
    for (int i = 0; i < 200; ++i) {
      const PayoffMatrix m = random_matrix(rng);
      const StrategyTriple s = partial_strategies(
          rng.uniform(0.0, kPi), rng.uniform(0.0, kPi), rng.uniform(0.0, kPi));
      CHECK(has_partial_phases(s));
      CHECK(max_abs_diff(partial_payoff(s, m, branch), expected_payoffs_oracle(cfg, s, m)) <
            tol::kClosedForm);
      const auto probs = partial_outcome_probabilities(s, branch);
      double sum = 0;
      for (double p : probs) sum += p;
      CHECK(std::abs(sum - 1.0) < tol::kDistSum);
    }
  }
  CHECK(max_abs_diff(partial_payoff(partial_strategies(0.4, 0.9, 1.3),
                                    PayoffMatrix::constant(1.0), PartialBranch::DeltaZero),
                     {1.0, 1.0, 1.0}) < 1e-12);
  CHECK_THROWS_AS(partial_payoff(StrategyTriple{}, PayoffMatrix::constant(0.0),
                                 PartialBranch::DeltaZero),
                  std::domain_error);
}

TEST_CASE("branch swap under Charlie's half-angle sign flip") {
  Rng rng(112);
  for (int i = 0; i < 50; ++i) {
    const StrategyTriple s = partial_strategies(rng.uniform(0.0, kPi), rng.uniform(0.0, kPi),
                                                rng.uniform(0.0, kPi));
    const auto pi = partial_outcome_probabilities(s, PartialBranch::DeltaZero);
    const auto pii = partial_outcome_probabilities(s, PartialBranch::GammaZero);
    // flipping s_C -> -s_C in the amplitude is the same as switching branches
    const double c[3] = {s.of(Player::A).c(), s.of(Player::B).c(), s.of(Player::C).c()};
    const double sn[3] = {s.of(Player::A).s(), s.of(Player::B).s(), -s.of(Player::C).s()};
    for (int lab = 0; lab < 8; ++lab) {
      double t = 1, tc = 1;
      for (Player p : {Player::A, Player::B, Player::C}) {
        t *= bit_of(lab, p) ? sn[index(p)] : c[index(p)];
        tc *= bit_of(7 - lab, p) ? sn[index(p)] : c[index(p)];
      }
      const double eps = (((lab >> 2) ^ (lab >> 1) ^ lab) & 1) ? -1.0 : 1.0;
      const double amp = t + eps * tc;
      CHECK(std::abs(0.5 * amp * amp - pii[lab]) < 1e-12);
      (void)pi;
    }
  }
}

TEST_CASE("half-angle reduction is exact when Alice plays theta = pi/2") {
  Rng rng(113);
  for (PartialBranch branch : {PartialBranch::DeltaZero, PartialBranch::GammaZero}) {
    for (int i = 0; i < 50; ++i) {
      const double tB = rng.uniform(0.0, kPi), tC = rng.uniform(0.0, kPi);
      const PayoffMatrix m = random_matrix(rng);
      const Payoffs direct =
          expected_payoffs_oracle(partial_branch_config(branch),
                                  partial_strategies(kPi / 2, tB, tC), m);
      CHECK(max_abs_diff(partial_halfangle_payoff(tB, tC, m, branch), direct) <
            tol::kClosedForm);
    }
  }
}

TEST_CASE("complement-pair equality predicate") {
  Rng rng(114);
  const PayoffMatrix dual = random_dual_matrix(rng);
  CHECK(satisfies_not_duality(dual, 1e-12));
  PayoffMatrix broken = dual;
  broken.at(Player::B, 0b110) += 0.5;
  CHECK(!satisfies_not_duality(broken, 1e-12));
  CHECK(satisfies_not_duality(broken, Player::A, 1e-12));
  CHECK(!satisfies_not_duality(broken, Player::B, 1e-12));
}

TEST_CASE("partial dual bilinear views match the oracle") {
  Rng rng(115);
  for (PartialBranch branch : {PartialBranch::DeltaZero, PartialBranch::GammaZero}) {
    const EntanglementConfig cfg = partial_branch_config(branch);
    for (int i = 0; i < 200; ++i) {
      const PayoffMatrix m = random_dual_matrix(rng);
      const StrategyTriple s = partial_strategies(rng.uniform(0.0, kPi), rng.uniform(0.0, kPi),
                                                  rng.uniform(0.0, kPi));
      const std::array<double, 3> C{s.C(Player::A), s.C(Player::B), s.C(Player::C)};
      const Payoffs oracle = expected_payoffs_oracle(cfg, s, m);
      for (Player viewer : {Player::A, Player::B, Player::C})
        for (Player k : {Player::A, Player::B, Player::C})
          CHECK(std::abs(partial_dual_payoff_view(m, viewer, C, k) - oracle[index(k)]) <
                tol::kClosedForm);
    }
  }
  Rng r2(116);
  const PayoffMatrix dual = random_dual_matrix(r2);
  for (Player k : {Player::A, Player::B, Player::C}) {
    CHECK(partial_dual_payoff_view(dual, Player::A, {1, 1, 1}, k) ==
          doctest::Approx(dual.at(k, 0b000)).epsilon(1e-12));
    CHECK(partial_dual_payoff_view(dual, Player::B, {0, 0, 0}, k) ==
          doctest::Approx(dual.at(k, 0b000)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(partial_dual_payoff_view(random_matrix(r2), Player::A, {0.5, 0.5, 0.5},
                                           Player::A),
                  std::domain_error);
}
