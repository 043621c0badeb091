#include <doctest.h>

#include <cmath>

#include "qgkd/constants.hpp"
#include "qgkd/generators.hpp"
#include "qgkd/key_recovery.hpp"
#include "qgkd/state_core.hpp"

using namespace qgkd;

namespace {

StrategyTriple triple_from_C(double ca, double cb, double cc) {
  return StrategyTriple::from_theta(theta_from_C(ca), theta_from_C(cb), theta_from_C(cc));
}

StrategyTriple partial_triple_from_C(double ca, double cb, double cc) {
  return partial_strategies(theta_from_C(ca), theta_from_C(cb), theta_from_C(cc));
}

}  // namespace

TEST_CASE("case classification of generated matrices") {
  Rng rng(201);
  for (SymmetryCase c : {SymmetryCase::CaseI, SymmetryCase::CaseII, SymmetryCase::CaseIII}) {
    for (int i = 0; i < 20; ++i) {
      const PayoffMatrix m = generate_case_matrix(c, rng);
      CHECK(classify_symmetry_case(m, false) == c);
      CHECK(validate_ratio_distinctness(m).distinct);
    }
  }
  for (SymmetryCase c :
       {SymmetryCase::PartialSymI, SymmetryCase::PartialSymII, SymmetryCase::PartialSymIII}) {
    for (int i = 0; i < 20; ++i) {
      const PayoffMatrix m = generate_case_matrix(c, rng);
      CHECK(classify_symmetry_case(m, true) == c);
      CHECK(satisfies_not_duality(m, 1e-12));
    }
  }
  for (int i = 0; i < 20; ++i) {
    CHECK(classify_symmetry_case(generate_generic_matrix(rng), false) == SymmetryCase::None);
  }
  // the third class is the conjunction of the first two
  const PayoffMatrix m3 = generate_case_matrix(SymmetryCase::CaseIII, rng);
  for (Player k : {Player::A, Player::B}) {
    CHECK(case_holds_for_player(m3, k, SymmetryCase::CaseI));
    CHECK(case_holds_for_player(m3, k, SymmetryCase::CaseII));
  }
}

TEST_CASE("ratio distinctness validation") {
  Rng rng(202);
  PayoffMatrix distinct;
  for (int k = 0; k < 3; ++k)
    for (int lab = 0; lab < 8; ++lab) distinct.entries[k][lab] = lab * 3 + k * 1.37 + 1.0;
  CHECK(validate_ratio_distinctness(distinct).distinct);

  PayoffMatrix collide = distinct;
  for (int k = 0; k < 3; ++k)
    collide.entries[k][0b101] = 2.0 * collide.entries[k][0b010];
  const RatioReport r = validate_ratio_distinctness(collide);
  CHECK(!r.distinct);
  REQUIRE(r.collisions.size() == 1);
  CHECK(r.collisions[0] == std::pair<int, int>(0b010, 0b101));

  const RatioReport all_equal = validate_ratio_distinctness(PayoffMatrix::constant(2.0));
  CHECK(!all_equal.distinct);
  CHECK(all_equal.collisions.size() == 28);

  PayoffMatrix degenerate = distinct;
  for (int k = 0; k < 3; ++k) degenerate.entries[k][3] = 0.0;
  CHECK(!validate_ratio_distinctness(degenerate).distinct);
  CHECK(validate_ratio_distinctness(degenerate).degenerate ==
        std::vector<int>{3});
}

TEST_CASE("outcome identification from payoff ratios") {
  Rng rng(203);
  const PayoffMatrix m = generate_generic_matrix(rng);
  for (int lab = 0; lab < 8; ++lab) {
    const auto row = payoff_row(m, lab);
    CHECK(alice_identify_outcome({row[0], row[1], row[2]}, m) == lab);
    const double lambda = rng.uniform(0.1, 5.0);
    CHECK(alice_identify_outcome({lambda * row[0], lambda * row[1], lambda * row[2]}, m) == lab);
  }
  CHECK_THROWS_AS(alice_identify_outcome({1.0, -1.0, 1.0}, m), std::runtime_error);
  CHECK_THROWS_AS(alice_identify_outcome({0.0, 0.0, 0.0}, m), std::runtime_error);
  CHECK_THROWS_AS(alice_identify_outcome({1.0, 1.0, 1.0}, PayoffMatrix::constant(1.0)),
                  std::runtime_error);
}

TEST_CASE("opponent product inference, exact and sampled") {
  Rng rng(204);
  for (int i = 0; i < 50; ++i) {
    const double ca = rng.uniform(0.1, 0.9), cb = rng.uniform(0.1, 0.9),
                 cc = rng.uniform(0.1, 0.9);
    const auto dist = outcome_distribution(
        final_state(non_entangled(), triple_from_C(ca, cb, cc)), 0.0);
    const OpponentProducts prod = alice_infer_opponent_product(dist, ca);
    CHECK(prod.product() == doctest::Approx(cb * cc).epsilon(1e-10));
    CHECK(prod.cb() == doctest::Approx(cb).epsilon(1e-10));
    CHECK(prod.cc() == doctest::Approx(cc).epsilon(1e-10));
  }

  // sampled estimate concentrates
  const double cb = 0.5, cc = 0.5;
  const auto dist =
      outcome_distribution(final_state(non_entangled(), triple_from_C(0.4, cb, cc)), 0.0);
  Rng sampler(205);
  const std::uint64_t shots = 1000000;
  const auto counts = sample_counts(dist, shots, sampler);
  std::array<double, 8> freq{};
  for (int lab = 0; lab < 8; ++lab) freq[lab] = double(counts[lab]) / double(shots);
  const OpponentProducts est = alice_infer_opponent_product(freq, 0.4);
  CHECK(std::abs(est.product() - cb * cc) < 0.01);

  std::array<double, 8> bad{};
  bad[0] = 0.3;
  CHECK_THROWS_AS(alice_infer_opponent_product(bad, 0.5), std::domain_error);
}

TEST_CASE("replay disambiguation") {
  Rng rng(206);
  const auto dist =
      outcome_distribution(final_state(non_entangled(), triple_from_C(0.5, 0.3, 0.7)), 0.0);

  // exact mode resolves in one replay
  const ReplayResolution exact = disambiguate_by_replay({dist, dist}, 0.5, true);
  CHECK(exact.status == ReplayResolution::Status::Resolved);
  CHECK(exact.cb == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(exact.cc == doctest::Approx(0.7).epsilon(1e-9));

  // changing strategies between rounds is a protocol violation
  const auto dist2 =
      outcome_distribution(final_state(non_entangled(), triple_from_C(0.5, 0.8, 0.7)), 0.0);
  CHECK(disambiguate_by_replay({dist, dist2}, 0.5, true).status ==
        ReplayResolution::Status::ProtocolViolation);

  // single-shot rounds that all landed on the same profile stay ambiguous
  std::array<double, 8> onehot{};
  onehot[0b000] = 1.0;
  const ReplayResolution stuck = disambiguate_by_replay({onehot, onehot}, 0.5, false);
  CHECK(stuck.status == ReplayResolution::Status::AmbiguityRemains);
  CHECK(stuck.residual_ambiguity == doctest::Approx(1.0 / 64.0));

  // two different observed profiles resolve the split
  std::array<double, 8> other{};
  other[0b001] = 1.0;
  const ReplayResolution split = disambiguate_by_replay({onehot, other}, 0.5, false);
  CHECK(split.status == ReplayResolution::Status::Resolved);
}

TEST_CASE("replay ambiguity rate decays exponentially") {
  Rng rng(207);
  for (int i = 0; i < 20; ++i) {
    const double cb = rng.uniform(0.2, 0.8), cc = rng.uniform(0.2, 0.8);
    const auto dist = outcome_distribution(
        final_state(non_entangled(), triple_from_C(0.5, cb, cc)), 0.0);
    double prev = replay_ambiguity_rate(dist, 0);
    CHECK(prev == doctest::Approx(1.0));
    for (int r = 1; r <= 6; ++r) {
      const double rate = replay_ambiguity_rate(dist, r);
      CHECK(rate < prev);
      CHECK(rate <= std::pow(std::max({cb * cc, (1 - cb) * cc, cb * (1 - cc),
                                       (1 - cb) * (1 - cc)}),
                             r) *
                        (1 + 1e-12));
      prev = rate;
    }
    // uniform strategies: the exact rate is 4 * (1/4)^{1+r} = (1/4)^r
    const auto uniform = outcome_distribution(
        final_state(non_entangled(), triple_from_C(0.5, 0.5, 0.5)), 0.0);
    CHECK(replay_ambiguity_rate(uniform, 3) == doctest::Approx(std::pow(0.25, 3)));
  }
}

TEST_CASE("two-payoff recovery round trips") {
  Rng rng(208);
  for (SymmetryCase c : {SymmetryCase::CaseI, SymmetryCase::CaseII}) {
    int successes = 0;
    for (int i = 0; i < 260 && successes < 200; ++i) {
      const PayoffMatrix m = generate_case_matrix(c, rng);
      const double ca = rng.uniform(0.1, 0.9), cb = rng.uniform(0.1, 0.9),
                   cc = rng.uniform(0.1, 0.9);
      const Payoffs p = expected_payoffs_oracle(non_entangled(), triple_from_C(ca, cb, cc), m);
      const Disclosure d = Disclosure::payoffs_ab(p[0], p[1]);
      const RecoveredInfo bob = c == SymmetryCase::CaseI
                                    ? recover_nonentangled_caseI(d, m, cb, Player::B)
                                    : recover_nonentangled_caseII(d, m, cb, Player::B);
      const RecoveredInfo cha = c == SymmetryCase::CaseI
                                    ? recover_nonentangled_caseI(d, m, cc, Player::C)
                                    : recover_nonentangled_caseII(d, m, cc, Player::C);
      if (!bob.ok() || !cha.ok()) continue;
      ++successes;
      CHECK(*bob.c_of(Player::A) == doctest::Approx(ca).epsilon(tol::kRecovery));
      CHECK(*bob.c_of(Player::C) == doctest::Approx(cc).epsilon(tol::kRecovery));
      CHECK(*cha.c_of(Player::A) == doctest::Approx(ca).epsilon(tol::kRecovery));
      CHECK(*cha.c_of(Player::B) == doctest::Approx(cb).epsilon(tol::kRecovery));
      for (Player k : {Player::A, Player::B, Player::C}) {
        REQUIRE(bob.payoffs[index(k)].has_value());
        REQUIRE(cha.payoffs[index(k)].has_value());
        CHECK(*bob.payoffs[index(k)] == doctest::Approx(p[index(k)]).epsilon(tol::kRecovery));
        // cross-party agreement
        CHECK(std::abs(*bob.payoffs[index(k)] - *cha.payoffs[index(k)]) < tol::kRecovery);
      }
    }
    CHECK(successes >= 200);
  }
}

TEST_CASE("two-payoff recovery failure modes") {
  Rng rng(209);
  const PayoffMatrix m = generate_case_matrix(SymmetryCase::CaseI, rng);
  // own C = 1/2 at a symmetric point can survive; instead force the second
  // denominator by a matrix whose D = E identically.
  PayoffMatrix flat = m;
  for (int k = 0; k < 3; ++k) {
    flat.entries[k][0b100] = flat.entries[k][0b000];
    flat.entries[k][0b110] = flat.entries[k][0b010];
    flat.entries[k][0b101] = flat.entries[k][0b001];
    flat.entries[k][0b111] = flat.entries[k][0b011];
  }
  // D=E and F=G for all viewers: payoffs no longer depend on C_A at all
  const Payoffs p = expected_payoffs_oracle(non_entangled(), triple_from_C(0.3, 0.4, 0.6), flat);
  const RecoveredInfo rec =
      recover_nonentangled_caseI(Disclosure::payoffs_ab(p[0], p[1]), flat, 0.4, Player::B);
  CHECK(rec.status == RecoveryStatus::Singular);

  // a disclosure inconsistent with any strategy triple
  const RecoveredInfo bad = recover_nonentangled_caseI(
      Disclosure::payoffs_ab(1e6, -1e6), m, 0.4, Player::B);
  CHECK((bad.status == RecoveryStatus::Inconsistent || bad.status == RecoveryStatus::Singular));

  CHECK_THROWS_AS(
      recover_nonentangled_caseI(Disclosure::alice_all(1.0, 0.5), m, 0.4, Player::B),
      std::domain_error);
  CHECK_THROWS_AS(
      recover_nonentangled_caseI(Disclosure::payoffs_ab(1.0, 1.0), m, 0.4, Player::A),
      std::domain_error);
}

TEST_CASE("full-disclosure recovery round trips for all three cases") {
  Rng rng(210);
  for (SymmetryCase c : {SymmetryCase::CaseI, SymmetryCase::CaseII, SymmetryCase::CaseIII}) {
    int successes = 0;
    for (int i = 0; i < 260 && successes < 200; ++i) {
      const PayoffMatrix m = generate_case_matrix(c, rng);
      const double ca = rng.uniform(0.1, 0.9), cb = rng.uniform(0.1, 0.9),
                   cc = rng.uniform(0.1, 0.9);
      const Payoffs p = expected_payoffs_oracle(non_entangled(), triple_from_C(ca, cb, cc), m);
      const Disclosure d = Disclosure::alice_all(p[0], ca);
      const RecoveredInfo bob = recover_from_alice_disclosure(d, m, cb, Player::B, c);
      const RecoveredInfo cha = recover_from_alice_disclosure(d, m, cc, Player::C, c);
      if (!bob.ok() || !cha.ok()) continue;
      ++successes;
      CHECK(*bob.c_of(Player::C) == doctest::Approx(cc).epsilon(tol::kRecovery));
      CHECK(*cha.c_of(Player::B) == doctest::Approx(cb).epsilon(tol::kRecovery));
      for (Player k : {Player::A, Player::B, Player::C})
        CHECK(*bob.payoffs[index(k)] == doctest::Approx(p[index(k)]).epsilon(tol::kRecovery));
    }
    CHECK(successes >= 200);
  }

  // zero C_A breaks the quotient
  const PayoffMatrix m3 = generate_case_matrix(SymmetryCase::CaseIII, rng);
  CHECK(recover_from_alice_disclosure(Disclosure::alice_all(1.0, 0.0), m3, 0.4, Player::B,
                                      SymmetryCase::CaseIII)
            .status == RecoveryStatus::Singular);
}

TEST_CASE("fully degenerate tables expose no private information") {
  const PayoffMatrix flat = PayoffMatrix::constant(1.0);
  const RecoveredInfo rec = recover_from_alice_disclosure(
      Disclosure::alice_all(1.0, 0.6), flat, 0.3, Player::B, SymmetryCase::CaseIII);
  CHECK(rec.status == RecoveryStatus::NoInformation);
  for (Player k : {Player::A, Player::B, Player::C})
    CHECK(*rec.payoffs[index(k)] == doctest::Approx(1.0));
}

TEST_CASE("partial-regime full-disclosure recovery") {
  Rng rng(211);
  const double ca_fixed = std::pow(std::cos(kPi / 8), 2);  // theta_A = pi/4
  int successes = 0;
  for (int i = 0; i < 260 && successes < 200; ++i) {
    const PayoffMatrix m = generate_not_dual_matrix(rng);
    const double cb = rng.uniform(0.1, 0.9), cc = rng.uniform(0.1, 0.9);
    const Payoffs p = expected_payoffs_oracle(partial_branch_config(PartialBranch::DeltaZero),
                                              partial_triple_from_C(ca_fixed, cb, cc), m);
    const Disclosure d = Disclosure::alice_all(p[0], ca_fixed);
    const RecoveredInfo bob = recover_partial(d, m, cb, Player::B);
    const RecoveredInfo cha = recover_partial(d, m, cc, Player::C);
    if (!bob.ok() || !cha.ok()) continue;
    ++successes;
    CHECK(*bob.c_of(Player::C) == doctest::Approx(cc).epsilon(tol::kRecovery));
    CHECK(*cha.c_of(Player::B) == doctest::Approx(cb).epsilon(tol::kRecovery));
    // recovered info reproduces the disclosed payoff through the dual view
    const std::array<double, 3> C{ca_fixed, cb, *bob.c_of(Player::C)};
    CHECK(partial_dual_payoff_view(m, Player::B, C, Player::A) ==
          doctest::Approx(p[0]).epsilon(tol::kPHatExact));
    for (Player k : {Player::A, Player::B, Player::C})
      CHECK(*bob.payoffs[index(k)] == doctest::Approx(p[index(k)]).epsilon(tol::kRecovery));
  }
  CHECK(successes >= 200);

  CHECK_THROWS_AS(
      recover_partial(Disclosure::alice_all(1.0, 0.5), generate_generic_matrix(rng), 0.4,
                      Player::B),
      std::domain_error);
}

TEST_CASE("minimal-disclosure recovery in the symmetric partial cases") {
  Rng rng(212);

  // case I: only Bob can act, and what he learns is Alice's C
  int successes = 0;
  for (int i = 0; i < 260 && successes < 200; ++i) {
    const PayoffMatrix m = generate_case_matrix(SymmetryCase::PartialSymI, rng);
    const double ca = rng.uniform(0.1, 0.9), cc = rng.uniform(0.1, 0.9);
    double cb = rng.uniform(0.1, 0.9);
    if (std::abs(cb - 0.5) < 0.05) cb = 0.8;
    const Payoffs p = expected_payoffs_oracle(partial_branch_config(PartialBranch::DeltaZero),
                                              partial_triple_from_C(ca, cb, cc), m);
    const RecoveredInfo bob = recover_partial_symmetric(Disclosure::payoff_a_only(p[0]), m, cb,
                                                        Player::B, SymmetryCase::PartialSymI);
    if (!bob.ok()) continue;
    ++successes;
    CHECK(*bob.c_of(Player::A) == doctest::Approx(ca).epsilon(tol::kRecovery));
    CHECK(!bob.c_of(Player::C).has_value());
    // payoffs for the constrained slices match even without Charlie's C
    for (Player k : {Player::A, Player::B, Player::C})
      if (bob.payoffs[index(k)])
        CHECK(*bob.payoffs[index(k)] == doctest::Approx(p[index(k)]).epsilon(tol::kRecovery));
    CHECK(recover_partial_symmetric(Disclosure::payoff_a_only(p[0]), m, cc, Player::C,
                                    SymmetryCase::PartialSymI)
              .status == RecoveryStatus::Unsupported);
  }
  CHECK(successes >= 200);

  // case II: both opponents recover each other's C
  successes = 0;
  for (int i = 0; i < 260 && successes < 200; ++i) {
    const PayoffMatrix m = generate_case_matrix(SymmetryCase::PartialSymII, rng);
    const double ca = rng.uniform(0.1, 0.9);
    double cb = rng.uniform(0.1, 0.9), cc = rng.uniform(0.1, 0.9);
    if (std::abs(cb - 0.5) < 0.05) cb = 0.2;
    if (std::abs(cc - 0.5) < 0.05) cc = 0.8;
    const Payoffs p = expected_payoffs_oracle(partial_branch_config(PartialBranch::GammaZero),
                                              partial_triple_from_C(ca, cb, cc), m);
    const Disclosure d = Disclosure::payoff_a_only(p[0]);
    const RecoveredInfo bob =
        recover_partial_symmetric(d, m, cb, Player::B, SymmetryCase::PartialSymII);
    const RecoveredInfo cha =
        recover_partial_symmetric(d, m, cc, Player::C, SymmetryCase::PartialSymII);
    if (!bob.ok() || !cha.ok()) continue;
    ++successes;
    CHECK(*bob.c_of(Player::C) == doctest::Approx(cc).epsilon(tol::kRecovery));
    CHECK(*cha.c_of(Player::B) == doctest::Approx(cb).epsilon(tol::kRecovery));
  }
  CHECK(successes >= 200);

  // own C = 1/2 kills the linear term
  const PayoffMatrix m1 = generate_case_matrix(SymmetryCase::PartialSymI, rng);
  CHECK(recover_partial_symmetric(Disclosure::payoff_a_only(1.0), m1, 0.5, Player::B,
                                  SymmetryCase::PartialSymI)
            .status == RecoveryStatus::Singular);

  // the triply-degenerate case is pure noise
  const PayoffMatrix m3 = generate_case_matrix(SymmetryCase::PartialSymIII, rng);
  const RecoveredInfo none = recover_partial_symmetric(
      Disclosure::payoff_a_only(1.0), m3, 0.3, Player::B, SymmetryCase::PartialSymIII);
  CHECK(none.status == RecoveryStatus::NoInformation);
  CHECK(*none.payoffs[0] == doctest::Approx(m3.at(Player::A, 0)));
}

TEST_CASE("a party without a private C faces a solution family") {
  // Given only (P^A, P^B) and the matrix, an outsider can complete the system
  // with different assumed own-C values, each yielding a consistent strategy
  // triple: the disclosure alone does not pin the key material down.
  Rng rng(213);
  int exhibited = 0;
  for (int i = 0; i < 400 && exhibited < 20; ++i) {
    const PayoffMatrix m = generate_case_matrix(SymmetryCase::CaseI, rng);
    const double ca = rng.uniform(0.2, 0.8), cb = rng.uniform(0.2, 0.8),
                 cc = rng.uniform(0.2, 0.8);
    const Payoffs p = expected_payoffs_oracle(non_entangled(), triple_from_C(ca, cb, cc), m);
    const Disclosure d = Disclosure::payoffs_ab(p[0], p[1]);
    const RecoveredInfo guess1 = recover_nonentangled_caseI(d, m, 0.25, Player::B);
    const RecoveredInfo guess2 = recover_nonentangled_caseI(d, m, 0.75, Player::B);
    if (!guess1.ok() || !guess2.ok()) continue;
    // both hypothetical completions reproduce the disclosed payoffs...
    for (const RecoveredInfo& g : {guess1, guess2}) {
      const Payoffs re = expected_payoffs_oracle(
          non_entangled(),
          triple_from_C(*g.c_of(Player::A), *g.c_of(Player::B), *g.c_of(Player::C)), m);
      CHECK(re[0] == doctest::Approx(p[0]).epsilon(1e-6));
      CHECK(re[1] == doctest::Approx(p[1]).epsilon(1e-6));
    }
    // ...yet disagree about the secret strategy values
    if (std::abs(*guess1.c_of(Player::C) - *guess2.c_of(Player::C)) > 1e-3) ++exhibited;
  }
  CHECK(exhibited >= 20);
}
