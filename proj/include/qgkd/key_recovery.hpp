#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qgkd/payoff_forms.hpp"
#include "qgkd/types.hpp"

// Algebraic inversion layer: Alice's inference of opponents' strategies from
// outcome statistics, and Bob's/Charlie's recovery of strategies and payoffs
// from the public disclosures, for every solved symmetry case.
namespace qgkd {

enum class SymmetryCase {
  CaseI,          // $001=$101, $011=$111, $010=$110
  CaseII,         // $100=$101=$110=$111
  CaseIII,        // CaseI and CaseII: all seven non-000 entries equal
  PartialSymI,    // under NOT-duality: $100=$101 and $001=$000
  PartialSymII,   // under NOT-duality: $001=$101 and $100=$000
  PartialSymIII,  // under NOT-duality: $001=$101=$100=$000
  None,
};

std::string to_string(SymmetryCase c);

// Does one player's payoff slice satisfy the case's entry equalities?
bool case_holds_for_player(const PayoffMatrix& m, Player k, SymmetryCase c,
                           double tolerance = 1e-12);

// Most specific case whose equalities hold for the two constrained players
// A and B (the disclosure-bearing payoff indices). `partial` selects the
// NOT-duality case family.
SymmetryCase classify_symmetry_case(const PayoffMatrix& m, bool partial,
                                    double tolerance = 1e-12);

// ---------------------------------------------------------------------------
// Alice-side identification and inference

struct RatioReport {
  bool distinct = false;
  std::vector<std::pair<int, int>> collisions;  // label pairs with equal ratio triples
  std::vector<int> degenerate;                  // labels whose payoff triple is ~0
};

RatioReport validate_ratio_distinctness(const PayoffMatrix& m, double tolerance = 1e-9);

// Label whose payoff-entry ratio matches the measured-payoff ratio; throws
// std::runtime_error when no profile or more than one profile matches.
int alice_identify_outcome(const Payoffs& measured, const PayoffMatrix& m,
                           double tolerance = 1e-6);

// Pairwise pattern masses of Bob's and Charlie's bits, read off the outcome
// distribution by marginalizing over Alice's bit (product law of the
// non-entangled regime).
struct OpponentProducts {
  double cbcc = 0, sbcc = 0, cbsc = 0, sbsc = 0;

  double product() const { return cbcc; }  // C_B * C_C
  double cb() const { return cbcc + cbsc; }
  double cc() const { return cbcc + sbcc; }
};

OpponentProducts alice_infer_opponent_product(const std::array<double, 8>& probabilities,
                                              double own_C);

struct ReplayResolution {
  enum class Status { Resolved, AmbiguityRemains, ProtocolViolation };
  Status status = Status::AmbiguityRemains;
  double cb = 0, cc = 0;
  // Source-claimed residual chance that yet another replay stays ambiguous.
  double residual_ambiguity = 1.0;
};

// Combine per-round outcome statistics played with identical strategies.
// In exact mode the rounds must agree to 1e-9 (anything else is a protocol
// violation); in sampled mode rounds are pooled, and the estimate is reported
// as ambiguous while only a single (b, c) bit pattern has been observed.
ReplayResolution disambiguate_by_replay(const std::vector<std::array<double, 8>>& rounds,
                                        double own_C, bool exact_mode);

// True probability that `replays` additional identically-played rounds all
// repeat the first round's (b, c) pattern: Σ_bc q_bc^{1+replays}. The source
// text quotes (1/8)^replays instead; see the discrepancy ledger.
double replay_ambiguity_rate(const std::array<double, 8>& probabilities, int replays);

// ---------------------------------------------------------------------------
// Disclosure-driven recovery

struct Disclosure {
  enum class Variant { PayoffsAB, AliceAll, PayoffAOnly };
  Variant variant = Variant::PayoffsAB;
  std::optional<double> payoff_A;  // P^A, always present
  std::optional<double> payoff_B;  // P^B, PayoffsAB only
  std::optional<double> alice_C;   // C_A, AliceAll only

  static Disclosure payoffs_ab(double pa, double pb) {
    return {Variant::PayoffsAB, pa, pb, std::nullopt};
  }
  static Disclosure alice_all(double pa, double ca) {
    return {Variant::AliceAll, pa, std::nullopt, ca};
  }
  static Disclosure payoff_a_only(double pa) {
    return {Variant::PayoffAOnly, pa, std::nullopt, std::nullopt};
  }
};

enum class RecoveryStatus { Ok, Singular, Inconsistent, NoInformation, Unsupported };

std::string to_string(RecoveryStatus s);

struct RecoveredInfo {
  RecoveryStatus status = RecoveryStatus::Unsupported;
  Player party = Player::B;
  std::array<std::optional<double>, 3> C;        // indexed by Player
  std::array<std::optional<double>, 3> payoffs;  // P^A, P^B, P^C where computable
  std::string note;

  bool ok() const { return status == RecoveryStatus::Ok; }
  std::optional<double> c_of(Player p) const { return C[index(p)]; }
};

// Non-entangled regime, Case I equalities, disclosure (P^A, P^B): solve C_A
// by the two-payoff quotient, then the remaining opponent's C.
RecoveredInfo recover_nonentangled_caseI(const Disclosure& d, const PayoffMatrix& m,
                                         double own_C, Player party);

// Non-entangled regime, Case II: solve the opponent's C first, then C_A.
RecoveredInfo recover_nonentangled_caseII(const Disclosure& d, const PayoffMatrix& m,
                                          double own_C, Player party);

// Non-entangled regime, disclosure (P^A, C_A): single-quotient recovery of the
// remaining opponent's C under Case I, II or III equalities.
RecoveredInfo recover_from_alice_disclosure(const Disclosure& d, const PayoffMatrix& m,
                                            double own_C, Player party, SymmetryCase c);

// Partial regime under NOT-duality, disclosure (P^A, C_A).
RecoveredInfo recover_partial(const Disclosure& d, const PayoffMatrix& m, double own_C,
                              Player party);

// Partial regime symmetric cases, disclosure P^A only ("dense-coding-like"
// minimal mode). Case I supports Bob alone (who learns C_A; the payoff is
// independent of C_C); Case II supports both Bob and Charlie.
RecoveredInfo recover_partial_symmetric(const Disclosure& d, const PayoffMatrix& m,
                                        double own_C, Player party, SymmetryCase c);

}  // namespace qgkd
