#pragma once

#include <array>

#include "qgkd/types.hpp"

// Closed-form expected payoffs and the regime-specific reductions. Every
// function here is property-tested against the state-core oracle; where the
// source formulas carry typos the corrected form is implemented and the
// printed variant is kept available for the discrepancy ledger.
namespace qgkd {

struct ClosedFormOptions {
  // Dephasing factor applied to the initial-state coherence: it scales xi and
  // the cos(delta)sin(gamma) part of the interference term. 1.0 = no tap.
  double mu_coherence = 1.0;
  // Reproduce the source's sign typo in the C_A S_B S_C phase argument
  // (cos 2(-a_A + b_B - b_C) instead of the correct cos 2(-a_A + b_B + b_C)).
  bool printed_phase_typo = false;
  // Reproduce the source's blanket replacement rule that multiplies the whole
  // interference brace by mu, including the cos(gamma)sin(delta) part that a
  // physical state tap cannot touch.
  bool printed_mu_rule = false;
};

Payoffs closed_form_payoffs(const EntanglementConfig& cfg, const StrategyTriple& s,
                            const PayoffMatrix& m, const ClosedFormOptions& opt = {});

// Corrected general closed form; equals the oracle to machine precision.
inline Payoffs expected_payoffs_closed(const EntanglementConfig& cfg, const StrategyTriple& s,
                                       const PayoffMatrix& m) {
  return closed_form_payoffs(cfg, s, m, {});
}

// The formula exactly as printed, typo included. Ledger use only.
inline Payoffs expected_payoffs_as_printed(const EntanglementConfig& cfg,
                                           const StrategyTriple& s, const PayoffMatrix& m) {
  return closed_form_payoffs(cfg, s, m, {.printed_phase_typo = true});
}

// Value of the interference (sin[theta_A,theta_B,theta_C]) term alone.
double interference_term(const EntanglementConfig& cfg, const StrategyTriple& s,
                         const PayoffMatrix& m, Player k);

// Σ_abc (-1)^{a+b+c} $^{(k)}_{abc}
double alternating_sum(const PayoffMatrix& m, Player k);

// ---------------------------------------------------------------------------
// Per-viewer coefficient quads and bilinear payoff views

enum class QuadVariant {
  NonEntangled,  // gamma = delta = 0
  MaxEntangled,  // gamma = delta = pi/2 (coefficients re-derived; see ledger)
  PartialBar,    // partially entangled NOT-duality regime (barred symbols)
};

struct CoefficientQuad {
  double d = 0, e = 0, f = 0, g = 0;
  QuadVariant variant = QuadVariant::NonEntangled;
  Player viewer = Player::A;
  Player target = Player::A;
};

// Quads are computed on demand from (m, own_C); nothing is cached.
CoefficientQuad coefficient_quad(const PayoffMatrix& m, Player target, Player viewer,
                                 double own_C, QuadVariant variant);

// Bilinear evaluation of P^{target} from `viewer`'s perspective given all
// three C values (the viewer's own one plus the two opponents').
double nonentangled_payoff_view(const PayoffMatrix& m, Player viewer,
                                const std::array<double, 3>& C, Player target);
double maxentangled_payoff_view(const PayoffMatrix& m, Player viewer,
                                const std::array<double, 3>& C, Player target);

// ---------------------------------------------------------------------------
// Cross-regime maps

// Swap entries 100<->011 and 010<->101 for every player. Involution; maps the
// maximally entangled game onto the non-entangled one.
PayoffMatrix symmetry_permute_matrix(const PayoffMatrix& m);

// Absorb nonzero (alpha, beta) into the payoff matrix for the two regimes in
// which the interference term vanishes (gamma = delta in {0, pi/2}). The
// returned matrix played at alpha = beta = 0 reproduces the original payoffs.
PayoffMatrix phase_transform_matrix(const PayoffMatrix& m, const StrategyTriple& s,
                                    const EntanglementConfig& cfg);

// ---------------------------------------------------------------------------
// Partially entangled regime

enum class PartialBranch {
  DeltaZero,  // (i):  delta = 0,    gamma = pi/2  — upper signs, tap-sensitive
  GammaZero,  // (ii): delta = pi/2, gamma = 0     — lower signs, tap-immune
};

EntanglementConfig partial_branch_config(PartialBranch branch);

// Phase constraints of the partial regime: alpha_k = 0, beta_C = 0,
// beta_B = pi/2 and beta_A = -pi/2 (the 3pi/2 solution folded into [-pi, pi]).
bool has_partial_phases(const StrategyTriple& s, double tolerance = 1e-9);
StrategyTriple partial_strategies(double thetaA, double thetaB, double thetaC);

// Outcome probabilities in squared-amplitude form:
// p_L = (t_L ± (-1)^{|L|} t_{~L})² / 2 with t the half-angle cos/sin product.
std::array<double, 8> partial_outcome_probabilities(const StrategyTriple& s,
                                                    PartialBranch branch);

// Squared-amplitude form of the partial-regime payoff.
Payoffs partial_payoff(const StrategyTriple& s, const PayoffMatrix& m, PartialBranch branch);

// Half-angle-difference reduction of the above. Exact at theta_A = pi/2
// (C_A = 1/2); the source claims it at theta_A = pi/4 (see ledger).
Payoffs partial_halfangle_payoff(double thetaB, double thetaC, const PayoffMatrix& m,
                                 PartialBranch branch);

// NOT-duality: $_{abc} = $_{complement(abc)}.
bool satisfies_not_duality(const PayoffMatrix& m, Player k, double tolerance = 1e-12);
bool satisfies_not_duality(const PayoffMatrix& m, double tolerance = 1e-12);

// Bilinear partial-regime view valid for NOT-dual matrices; throws
// std::domain_error if the target slice violates the duality.
double partial_dual_payoff_view(const PayoffMatrix& m, Player viewer,
                                const std::array<double, 3>& C, Player target);

// Coefficient of the product of the two opponents' C values in the viewer's
// partial dual bilinear form (the K constant of the recovery denominators).
double partial_dual_bilinear_coefficient(const PayoffMatrix& m, Player viewer, Player target);

}  // namespace qgkd
