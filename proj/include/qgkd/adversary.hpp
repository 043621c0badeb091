#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "qgkd/payoff_forms.hpp"
#include "qgkd/state_core.hpp"
#include "qgkd/types.hpp"

// Phase-damping eavesdropper: the tap channel itself, tapped payoff formulas,
// and estimation of the tap probability from payoff deviations.
namespace qgkd {

struct EavesdropConfig {
  double p = 0.0;  // tap probability
  // Which qubits the tap touches, indexed by Player, on the forward
  // distribution leg (source -> player) and the return leg (player -> source).
  std::array<bool, 3> forward{false, true, false};  // default: Bob's qubit
  std::array<bool, 3> backward{false, false, false};

  double mu_p() const { return 1.0 - p; }
  int forward_count() const;
  int backward_count() const;
  bool forward_only() const { return backward_count() == 0; }
  void validate() const;  // throws std::domain_error on p outside [0, 1]
};

// Independent phase damping on each targeted qubit: Kraus operators
// sqrt(p)|0><0|, sqrt(p)|1><1|, sqrt(1-p)I. Diagonal entries are untouched;
// every coherence between states differing on a targeted qubit shrinks by 1-p.
DensityMatrix3 phase_damp(const DensityMatrix3& rho, double p,
                          const std::array<bool, 3>& targets);

// Full round pipeline with the tap inserted on the configured legs:
// prepare, damp(forward), strategy unitaries, damp(return).
DensityMatrix3 tapped_final_state(const EntanglementConfig& cfg, const StrategyTriple& s,
                                  const EavesdropConfig& e);

// Expected payoffs under the tap. Forward-leg-only taps use the closed form
// (the initial-state coherence scales by mu_p per tapped qubit); any return-leg
// tap falls back to the density-matrix oracle.
Payoffs tapped_expected_payoffs(const EntanglementConfig& cfg, const StrategyTriple& s,
                                const PayoffMatrix& m, const EavesdropConfig& e);

// Partial-regime analogue: the interference cross-term carries the mu_p factor
// on the GHZ branch (delta=0, gamma=pi/2) and is tap-immune on the product
// branch (delta=pi/2, gamma=0).
Payoffs tapped_partial_payoff(const StrategyTriple& s, const PayoffMatrix& m,
                              PartialBranch branch, const EavesdropConfig& e);

// ---------------------------------------------------------------------------
// Detection

enum class Regime { NonEntangled, MaxEntangled, PartialDeltaZero, PartialGammaZero };

std::string to_string(Regime r);
EntanglementConfig regime_config(Regime r);

struct DetectionReport {
  enum class Verdict { Clean, Tapped, Undetectable };
  Verdict verdict = Verdict::Clean;
  Regime regime = Regime::MaxEntangled;
  double p_hat = 0.0;             // estimated tap probability (Tapped only)
  Payoffs payoff_delta{};         // observed - clean, per player
  double slope = 0.0;             // d P / d mu_p at the operating point
  std::uint64_t sample_count = 0; // 0 = exact payoffs
  std::optional<double> p_true;   // echoed when the caller simulated the tap
  std::string cause;              // annotation for Undetectable verdicts
};

// Audit-time estimation: compare observed payoffs to the clean prediction and
// invert the affine mu_p dependence. Verdicts:
//  - Undetectable for regimes whose payoffs are provably p-independent
//    (non-entangled; partial gamma=0 branch) or when the mu_p slope vanishes
//    at the operating point;
//  - Clean when every deviation stays within `sensitivity`;
//  - Tapped(p_hat) otherwise.
// Throws std::domain_error when the regime's detection precondition on the
// phases (alpha = beta = 0, or the fixed partial phases) is violated: tuned
// phases can hide the mu_p dependence, so no verdict is certified.
DetectionReport detect_eavesdropper(const Payoffs& observed, Regime regime,
                                    const StrategyTriple& s, const PayoffMatrix& m,
                                    double sensitivity, std::uint64_t sample_count = 0,
                                    std::optional<double> p_true = std::nullopt);

}  // namespace qgkd
