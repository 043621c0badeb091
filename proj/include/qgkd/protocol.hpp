#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qgkd/adversary.hpp"
#include "qgkd/key_recovery.hpp"
#include "qgkd/rng.hpp"
#include "qgkd/types.hpp"

// Session orchestration: the 7-step round across the three simulated parties,
// disclosure, per-party recovery, detection, and key assembly from repeated
// round pairs.
namespace qgkd {

enum class Mode { Exact, Sampled };

std::string to_string(Mode m);

struct Codebook {
  int strategy_bits = 1;   // strategy symbol = floor(C * 2^bits), C=1 capped
  int payoff_digits = 0;   // payoff symbol = round(P * 10^digits)

  int strategy_symbol(double C) const;
  long long payoff_symbol(double P) const;
};

struct Key {
  Player owner = Player::A;
  std::vector<long long> symbols;

  std::string hex() const;  // lowercase hex symbols joined with '.'
};

struct KeyAgreement {
  bool agree = false;
  int first_mismatch = -1;  // symbol index, -1 when agree
};

KeyAgreement verify_key_agreement(const std::vector<Key>& keys);

struct SessionConfig {
  Regime regime = Regime::NonEntangled;
  // Declared payoff-matrix symmetry: CaseI/II/III for the product-form
  // regimes, None (plain complement symmetry) or PartialSymII for the partial
  // regimes.
  SymmetryCase symmetry = SymmetryCase::CaseI;
  Disclosure::Variant disclosure = Disclosure::Variant::PayoffsAB;
  PayoffMatrix matrix;
  Mode mode = Mode::Exact;
  std::uint64_t shots = 100000;
  int round_pairs = 4;  // r: the key holds 4r symbols
  Codebook codebook;
  int max_retries = 3;
  std::optional<EavesdropConfig> eavesdrop;
  // Detection threshold on payoff deviations; default 1e-7 in exact mode and
  // four standard errors of the sampled payoff estimator otherwise.
  std::optional<double> detection_sensitivity;
};

// Rejects regime / symmetry / disclosure combinations without a recovery
// path, and matrices that do not satisfy the declared symmetry.
// Throws std::domain_error with a diagnostic message.
void validate_session_config(const SessionConfig& cfg);

// The four key ingredients as one party holds them after a round.
struct PartyView {
  double cB = 0, cC = 0;  // strategies of the two non-preparing players
  double pB = 0, pC = 0;  // their expected payoffs
};

struct RoundRecord {
  int round_index = 0;
  EntanglementConfig entanglement;
  StrategyTriple strategies;  // ground truth
  Mode mode = Mode::Exact;
  std::uint64_t shots = 0;
  std::array<double, 8> outcome_stats{};  // probabilities or frequencies
  Payoffs observed_payoffs{};
  Disclosure disclosure;
  std::array<RecoveredInfo, 2> recovered;  // Bob's and Charlie's results
  std::array<PartyView, 3> views{};        // per party, indexed by Player
  std::optional<EavesdropConfig> eavesdrop;
  std::optional<DetectionReport> detection;
  bool failed = false;
  std::string failure_cause;
};

// One full round at the given strategy triple (C values): state preparation,
// tap (if configured), local unitaries, measurement statistics, disclosure,
// per-party recovery, detection audit.
RoundRecord run_round(const SessionConfig& cfg, const std::array<double, 3>& C,
                      int round_index, Rng& rng);

struct SymbolQuad {
  long long mB = 0, mC = 0, nB = 0, nC = 0;
};

// The 4-symbol group of one round pair from one party's view: strategy
// symbols from the first round, payoff symbols from the second.
SymbolQuad encode_round_pair(const Codebook& codebook, const RoundRecord& first,
                             const RoundRecord& second, Player party);

// Per-pair strategy source: (pair index, retry attempt, session generator) ->
// C values. The default draws uniformly from the safe grid {0.1, ..., 0.9}.
using StrategyProvider = std::function<std::array<double, 3>(int, int, Rng&)>;

struct SessionReport {
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
  std::vector<Key> keys;  // Alice, Bob, Charlie
  KeyAgreement agreement;
  bool compromised = false;  // any round's detection verdict was Tapped
  int retry_count = 0;
  bool aborted = false;
  std::string abort_cause;
};

SessionReport run_session(const SessionConfig& cfg, std::uint64_t seed,
                          const StrategyProvider& strategies = {});

}  // namespace qgkd
