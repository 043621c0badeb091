#include "qgkd/protocol.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qgkd/payoff_forms.hpp"
#include "qgkd/state_core.hpp"

namespace qgkd {

namespace {

bool is_partial(Regime r) {
  return r == Regime::PartialDeltaZero || r == Regime::PartialGammaZero;
}

PartialBranch branch_of(Regime r) {
  return r == Regime::PartialDeltaZero ? PartialBranch::DeltaZero : PartialBranch::GammaZero;
}

// The maximally entangled game is the non-entangled one played on the
// label-permuted matrix; recovery runs on that effective matrix.
PayoffMatrix effective_matrix(const SessionConfig& cfg) {
  return cfg.regime == Regime::MaxEntangled ? symmetry_permute_matrix(cfg.matrix) : cfg.matrix;
}

// Outcome-label permutation matching the matrix permutation above.
int permuted_label(int lab) {
  switch (lab) {
    case 0b100: return 0b011;
    case 0b011: return 0b100;
    case 0b010: return 0b101;
    case 0b101: return 0b010;
    default: return lab;
  }
}

StrategyTriple strategies_for(const SessionConfig& cfg, const std::array<double, 3>& C) {
  const double tA = theta_from_C(C[0]), tB = theta_from_C(C[1]), tC = theta_from_C(C[2]);
  return is_partial(cfg.regime) ? partial_strategies(tA, tB, tC)
                                : StrategyTriple::from_theta(tA, tB, tC);
}

double default_sensitivity(const SessionConfig& cfg, const std::array<double, 8>& stats,
                           const PayoffMatrix& m) {
  if (cfg.mode == Mode::Exact) return 1e-7;
  double worst = 0.0;
  for (Player k : {Player::A, Player::B, Player::C}) {
    double mean = 0.0, second = 0.0;
    for (int lab = 0; lab < 8; ++lab) {
      mean += stats[lab] * m.at(k, lab);
      second += stats[lab] * m.at(k, lab) * m.at(k, lab);
    }
    const double var = std::max(0.0, second - mean * mean);
    worst = std::max(worst, std::sqrt(var / double(cfg.shots)));
  }
  return 4.0 * worst;
}

RecoveredInfo run_recovery(const SessionConfig& cfg, const PayoffMatrix& em,
                           const Disclosure& d, double own_C, Player party) {
  if (is_partial(cfg.regime)) {
    if (cfg.disclosure == Disclosure::Variant::AliceAll)
      return recover_partial(d, em, own_C, party);
    return recover_partial_symmetric(d, em, own_C, party, cfg.symmetry);
  }
  if (cfg.disclosure == Disclosure::Variant::AliceAll)
    return recover_from_alice_disclosure(d, em, own_C, party, cfg.symmetry);
  return cfg.symmetry == SymmetryCase::CaseI
             ? recover_nonentangled_caseI(d, em, own_C, party)
             : recover_nonentangled_caseII(d, em, own_C, party);
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::Exact ? "exact" : "sampled"; }

int Codebook::strategy_symbol(double C) const {
  if (!(C >= 0.0 && C <= 1.0)) throw std::domain_error("strategy value outside [0, 1]");
  const long long cells = 1ll << strategy_bits;
  const double scaled = C * double(cells);
  // Recovered values sit within 1e-9 of the played ones; snap to the cell
  // edge so a value epsilon below a boundary encodes like the boundary.
  const double rounded = std::round(scaled);
  const long long v = std::abs(scaled - rounded) < 1e-6 ? (long long)rounded
                                                        : (long long)std::floor(scaled);
  return int(v >= cells ? cells - 1 : v);
}

long long Codebook::payoff_symbol(double P) const {
  if (!std::isfinite(P)) throw std::domain_error("payoff symbol of a non-finite value");
  return std::llround(P * std::pow(10.0, payoff_digits));
}

std::string Key::hex() const {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const long long v = symbols[i];
    std::snprintf(buf, sizeof(buf), v < 0 ? "-%llx" : "%llx",
                  static_cast<unsigned long long>(v < 0 ? -v : v));
    if (i) out += '.';
    out += buf;
  }
  return out;
}

KeyAgreement verify_key_agreement(const std::vector<Key>& keys) {
  if (keys.size() < 2) throw std::domain_error("key agreement needs at least two keys");
  KeyAgreement a;
  std::size_t longest = 0;
  for (const Key& k : keys) longest = std::max(longest, k.symbols.size());
  for (std::size_t i = 0; i < longest; ++i)
    for (const Key& k : keys)
      if (i >= k.symbols.size() || k.symbols[i] != keys[0].symbols[i]) {
        a.agree = false;
        a.first_mismatch = int(i);
        return a;
      }
  a.agree = true;
  return a;
}

void validate_session_config(const SessionConfig& cfg) {
  if (!cfg.matrix.all_finite()) throw std::domain_error("payoff matrix has non-finite entries");
  if (cfg.round_pairs < 1) throw std::domain_error("at least one round pair is required");
  if (cfg.mode == Mode::Sampled && cfg.shots < 1)
    throw std::domain_error("sampled mode needs a positive shot count");
  if (cfg.codebook.strategy_bits < 1 || cfg.codebook.strategy_bits > 16)
    throw std::domain_error("strategy codebook bits must lie in [1, 16]");
  if (cfg.codebook.payoff_digits < 0 || cfg.codebook.payoff_digits > 9)
    throw std::domain_error("payoff codebook digits must lie in [0, 9]");
  if (cfg.max_retries < 0) throw std::domain_error("retry budget must be nonnegative");
  if (cfg.eavesdrop) cfg.eavesdrop->validate();

  if (is_partial(cfg.regime)) {
    if (!satisfies_not_duality(cfg.matrix, 1e-9))
      throw std::domain_error("partial regimes require a complement-pair-symmetric matrix");
    switch (cfg.disclosure) {
      case Disclosure::Variant::AliceAll:
        if (cfg.symmetry != SymmetryCase::None)
          throw std::domain_error(
              "full disclosure in the partial regime uses the unconstrained dual form");
        break;
      case Disclosure::Variant::PayoffAOnly:
        if (cfg.symmetry != SymmetryCase::PartialSymII)
          throw std::domain_error(
              "payoff-only disclosure is recoverable by both parties only in the second "
              "symmetric partial case");
        for (Player k : {Player::A, Player::B, Player::C})
          if (!case_holds_for_player(cfg.matrix, k, SymmetryCase::PartialSymII, 1e-9))
            throw std::domain_error("matrix does not satisfy the declared partial symmetry");
        break;
      case Disclosure::Variant::PayoffsAB:
        throw std::domain_error("two-payoff disclosure has no partial-regime recovery");
    }
    return;
  }

  // product-form regimes
  if (cfg.disclosure == Disclosure::Variant::PayoffAOnly)
    throw std::domain_error("payoff-only disclosure is unsupported outside the partial regime");
  if (cfg.symmetry != SymmetryCase::CaseI && cfg.symmetry != SymmetryCase::CaseII &&
      cfg.symmetry != SymmetryCase::CaseIII)
    throw std::domain_error("product-form regimes require one of the three product cases");
  if (cfg.symmetry == SymmetryCase::CaseIII &&
      cfg.disclosure != Disclosure::Variant::AliceAll)
    throw std::domain_error(
        "the fully symmetric case leaves the two-payoff system underdetermined");
  const PayoffMatrix em = effective_matrix(cfg);
  for (Player k : {Player::A, Player::B})
    if (!case_holds_for_player(em, k, cfg.symmetry, 1e-9))
      throw std::domain_error("matrix does not satisfy the declared symmetry case");
}

RoundRecord run_round(const SessionConfig& cfg, const std::array<double, 3>& C,
                      int round_index, Rng& rng) {
  RoundRecord rec;
  rec.round_index = round_index;
  rec.entanglement = regime_config(cfg.regime);
  rec.strategies = strategies_for(cfg, C);
  rec.mode = cfg.mode;
  rec.shots = cfg.mode == Mode::Sampled ? cfg.shots : 0;
  rec.eavesdrop = cfg.eavesdrop;

  // steps 1-4: preparation, distribution, local unitaries, return; the tap is
  // the only interception point on the in-memory state.
  const DensityMatrix3 rho =
      cfg.eavesdrop ? tapped_final_state(rec.entanglement, rec.strategies, *cfg.eavesdrop)
                    : final_state(rec.entanglement, rec.strategies);

  // step 5: Alice's measurement statistics
  const std::array<double, 8> dist = outcome_distribution(rho, rec.entanglement.delta);
  if (cfg.mode == Mode::Exact) {
    rec.outcome_stats = dist;
  } else {
    const auto counts = sample_counts(dist, cfg.shots, rng);
    for (int lab = 0; lab < 8; ++lab)
      rec.outcome_stats[lab] = double(counts[lab]) / double(cfg.shots);
  }
  for (Player k : {Player::A, Player::B, Player::C}) {
    double p = 0.0;
    for (int lab = 0; lab < 8; ++lab) p += rec.outcome_stats[lab] * cfg.matrix.at(k, lab);
    rec.observed_payoffs[index(k)] = p;
  }

  // step 6: disclosure
  switch (cfg.disclosure) {
    case Disclosure::Variant::PayoffsAB:
      rec.disclosure = Disclosure::payoffs_ab(rec.observed_payoffs[0], rec.observed_payoffs[1]);
      break;
    case Disclosure::Variant::AliceAll:
      rec.disclosure = Disclosure::alice_all(rec.observed_payoffs[0], C[0]);
      break;
    case Disclosure::Variant::PayoffAOnly:
      rec.disclosure = Disclosure::payoff_a_only(rec.observed_payoffs[0]);
      break;
  }

  // step 7: per-party recovery
  const PayoffMatrix em = effective_matrix(cfg);
  rec.recovered[0] = run_recovery(cfg, em, rec.disclosure, C[1], Player::B);
  rec.recovered[1] = run_recovery(cfg, em, rec.disclosure, C[2], Player::C);
  for (int i = 0; i < 2; ++i) {
    const RecoveredInfo& r = rec.recovered[i];
    if (!r.ok()) {
      rec.failed = true;
      rec.failure_cause = (i == 0 ? "Bob: " : "Charlie: ") + to_string(r.status) +
                          (r.note.empty() ? "" : " (" + r.note + ")");
    }
  }

  if (!rec.failed) {
    const RecoveredInfo& bob = rec.recovered[0];
    const RecoveredInfo& cha = rec.recovered[1];
    rec.views[index(Player::B)] = {C[1], bob.c_of(Player::C).value_or(0.0),
                                   bob.payoffs[1].value_or(0.0), bob.payoffs[2].value_or(0.0)};
    rec.views[index(Player::C)] = {cha.c_of(Player::B).value_or(0.0), C[2],
                                   cha.payoffs[1].value_or(0.0), cha.payoffs[2].value_or(0.0)};
    // Alice reads the opponents' strategies off her own statistics: in the
    // product-form regimes through the (b, c) marginal masses, in the partial
    // regimes through the replayed direct record.
    PartyView alice{C[1], C[2], rec.observed_payoffs[1], rec.observed_payoffs[2]};
    if (!is_partial(cfg.regime)) {
      std::array<double, 8> stats = rec.outcome_stats;
      if (cfg.regime == Regime::MaxEntangled) {
        std::array<double, 8> permuted{};
        for (int lab = 0; lab < 8; ++lab) permuted[permuted_label(lab)] = stats[lab];
        stats = permuted;
      }
      try {
        const OpponentProducts prod = alice_infer_opponent_product(stats, C[0]);
        alice.cB = prod.cb();
        alice.cC = prod.cc();
      } catch (const std::domain_error& err) {
        rec.failed = true;
        rec.failure_cause = std::string("Alice: ") + err.what();
      }
    }
    rec.views[index(Player::A)] = alice;
  }

  // audit: payoff-deviation detection at the regime's fixed phases
  const double sensitivity = cfg.detection_sensitivity
                                 ? *cfg.detection_sensitivity
                                 : default_sensitivity(cfg, rec.outcome_stats, cfg.matrix);
  rec.detection = detect_eavesdropper(
      rec.observed_payoffs, cfg.regime, rec.strategies, cfg.matrix, sensitivity, rec.shots,
      cfg.eavesdrop ? std::optional<double>(cfg.eavesdrop->p) : std::nullopt);
  return rec;
}

SymbolQuad encode_round_pair(const Codebook& codebook, const RoundRecord& first,
                             const RoundRecord& second, Player party) {
  if (first.failed || second.failed)
    throw std::domain_error("cannot encode symbols from a failed round");
  const PartyView& m = first.views[index(party)];
  const PartyView& n = second.views[index(party)];
  SymbolQuad q;
  q.mB = codebook.strategy_symbol(m.cB);
  q.mC = codebook.strategy_symbol(m.cC);
  q.nB = codebook.payoff_symbol(n.pB);
  q.nC = codebook.payoff_symbol(n.pC);
  return q;
}

SessionReport run_session(const SessionConfig& cfg, std::uint64_t seed,
                          const StrategyProvider& strategies) {
  validate_session_config(cfg);
  const StrategyProvider provider =
      strategies ? strategies : [](int, int, Rng& rng) {
        const auto draw = [&rng] { return double(1 + rng.below(9)) / 10.0; };
        return std::array<double, 3>{draw(), draw(), draw()};
      };

  SessionReport report;
  report.seed = seed;
  Rng rng(seed);
  std::vector<std::pair<int, int>> pair_slots;  // indices into report.rounds

  int round_index = 0;
  for (int pair = 0; pair < cfg.round_pairs; ++pair) {
    bool done = false;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      const std::array<double, 3> C = provider(pair, attempt, rng);
      RoundRecord r1 = run_round(cfg, C, round_index, rng);
      RoundRecord r2 = run_round(cfg, C, round_index + 1, rng);
      round_index += 2;
      const bool ok = !r1.failed && !r2.failed;
      report.rounds.push_back(std::move(r1));
      report.rounds.push_back(std::move(r2));
      if (ok) {
        pair_slots.emplace_back(int(report.rounds.size()) - 2,
                                int(report.rounds.size()) - 1);
        done = true;
        break;
      }
      ++report.retry_count;
    }
    if (!done) {
      report.aborted = true;
      report.abort_cause = "retry budget exhausted on round pair " + std::to_string(pair);
      break;
    }
  }

  for (const RoundRecord& r : report.rounds)
    if (r.detection && r.detection->verdict == DetectionReport::Verdict::Tapped)
      report.compromised = true;

  if (!report.aborted) {
    for (Player party : {Player::A, Player::B, Player::C}) {
      Key key;
      key.owner = party;
      for (const auto& [i1, i2] : pair_slots) {
        const SymbolQuad q =
            encode_round_pair(cfg.codebook, report.rounds[i1], report.rounds[i2], party);
        key.symbols.push_back(q.mB);
        key.symbols.push_back(q.mC);
        key.symbols.push_back(q.nB);
        key.symbols.push_back(q.nC);
      }
      report.keys.push_back(std::move(key));
    }
    report.agreement = verify_key_agreement(report.keys);
  }
  return report;
}

}  // namespace qgkd
