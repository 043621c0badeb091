#include "qgkd/key_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qgkd/constants.hpp"

namespace qgkd {

namespace {

bool near(double a, double b, double tolerance) { return std::abs(a - b) <= tolerance; }

// Clamp a recovered C to [0, 1]; values farther out than the slack signal an
// inconsistent disclosure rather than rounding.
std::optional<double> clamp_recovered(double value, RecoveryStatus& status) {
  if (value < -tol::kRecoveryClamp || value > 1.0 + tol::kRecoveryClamp) {
    status = RecoveryStatus::Inconsistent;
    return std::nullopt;
  }
  return std::clamp(value, 0.0, 1.0);
}

bool singular(double denominator) { return std::abs(denominator) < tol::kSingularDenominator; }

// The partner whose strategy the recovering party must solve for: Charlie's C
// for Bob and vice versa.
Player other_opponent(Player party) { return party == Player::B ? Player::C : Player::B; }

void require_recovering_party(Player party) {
  if (party == Player::A) throw std::domain_error("Alice does not run disclosure recovery");
}

RecoveredInfo make_failed(Player party, RecoveryStatus status, std::string note) {
  RecoveredInfo info;
  info.party = party;
  info.status = status;
  info.note = std::move(note);
  return info;
}

void fill_nonentangled_payoffs(RecoveredInfo& info, const PayoffMatrix& m) {
  const std::array<double, 3> C{*info.C[0], *info.C[1], *info.C[2]};
  for (Player k : {Player::A, Player::B, Player::C})
    info.payoffs[index(k)] = nonentangled_payoff_view(m, info.party, C, k);
}

}  // namespace

std::string to_string(SymmetryCase c) {
  switch (c) {
    case SymmetryCase::CaseI: return "CaseI";
    case SymmetryCase::CaseII: return "CaseII";
    case SymmetryCase::CaseIII: return "CaseIII";
    case SymmetryCase::PartialSymI: return "PartialSymI";
    case SymmetryCase::PartialSymII: return "PartialSymII";
    case SymmetryCase::PartialSymIII: return "PartialSymIII";
    case SymmetryCase::None: return "None";
  }
  return "None";
}

std::string to_string(RecoveryStatus s) {
  switch (s) {
    case RecoveryStatus::Ok: return "Ok";
    case RecoveryStatus::Singular: return "Singular";
    case RecoveryStatus::Inconsistent: return "Inconsistent";
    case RecoveryStatus::NoInformation: return "NoInformation";
    case RecoveryStatus::Unsupported: return "Unsupported";
  }
  return "Unsupported";
}

bool case_holds_for_player(const PayoffMatrix& m, Player k, SymmetryCase c, double tolerance) {
  const auto d = [&](int lab) { return m.at(k, lab); };
  const auto eq = [&](int a, int b) { return near(d(a), d(b), tolerance); };
  switch (c) {
    case SymmetryCase::CaseI:
      return eq(0b001, 0b101) && eq(0b011, 0b111) && eq(0b010, 0b110);
    case SymmetryCase::CaseII:
      return eq(0b100, 0b101) && eq(0b100, 0b110) && eq(0b100, 0b111);
    case SymmetryCase::CaseIII: {
      for (int lab = 2; lab < 8; ++lab)
        if (!eq(0b001, lab)) return false;
      return true;
    }
    case SymmetryCase::PartialSymI:
      return satisfies_not_duality(m, k, tolerance) && eq(0b100, 0b101) && eq(0b001, 0b000);
    case SymmetryCase::PartialSymII:
      return satisfies_not_duality(m, k, tolerance) && eq(0b001, 0b101) && eq(0b100, 0b000);
    case SymmetryCase::PartialSymIII:
      return satisfies_not_duality(m, k, tolerance) && eq(0b001, 0b101) && eq(0b001, 0b100) &&
             eq(0b001, 0b000);
    case SymmetryCase::None: return true;
  }
  return false;
}

SymmetryCase classify_symmetry_case(const PayoffMatrix& m, bool partial, double tolerance) {
  // Conditions are imposed on the two disclosure-bearing payoff indices A, B.
  const auto both = [&](SymmetryCase c) {
    return case_holds_for_player(m, Player::A, c, tolerance) &&
           case_holds_for_player(m, Player::B, c, tolerance);
  };
  if (partial) {
    if (both(SymmetryCase::PartialSymIII)) return SymmetryCase::PartialSymIII;
    if (both(SymmetryCase::PartialSymI)) return SymmetryCase::PartialSymI;
    if (both(SymmetryCase::PartialSymII)) return SymmetryCase::PartialSymII;
    return SymmetryCase::None;
  }
  if (both(SymmetryCase::CaseIII)) return SymmetryCase::CaseIII;
  if (both(SymmetryCase::CaseI)) return SymmetryCase::CaseI;
  if (both(SymmetryCase::CaseII)) return SymmetryCase::CaseII;
  return SymmetryCase::None;
}

// ---------------------------------------------------------------------------

RatioReport validate_ratio_distinctness(const PayoffMatrix& m, double tolerance) {
  RatioReport report;
  std::array<std::array<double, 3>, 8> normalized{};
  std::array<bool, 8> zero{};
  for (int lab = 0; lab < 8; ++lab) {
    const std::array<double, 3> triple = payoff_row(m, lab);
    double scale = 0;
    for (double v : triple) scale = std::max(scale, std::abs(v));
    if (scale < tolerance) {
      zero[lab] = true;
      report.degenerate.push_back(lab);
      continue;
    }
    // Projective normalization: unit max-abs with a canonical sign so that
    // triples differing only by a scalar compare equal.
    int lead = 0;
    while (lead < 3 && std::abs(triple[lead]) < tolerance * scale) ++lead;
    const double sign = triple[lead] < 0 ? -1.0 : 1.0;
    for (int k = 0; k < 3; ++k) normalized[lab][k] = sign * triple[k] / scale;
  }
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) {
      if (zero[i] || zero[j]) {
        if (zero[i] && zero[j]) report.collisions.emplace_back(i, j);
        continue;
      }
      bool same = true;
      for (int k = 0; k < 3; ++k)
        if (!near(normalized[i][k], normalized[j][k], tolerance)) same = false;
      if (same) report.collisions.emplace_back(i, j);
    }
  report.distinct = report.collisions.empty() && report.degenerate.empty();
  return report;
}

int alice_identify_outcome(const Payoffs& measured, const PayoffMatrix& m, double tolerance) {
  double scale = 0;
  for (double v : measured) scale = std::max(scale, std::abs(v));
  if (scale < tolerance) throw std::runtime_error("measured payoff triple is ~0: unidentifiable");

  int match = -1;
  for (int lab = 0; lab < 8; ++lab) {
    const std::array<double, 3> triple = payoff_row(m, lab);
    // measured must equal lambda * triple for some lambda > 0
    double lambda = 0;
    double best = 0;
    for (int k = 0; k < 3; ++k)
      if (std::abs(triple[k]) > best) {
        best = std::abs(triple[k]);
        lambda = measured[k] / triple[k];
      }
    if (best == 0 || lambda <= 0) continue;
    bool ok = true;
    for (int k = 0; k < 3; ++k)
      if (!near(measured[k], lambda * triple[k], tolerance * std::max(1.0, scale))) ok = false;
    if (!ok) continue;
    if (match >= 0)
      throw std::runtime_error("ambiguous identification: profiles " + label_string(match) +
                               " and " + label_string(lab) + " both match");
    match = lab;
  }
  if (match < 0) throw std::runtime_error("no payoff profile matches the measured ratios");
  return match;
}

OpponentProducts alice_infer_opponent_product(const std::array<double, 8>& probabilities,
                                              double own_C) {
  double sum = 0;
  for (double p : probabilities) sum += p;
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::domain_error("outcome statistics are not normalized");
  if (!(own_C >= 0.0 && own_C <= 1.0)) throw std::domain_error("own_C must lie in [0, 1]");
  OpponentProducts out;
  for (int a = 0; a < 2; ++a) {
    out.cbcc += probabilities[label(a, 0, 0)];
    out.sbcc += probabilities[label(a, 1, 0)];
    out.cbsc += probabilities[label(a, 0, 1)];
    out.sbsc += probabilities[label(a, 1, 1)];
  }
  return out;
}

ReplayResolution disambiguate_by_replay(const std::vector<std::array<double, 8>>& rounds,
                                        double own_C, bool exact_mode) {
  ReplayResolution res;
  if (rounds.empty()) return res;
  if (exact_mode) {
    for (const auto& r : rounds)
      for (int lab = 0; lab < 8; ++lab)
        if (!near(r[lab], rounds.front()[lab], 1e-9)) {
          res.status = ReplayResolution::Status::ProtocolViolation;
          return res;
        }
  }
  std::array<double, 8> pooled{};
  for (const auto& r : rounds)
    for (int lab = 0; lab < 8; ++lab) pooled[lab] += r[lab] / double(rounds.size());
  const OpponentProducts prod = alice_infer_opponent_product(pooled, own_C);

  // Count distinct observed (b, c) bit patterns; one pattern cannot separate
  // C_B from C_C out of single-shot data.
  int patterns = 0;
  for (double mass : {prod.cbcc, prod.sbcc, prod.cbsc, prod.sbsc})
    if (mass > 1e-12) ++patterns;
  if (!exact_mode && patterns <= 1) {
    res.status = ReplayResolution::Status::AmbiguityRemains;
    res.residual_ambiguity = std::pow(1.0 / 8.0, double(rounds.size()));
    return res;
  }
  res.status = ReplayResolution::Status::Resolved;
  res.cb = prod.cb();
  res.cc = prod.cc();
  res.residual_ambiguity = 0.0;
  return res;
}

double replay_ambiguity_rate(const std::array<double, 8>& probabilities, int replays) {
  if (replays < 0) throw std::domain_error("replay count must be nonnegative");
  double rate = 0;
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c) {
      const double q = probabilities[label(0, b, c)] + probabilities[label(1, b, c)];
      rate += std::pow(q, 1 + replays);
    }
  return rate;
}

// ---------------------------------------------------------------------------

RecoveredInfo recover_nonentangled_caseI(const Disclosure& d, const PayoffMatrix& m,
                                         double own_C, Player party) {
  require_recovering_party(party);
  if (d.variant != Disclosure::Variant::PayoffsAB || !d.payoff_A || !d.payoff_B)
    throw std::domain_error("Case I recovery needs the (P^A, P^B) disclosure");
  const double pa = *d.payoff_A, pb = *d.payoff_B;
  const CoefficientQuad qa = coefficient_quad(m, Player::A, party, own_C,
                                              QuadVariant::NonEntangled);
  const CoefficientQuad qb = coefficient_quad(m, Player::B, party, own_C,
                                              QuadVariant::NonEntangled);
  const double den =
      (pa - qa.g) * (qb.d - qb.e) - (pb - qb.g) * (qa.d - qa.e);
  if (singular(den))
    return make_failed(party, RecoveryStatus::Singular, "vanishing two-payoff denominator");
  const double ca_raw =
      ((pb - qb.g) * (qa.e - qa.g) - (pa - qa.g) * (qb.e - qb.g)) / den;

  RecoveredInfo info;
  info.party = party;
  info.status = RecoveryStatus::Ok;
  info.C[index(Player::A)] = clamp_recovered(ca_raw, info.status);
  if (info.status != RecoveryStatus::Ok)
    return make_failed(party, info.status, "recovered C_A outside [0,1]");

  const double den2 = ca_raw * (qa.d - qa.e) + (qa.e - qa.g);
  if (singular(den2))
    return make_failed(party, RecoveryStatus::Singular, "vanishing opponent denominator");
  info.C[index(other_opponent(party))] = clamp_recovered((pa - qa.g) / den2, info.status);
  if (info.status != RecoveryStatus::Ok)
    return make_failed(party, info.status, "recovered opponent C outside [0,1]");
  info.C[index(party)] = own_C;
  fill_nonentangled_payoffs(info, m);
  return info;
}

RecoveredInfo recover_nonentangled_caseII(const Disclosure& d, const PayoffMatrix& m,
                                          double own_C, Player party) {
  require_recovering_party(party);
  if (d.variant != Disclosure::Variant::PayoffsAB || !d.payoff_A || !d.payoff_B)
    throw std::domain_error("Case II recovery needs the (P^A, P^B) disclosure");
  const double pa = *d.payoff_A, pb = *d.payoff_B;
  const CoefficientQuad qa = coefficient_quad(m, Player::A, party, own_C,
                                              QuadVariant::NonEntangled);
  const CoefficientQuad qb = coefficient_quad(m, Player::B, party, own_C,
                                              QuadVariant::NonEntangled);
  const double den =
      (pa - qa.g) * (qb.d - qb.f) - (pb - qb.g) * (qa.d - qa.f);
  if (singular(den))
    return make_failed(party, RecoveryStatus::Singular, "vanishing two-payoff denominator");
  const double copp_raw =
      ((pb - qb.g) * (qa.f - qa.g) - (pa - qa.g) * (qb.f - qb.g)) / den;

  RecoveredInfo info;
  info.party = party;
  info.status = RecoveryStatus::Ok;
  info.C[index(other_opponent(party))] = clamp_recovered(copp_raw, info.status);
  if (info.status != RecoveryStatus::Ok)
    return make_failed(party, info.status, "recovered opponent C outside [0,1]");

  const double den2 = copp_raw * (qa.d - qa.f) + (qa.f - qa.g);
  if (singular(den2))
    return make_failed(party, RecoveryStatus::Singular, "vanishing C_A denominator");
  info.C[index(Player::A)] = clamp_recovered((pa - qa.g) / den2, info.status);
  if (info.status != RecoveryStatus::Ok)
    return make_failed(party, info.status, "recovered C_A outside [0,1]");
  info.C[index(party)] = own_C;
  fill_nonentangled_payoffs(info, m);
  return info;
}

RecoveredInfo recover_from_alice_disclosure(const Disclosure& d, const PayoffMatrix& m,
                                            double own_C, Player party, SymmetryCase c) {
  require_recovering_party(party);
  if (d.variant != Disclosure::Variant::AliceAll || !d.payoff_A || !d.alice_C)
    throw std::domain_error("this recovery needs the (P^A, C_A) disclosure");
  const double pa = *d.payoff_A, ca = *d.alice_C;
  const CoefficientQuad qa = coefficient_quad(m, Player::A, party, own_C,
                                              QuadVariant::NonEntangled);

  if (c == SymmetryCase::CaseIII) {
    // Fully degenerate tables carry no private information at all.
    bool all_equal = true;
    for (Player k : {Player::A, Player::B})
      for (int lab = 1; lab < 8; ++lab)
        if (!near(m.at(k, lab), m.at(k, 0b000), 1e-12)) all_equal = false;
    if (all_equal) {
      RecoveredInfo info = make_failed(party, RecoveryStatus::NoInformation,
                                       "all payoff entries coincide");
      for (Player k : {Player::A, Player::B, Player::C})
        info.payoffs[index(k)] = m.at(k, 0b000);
      return info;
    }
  }

  double opp_raw = 0;
  switch (c) {
    case SymmetryCase::CaseI: {
      const double den = ca * (qa.d - qa.e) + (qa.e - qa.g);
      if (singular(den))
        return make_failed(party, RecoveryStatus::Singular, "vanishing opponent denominator");
      opp_raw = (pa - qa.g) / den;
      break;
    }
    case SymmetryCase::CaseII: {
      const double den = ca * (qa.d - qa.f);
      if (singular(den))
        return make_failed(party, RecoveryStatus::Singular,
                           "C_A (D - F) vanishes: disclosure carries no opponent signal");
      opp_raw = (pa - qa.g - ca * (qa.f - qa.g)) / den;
      break;
    }
    case SymmetryCase::CaseIII: {
      const double den = ca * (qa.d - qa.f);
      if (singular(den))
        return make_failed(party, RecoveryStatus::Singular, "C_A (D - F) vanishes");
      opp_raw = (pa - qa.g) / den;
      break;
    }
    default:
      return make_failed(party, RecoveryStatus::Unsupported,
                         "disclosure solved only for Cases I-III");
  }

  RecoveredInfo info;
  info.party = party;
  info.status = RecoveryStatus::Ok;
  info.C[index(other_opponent(party))] = clamp_recovered(opp_raw, info.status);
  if (info.status != RecoveryStatus::Ok)
    return make_failed(party, info.status, "recovered opponent C outside [0,1]");
  info.C[index(Player::A)] = ca;
  info.C[index(party)] = own_C;
  fill_nonentangled_payoffs(info, m);
  return info;
}

RecoveredInfo recover_partial(const Disclosure& d, const PayoffMatrix& m, double own_C,
                              Player party) {
  require_recovering_party(party);
  if (d.variant != Disclosure::Variant::AliceAll || !d.payoff_A || !d.alice_C)
    throw std::domain_error("partial recovery needs the (P^A, C_A) disclosure");
  if (!satisfies_not_duality(m, Player::A, 1e-9))
    throw std::domain_error("payoff matrix violates the complement-pair equality");
  const double pa = *d.payoff_A, ca = *d.alice_C;
  const CoefficientQuad q =
      coefficient_quad(m, Player::A, party, own_C, QuadVariant::PartialBar);
  const double bilinear = partial_dual_bilinear_coefficient(m, party, Player::A);

  // The viewer's bilinear form P = K c1 c2 + u c1 + v c2 + G, with c1 = C_A;
  // for Bob the C_A-linear symbol is the F bar, for Charlie the E bar.
  const double u = party == Player::B ? q.f - q.g : q.e - q.g;
  const double v = party == Player::B ? q.e - q.g : q.f - q.g;
  const double den = ca * bilinear + v;
  if (singular(den))
    return make_failed(party, RecoveryStatus::Singular, "vanishing dual-form denominator");
  const double opp_raw = (pa - q.g - ca * u) / den;

  RecoveredInfo info;
  info.party = party;
  info.status = RecoveryStatus::Ok;
  info.C[index(other_opponent(party))] = clamp_recovered(opp_raw, info.status);
  if (info.status != RecoveryStatus::Ok)
    return make_failed(party, info.status, "recovered opponent C outside [0,1]");
  info.C[index(Player::A)] = ca;
  info.C[index(party)] = own_C;
  const std::array<double, 3> Cv{*info.C[0], *info.C[1], *info.C[2]};
  for (Player k : {Player::A, Player::B, Player::C}) {
    if (!satisfies_not_duality(m, k, 1e-9)) continue;
    info.payoffs[index(k)] = partial_dual_payoff_view(m, party, Cv, k);
  }
  return info;
}

RecoveredInfo recover_partial_symmetric(const Disclosure& d, const PayoffMatrix& m,
                                        double own_C, Player party, SymmetryCase c) {
  require_recovering_party(party);
  if (d.variant != Disclosure::Variant::PayoffAOnly || !d.payoff_A)
    throw std::domain_error("symmetric partial recovery needs the P^A-only disclosure");
  const double pa = *d.payoff_A;
  const auto entry = [&](int lab) { return m.at(Player::A, lab); };

  if (c == SymmetryCase::PartialSymIII) {
    RecoveredInfo info = make_failed(party, RecoveryStatus::NoInformation,
                                     "payoff is the constant table entry");
    for (Player k : {Player::A, Player::B, Player::C})
      if (case_holds_for_player(m, k, SymmetryCase::PartialSymIII, 1e-12))
        info.payoffs[index(k)] = m.at(k, 0b000);
    return info;
  }
  if (c != SymmetryCase::PartialSymI && c != SymmetryCase::PartialSymII)
    return make_failed(party, RecoveryStatus::Unsupported,
                       "P^A-only disclosure solved only for the symmetric cases");
  if (!case_holds_for_player(m, Player::A, c, 1e-9) ||
      !case_holds_for_player(m, Player::B, c, 1e-9))
    throw std::domain_error("payoff matrix does not satisfy the declared symmetric case");

  // Case I: P^A = (2C_B - 1)($000 - $100) C_A + $000 + C_B ($100 - $000);
  // only Bob holds the needed C_B, and the solved unknown is C_A.
  // Case II has the same shape with $001 in place of $100 and the opponent's
  // C as the unknown, symmetric in Bob and Charlie.
  if (c == SymmetryCase::PartialSymI && party != Player::B)
    return make_failed(party, RecoveryStatus::Unsupported,
                       "the payoff does not involve Charlie's unknowns in this case");
  const int signal = c == SymmetryCase::PartialSymI ? 0b100 : 0b001;
  const double gap = entry(signal) - entry(0b000);
  const double den = (1 - 2 * own_C) * gap;
  if (singular(den))
    return make_failed(party, RecoveryStatus::Singular,
                       std::abs(gap) < tol::kSingularDenominator
                           ? "degenerate payoff gap"
                           : "own C = 1/2 erases the linear term");
  const double rec_raw = (pa - entry(0b000) - own_C * gap) / den;

  RecoveredInfo info;
  info.party = party;
  info.status = RecoveryStatus::Ok;
  const Player solved = c == SymmetryCase::PartialSymI ? Player::A : other_opponent(party);
  info.C[index(solved)] = clamp_recovered(rec_raw, info.status);
  if (info.status != RecoveryStatus::Ok)
    return make_failed(party, info.status, "recovered C outside [0,1]");
  info.C[index(party)] = own_C;

  // Payoffs are computable for every player whose slice shares the case
  // equalities: those slices are independent of the still-unknown C value.
  std::array<double, 3> Cv{};
  for (int i = 0; i < 3; ++i) Cv[i] = info.C[i].value_or(0.5);
  for (Player k : {Player::A, Player::B, Player::C}) {
    if (!case_holds_for_player(m, k, c, 1e-9)) continue;
    info.payoffs[index(k)] = partial_dual_payoff_view(m, party, Cv, k);
  }
  return info;
}

}  // namespace qgkd
