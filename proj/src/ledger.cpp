#include "qgkd/ledger.hpp"

#include <cmath>
#include <cstdio>

#include "qgkd/adversary.hpp"
#include "qgkd/generators.hpp"
#include "qgkd/key_recovery.hpp"
#include "qgkd/payoff_forms.hpp"
#include "qgkd/state_core.hpp"

namespace qgkd {

namespace {

// Fixed evaluation points; everything below is deterministic and regenerable.
const double kThetaA = 0.9, kThetaB = 1.3, kThetaC = 0.7;
const double kAlpha[3] = {0.3, -0.2, 0.5};
const double kBeta[3] = {0.4, 0.1, -0.3};

StrategyTriple general_strategies() {
  return {{kThetaA, kAlpha[0], kBeta[0]},
          {kThetaB, kAlpha[1], kBeta[1]},
          {kThetaC, kAlpha[2], kBeta[2]}};
}

PayoffMatrix reference_matrix() {
  Rng rng(42);
  return generate_generic_matrix(rng);
}

LedgerEntry make(std::string id, std::string regime, std::string point, std::string term,
                 double printed, double oracle) {
  LedgerEntry e;
  e.id = std::move(id);
  e.regime = std::move(regime);
  e.parameter_point = std::move(point);
  e.printed_term = std::move(term);
  e.printed_value = printed;
  e.oracle_value = oracle;
  e.abs_difference = std::abs(printed - oracle);
  return e;
}

const char* kGeneralPoint =
    "theta=(0.9,1.3,0.7) alpha=(0.3,-0.2,0.5) beta=(0.4,0.1,-0.3) "
    "gamma=0.7 delta=0.9 matrix=generic(seed42) player=A";

// --- printed maximally entangled coefficient quads -------------------------

double printed_maxent_view(const PayoffMatrix& m, Player viewer, const double C[3],
                           Player target) {
  const auto d = [&](int lab) { return m.at(target, lab); };
  const double c = C[index(viewer)], s = 1.0 - c;
  double D, E, F, G;
  switch (viewer) {
    case Player::A:
      D = c * d(0b000) + s * d(0b011);
      E = c * d(0b101) + s * d(0b110);
      F = c * d(0b001) + s * d(0b110);
      G = c * d(0b100) + s * d(0b111);
      break;
    case Player::B:
      D = c * d(0b000) + s * d(0b101);
      E = c * d(0b011) + s * d(0b111);
      F = c * d(0b001) + s * d(0b011);
      G = c * d(0b010) + s * d(0b111);
      break;
    default:
      D = c * d(0b000) + s * d(0b001);
      E = c * d(0b011) + s * d(0b010);
      F = c * d(0b101) + s * d(0b100);
      G = c * d(0b110) + s * d(0b111);
      break;
  }
  const std::array<Player, 2> opp = opponents(viewer);
  const Player o1 = opp[0], o2 = opp[1];
  const double c1 = C[index(o1)], s1 = 1.0 - c1;
  const double c2 = C[index(o2)], s2 = 1.0 - c2;
  return c1 * c2 * D + s1 * s2 * E + c1 * s2 * F + s1 * c2 * G;
}

// --- printed phase-absorption transform ------------------------------------

PayoffMatrix printed_phase_transform(const PayoffMatrix& m, const StrategyTriple& s,
                                     const EntanglementConfig& cfg) {
  const double aA = s.of(Player::A).alpha, aB = s.of(Player::B).alpha,
               aC = s.of(Player::C).alpha;
  const double bA = s.of(Player::A).beta, bB = s.of(Player::B).beta,
               bC = s.of(Player::C).beta;
  const double e1 = cfg.eta1(), e2 = cfg.eta2(), xi = cfg.xi();
  PayoffMatrix out = m;
  for (Player k : {Player::A, Player::B, Player::C}) {
    const auto d = [&](int lab) { return m.at(k, lab); };
    // Rows stay on their own labels; the phases enter through single (not
    // doubled) angles; the last block reads the 101 entry for both inputs.
    const auto plus_pair = [&](int top, int bot, double u, double v) {
      out.at(k, top) = (e1 + xi * std::cos(u)) * d(top) + (e2 - xi * std::cos(u)) * d(bot);
      out.at(k, bot) = (e2 - xi * std::cos(v)) * d(top) + (e1 + xi * std::cos(v)) * d(bot);
    };
    plus_pair(0b000, 0b111, aA + aB + aC, bA + bB + bC);
    plus_pair(0b001, 0b110, aA + aB - bC, bA + bB - aC);
    const auto minus_pair = [&](int top, int bot, double u, double v, double in_top,
                                double in_bot) {
      out.at(k, top) = (e1 - xi * std::cos(u)) * in_top + (e2 + xi * std::cos(u)) * in_bot;
      out.at(k, bot) = (e2 + xi * std::cos(v)) * in_top + (e1 - xi * std::cos(v)) * in_bot;
    };
    minus_pair(0b100, 0b011, -bA + aB + aC, aA - bB + bC, d(0b100), d(0b011));
    minus_pair(0b101, 0b010, bA - aB + bC, aA - bB + aC, d(0b101), d(0b101));
  }
  return out;
}

// --- printed partial-regime forms ------------------------------------------

double printed_halfangle(const PayoffMatrix& m, Player k, double tB, double tC) {
  const auto d = [&](int lab) { return m.at(k, lab); };
  const double cm = std::cos((tB - tC) / 2), sm = std::sin((tB - tC) / 2);
  const double cp = std::cos((tB + tC) / 2), sp = std::sin((tB + tC) / 2);
  return 0.25 * (d(0b000) * cm * cm + d(0b111) * cp * cp + d(0b001) * sm * sm +
                 d(0b110) * sp * sp + d(0b100) * cp * cp + d(0b011) * cm * cm +
                 d(0b101) * sp * sp + d(0b010) * sm * sm);
}

struct Barred {
  double d, e, f, g;
};

Barred barred_quad(const PayoffMatrix& m, Player viewer, Player target, double own_C,
                   bool printed_gbar_c) {
  const CoefficientQuad q = coefficient_quad(m, target, viewer, own_C, QuadVariant::PartialBar);
  Barred b{q.d, q.e, q.f, q.g};
  if (printed_gbar_c && viewer == Player::C) {
    const double c = own_C, s = 1.0 - own_C;
    b.g = c * m.at(target, 0b001) + s * m.at(target, 0b100);  // printed 100, correct 000
  }
  return b;
}

double dual_K(const PayoffMatrix& m, Player viewer, Player target) {
  return partial_dual_bilinear_coefficient(m, viewer, target);
}

}  // namespace

std::vector<LedgerEntry> build_discrepancy_ledger() {
  std::vector<LedgerEntry> out;
  const PayoffMatrix m = reference_matrix();
  const StrategyTriple gs = general_strategies();
  const EntanglementConfig general(0.7, 0.9);

  // 1. General closed form: sign of the last phase angle in the C_A S_B S_C
  // coherence term (printed -beta_C, oracle requires +beta_C).
  out.push_back(make(
      "general-coherence-phase-sign", "general", kGeneralPoint,
      "C_A*S_B*S_C coherence term with phase cos2(-alphaA+alphaB(beta)-betaC) as printed",
      expected_payoffs_as_printed(general, gs, m)[0],
      expected_payoffs_oracle(general, gs, m)[0]));

  // 2. Tap replacement rule: the printed rule multiplies the whole alternating
  // interference bracket by mu_p, including the basis-side part that a tap on
  // the transmitted state cannot reach.
  {
    EavesdropConfig e;
    e.p = 0.5;
    ClosedFormOptions printed_opt;
    printed_opt.mu_coherence = e.mu_p();
    printed_opt.printed_mu_rule = true;
    out.push_back(make(
        "tap-blanket-interference-rule", "general",
        std::string(kGeneralPoint) + " tap=forward(B) p=0.5",
        "alternating-sum bracket scaled by mu_p in full, as the printed replacement states",
        closed_form_payoffs(general, gs, m, printed_opt)[0],
        expected_payoffs_oracle(tapped_final_state(general, gs, e), m, general.delta)[0]));
  }

  // 3. Single-player reduction at theta_B = theta_C = 0 in the maximally
  // entangled regime: printed companion entry 001, oracle companion 011.
  {
    const StrategyTriple s = StrategyTriple::from_theta(1.1, 0.0, 0.0);
    const double CA = s.C(Player::A), SA = s.S(Player::A);
    out.push_back(make("single-player-companion-label", "max-entangled",
                       "theta=(1.1,0,0) alpha=beta=0 matrix=generic(seed42) player=A",
                       "P = C_A*$000 + S_A*$001 (companion label 001 instead of 011)",
                       CA * m.at(Player::A, 0b000) + SA * m.at(Player::A, 0b001),
                       expected_payoffs_oracle(max_entangled(), s, m)[0]));
  }

  // 4. Maximally entangled coefficient quads: several printed companion
  // entries disagree with the GHZ branching (one record per viewer).
  {
    const StrategyTriple s = StrategyTriple::from_theta(kThetaA, kThetaB, kThetaC);
    const double C[3] = {s.C(Player::A), s.C(Player::B), s.C(Player::C)};
    const Payoffs oracle = expected_payoffs_oracle(max_entangled(), s, m);
    const char* names[3] = {"maxent-quad-viewer-A", "maxent-quad-viewer-B",
                            "maxent-quad-viewer-C"};
    for (Player v : {Player::A, Player::B, Player::C})
      out.push_back(make(
          names[index(v)], "max-entangled",
          "theta=(0.9,1.3,0.7) alpha=beta=0 matrix=generic(seed42) player=A",
          "bilinear payoff view built from the printed coefficient quad entries",
          printed_maxent_view(m, v, C, Player::A), oracle[0]));
  }

  // 5. Phase-absorption transform: printed rows keep their own labels (the
  // oracle requires the minus-pair rows to land on the partner labels), the
  // phases are printed as single angles, and the last input pair duplicates
  // the 101 entry.
  {
    const Payoffs oracle = expected_payoffs_oracle(max_entangled(), gs, m);
    const PayoffMatrix mp = printed_phase_transform(m, gs, max_entangled());
    const StrategyTriple bare = StrategyTriple::from_theta(kThetaA, kThetaB, kThetaC);
    out.push_back(make("phase-absorption-row-routing", "max-entangled",
                       std::string(kGeneralPoint) + " (gamma=delta=pi/2)",
                       "payoff of the printed phase-absorbed matrix played at alpha=beta=0",
                       expected_payoffs_oracle(max_entangled(), bare, mp)[0], oracle[0]));
  }

  // 6. Half-angle reduction claimed at theta_A = pi/4; the quarter-weight
  // two-angle form is exact only at theta_A = pi/2.
  {
    const StrategyTriple s = partial_strategies(kPi / 4, kThetaB, kThetaC);
    out.push_back(make(
        "halfangle-reduction-claim", "partial(delta=0,gamma=pi/2)",
        "theta=(pi/4,1.3,0.7) partial phases matrix=generic(seed42) player=A",
        "quarter-weight cos^2/sin^2 form of the payoff at the printed theta_A",
        printed_halfangle(m, Player::A, kThetaB, kThetaC),
        partial_payoff(s, m, PartialBranch::DeltaZero)[0]));
  }

  const PayoffMatrix dual = [] {
    Rng rng(7);
    return generate_not_dual_matrix(rng);
  }();
  const double Cdual[3] = {0.7, 0.35, 0.6};
  const StrategyTriple sdual = partial_strategies(
      theta_from_C(Cdual[0]), theta_from_C(Cdual[1]), theta_from_C(Cdual[2]));
  const Payoffs pdual =
      expected_payoffs_oracle(partial_branch_config(PartialBranch::DeltaZero), sdual, dual);
  const char* kDualPoint = "C=(0.7,0.35,0.6) partial phases matrix=not-dual(seed7) player=A";

  // 7. Bob's complement-symmetric bilinear view: the linear term that should
  // carry C_A is printed with a second C_C weight.
  {
    const Barred b = barred_quad(dual, Player::B, Player::A, Cdual[1], false);
    const double printed = Cdual[0] * Cdual[2] * dual_K(dual, Player::B, Player::A) +
                           Cdual[2] * (b.e - b.g) + Cdual[2] * (b.f - b.g) + b.g;
    out.push_back(make("dual-view-bob-linear-weight", "partial(delta=0,gamma=pi/2)",
                       kDualPoint,
                       "Bob's view with both linear terms weighted by C_C as printed",
                       printed, pdual[0]));
  }

  // 8. Charlie's barred G symbol: printed second companion 100, oracle 000.
  {
    const Barred b = barred_quad(dual, Player::C, Player::A, Cdual[2], true);
    const double printed = Cdual[0] * Cdual[1] * dual_K(dual, Player::C, Player::A) +
                           Cdual[0] * (b.e - b.g) + Cdual[1] * (b.f - b.g) + b.g;
    out.push_back(make("dual-view-charlie-gbar-companion", "partial(delta=0,gamma=pi/2)",
                       kDualPoint, "Charlie's view with barred G = C_C*$001 + S_C*$100",
                       printed, pdual[0]));
  }

  // 9. Full-disclosure recovery quotients in the complement-symmetric regime:
  // printed numerator adds the barred G instead of subtracting it (Bob), and
  // the printed denominator for Charlie reuses Bob's barred symbols.
  {
    const Barred bB = barred_quad(dual, Player::B, Player::A, Cdual[1], false);
    const double printed_cc =
        (pdual[0] - Cdual[0] * (bB.f - bB.g) + bB.g) /
        (Cdual[0] * dual_K(dual, Player::B, Player::A) + (bB.e - bB.g));
    out.push_back(make("dual-recovery-bob-numerator-sign", "partial(delta=0,gamma=pi/2)",
                       kDualPoint,
                       "C_C = (P^A - C_A(Fbar-Gbar) + Gbar) / (C_A K + (Ebar-Gbar))",
                       printed_cc, Cdual[2]));

    const Barred bC = barred_quad(dual, Player::C, Player::A, Cdual[2], false);
    const double printed_cb =
        (pdual[0] - Cdual[0] * (bC.f - bC.g) + bC.g) /
        (Cdual[0] * dual_K(dual, Player::C, Player::A) + (bB.e - bB.g));
    out.push_back(make("dual-recovery-charlie-denominator-subscript",
                       "partial(delta=0,gamma=pi/2)", kDualPoint,
                       "Charlie's quotient with Bob's barred (E-G) in the denominator",
                       printed_cb, Cdual[1]));
  }

  // 10. First symmetric minimal-disclosure case: the printed quotient solves
  // for C_C, but the payoff is independent of C_C there (Bob can only learn
  // C_A; the printed gap also uses entry 001 where the oracle needs 000).
  {
    Rng rng(11);
    const PayoffMatrix ms = generate_case_matrix(SymmetryCase::PartialSymI, rng);
    const Payoffs p = expected_payoffs_oracle(partial_branch_config(PartialBranch::DeltaZero),
                                              sdual, ms);
    const auto d = [&](int lab) { return ms.at(Player::A, lab); };
    const double gap = d(0b100) - d(0b001);
    const double printed_cc =
        (p[0] - d(0b110) + Cdual[1] * gap) / ((2 * Cdual[1] - 1) * gap);
    out.push_back(make("partial-sym-first-case-target", "partial(delta=0,gamma=pi/2)",
                       "C=(0.7,0.35,0.6) matrix=partial-sym-1(seed11) player=A",
                       "C_C = (P^A - $110 + C_B($100-$001)) / ((2C_B-1)($100-$001))",
                       printed_cc, Cdual[2]));
  }

  // 11. Second symmetric case: the printed Bob quotient divides by the gap
  // $100-$000, which the case's own equalities force to zero.
  {
    Rng rng(12);
    const PayoffMatrix ms = generate_case_matrix(SymmetryCase::PartialSymII, rng);
    const Payoffs p = expected_payoffs_oracle(partial_branch_config(PartialBranch::DeltaZero),
                                              sdual, ms);
    const auto d = [&](int lab) { return ms.at(Player::A, lab); };
    const double gap = d(0b100) - d(0b000);  // identically zero in this case
    const double printed_cc =
        (p[0] - d(0b000) - Cdual[1] * gap) / ((2 * Cdual[1] - 1) * gap);
    out.push_back(make("partial-sym-second-case-zero-gap", "partial(delta=0,gamma=pi/2)",
                       "C=(0.7,0.35,0.6) matrix=partial-sym-2(seed12) player=A",
                       "C_C = (P^A - $000 - C_B($100-$000)) / ((2C_B-1)($100-$000))",
                       printed_cc, Cdual[2]));
  }

  // 12. Third symmetric case: the text asserts the degenerate payoff equals 1;
  // it equals the common matrix entry, which is not 1 in general.
  {
    Rng rng(13);
    const PayoffMatrix ms = generate_case_matrix(SymmetryCase::PartialSymIII, rng);
    const Payoffs p = expected_payoffs_oracle(partial_branch_config(PartialBranch::DeltaZero),
                                              sdual, ms);
    out.push_back(make("partial-sym-third-case-unit-value", "partial(delta=0,gamma=pi/2)",
                       "C=(0.7,0.35,0.6) matrix=partial-sym-3(seed13) player=A",
                       "P^k = 1 for the fully degenerate symmetric case", 1.0, p[0]));
  }

  // 13. Replay ambiguity: the text quotes a flat 1/8 chance per replay that an
  // identically-played round repeats the same observation; the true rate is
  // the power sum of the opponents' pattern masses.
  {
    const StrategyTriple s = StrategyTriple::from_theta(
        theta_from_C(0.5), theta_from_C(0.3), theta_from_C(0.7));
    const auto dist = outcome_distribution(final_state(non_entangled(), s), 0.0);
    out.push_back(make("replay-repeat-probability", "non-entangled",
                       "C=(0.5,0.3,0.7) replays=2",
                       "repeat probability (1/8)^replays", std::pow(1.0 / 8.0, 2),
                       replay_ambiguity_rate(dist, 2)));
  }

  return out;
}

std::string format_ledger_line(const LedgerEntry& e) {
  char buf[768];
  std::snprintf(buf, sizeof(buf), "%s\t%s\t%s\t%s\t%.12g\t%.12g\t%.12g", e.id.c_str(),
                e.regime.c_str(), e.parameter_point.c_str(), e.printed_term.c_str(),
                e.printed_value, e.oracle_value, e.abs_difference);
  return buf;
}

std::string render_discrepancy_ledger() {
  std::string out =
      "# discrepancy ledger: printed formula vs brute-force oracle\n"
      "# columns: id\tregime\tparameter_point\tprinted_term\tprinted_value\t"
      "oracle_value\tabs_difference\n";
  for (const LedgerEntry& e : build_discrepancy_ledger()) {
    out += format_ledger_line(e);
    out += '\n';
  }
  return out;
}

}  // namespace qgkd
