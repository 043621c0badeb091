#include "qgkd/payoff_forms.hpp"

#include <cmath>
#include <stdexcept>

#include "qgkd/constants.hpp"

namespace qgkd {

namespace {

int popcount_parity(int lab) { return ((lab >> 2) ^ (lab >> 1) ^ lab) & 1; }

bool near(double a, double b, double tolerance) { return std::abs(a - b) <= tolerance; }

}  // namespace

double alternating_sum(const PayoffMatrix& m, Player k) {
  double sum = 0.0;
  for (int lab = 0; lab < 8; ++lab)
    sum += (popcount_parity(lab) ? -1.0 : 1.0) * m.at(k, lab);
  return sum;
}

double interference_term(const EntanglementConfig& cfg, const StrategyTriple& s,
                         const PayoffMatrix& m, Player k) {
  const double aA = s.of(Player::A).alpha, aB = s.of(Player::B).alpha, aC = s.of(Player::C).alpha;
  const double bA = s.of(Player::A).beta, bB = s.of(Player::B).beta, bC = s.of(Player::C).beta;
  const auto d = [&](int lab) { return m.at(k, lab); };
  const double sins =
      std::sin(s.of(Player::A).theta) * std::sin(s.of(Player::B).theta) * std::sin(s.of(Player::C).theta);
  return 0.125 * sins *
         (std::cos(cfg.delta) * std::sin(cfg.gamma) * std::cos(aA + aB + aC - bA - bB - bC) *
              alternating_sum(m, k) -
          std::cos(cfg.gamma) * std::sin(cfg.delta) *
              ((d(0b000) - d(0b111)) * std::cos(aA + aB + aC + bA + bB + bC) +
               (d(0b110) - d(0b001)) * std::cos(aA + aB - aC + bA + bB - bC) +
               (d(0b010) - d(0b101)) * std::cos(aA - aB + aC + bA - bB + bC) +
               (d(0b100) - d(0b011)) * std::cos(aA - aB - aC + bA - bB - bC)));
}

Payoffs closed_form_payoffs(const EntanglementConfig& cfg, const StrategyTriple& s,
                            const PayoffMatrix& m, const ClosedFormOptions& opt) {
  const double CA = s.C(Player::A), CB = s.C(Player::B), CC = s.C(Player::C);
  const double SA = s.S(Player::A), SB = s.S(Player::B), SC = s.S(Player::C);
  const double aA = s.of(Player::A).alpha, aB = s.of(Player::B).alpha, aC = s.of(Player::C).alpha;
  const double bA = s.of(Player::A).beta, bB = s.of(Player::B).beta, bC = s.of(Player::C).beta;
  const double eta1 = cfg.eta1(), eta2 = cfg.eta2();
  const double xi = cfg.xi() * opt.mu_coherence;
  // The C_A S_B S_C phase; the corrected sign on b_C makes the form exact.
  const double phase_CSS =
      opt.printed_phase_typo ? std::cos(2 * (-aA + bB - bC)) : std::cos(2 * (-aA + bB + bC));
  const double sins =
      std::sin(s.of(Player::A).theta) * std::sin(s.of(Player::B).theta) * std::sin(s.of(Player::C).theta);
  const double mu_coh = opt.mu_coherence;
  const double mu_sd = opt.printed_mu_rule ? opt.mu_coherence : 1.0;

  Payoffs out{};
  for (Player k : {Player::A, Player::B, Player::C}) {
    const auto d = [&](int lab) { return m.at(k, lab); };
    double p =
        CA * CB * CC * (eta1 * d(0b000) + eta2 * d(0b111) +
                        xi * (d(0b000) - d(0b111)) * std::cos(2 * (aA + aB + aC))) +
        SA * SB * SC * (eta2 * d(0b000) + eta1 * d(0b111) -
                        xi * (d(0b000) - d(0b111)) * std::cos(2 * (bA + bB + bC))) +
        CA * CB * SC * (eta1 * d(0b001) + eta2 * d(0b110) +
                        xi * (d(0b001) - d(0b110)) * std::cos(2 * (aA + aB - bC))) +
        SA * SB * CC * (eta2 * d(0b001) + eta1 * d(0b110) -
                        xi * (d(0b001) - d(0b110)) * std::cos(2 * (bA + bB - aC))) +
        SA * CB * CC * (eta1 * d(0b100) + eta2 * d(0b011) -
                        xi * (d(0b100) - d(0b011)) * std::cos(2 * (-bA + aB + aC))) +
        CA * SB * SC * (eta2 * d(0b100) + eta1 * d(0b011) +
                        xi * (d(0b100) - d(0b011)) * phase_CSS) +
        SA * CB * SC * (eta1 * d(0b101) + eta2 * d(0b010) -
                        xi * (d(0b101) - d(0b010)) * std::cos(2 * (bA - aB + bC))) +
        CA * SB * CC * (eta2 * d(0b101) + eta1 * d(0b010) +
                        xi * (d(0b101) - d(0b010)) * std::cos(2 * (aA - bB + aC)));
    // Interference term: the sin(gamma) piece lives on the state coherence and
    // is damped by mu; the cos(gamma) sin(delta) piece belongs to the basis.
    p += 0.125 * sins *
         (mu_coh * std::cos(cfg.delta) * std::sin(cfg.gamma) *
              std::cos(aA + aB + aC - bA - bB - bC) * alternating_sum(m, k) -
          mu_sd * std::cos(cfg.gamma) * std::sin(cfg.delta) *
              ((d(0b000) - d(0b111)) * std::cos(aA + aB + aC + bA + bB + bC) +
               (d(0b110) - d(0b001)) * std::cos(aA + aB - aC + bA + bB - bC) +
               (d(0b010) - d(0b101)) * std::cos(aA - aB + aC + bA - bB + bC) +
               (d(0b100) - d(0b011)) * std::cos(aA - aB - aC + bA - bB - bC)));
    out[index(k)] = p;
  }
  return out;
}

// ---------------------------------------------------------------------------

CoefficientQuad coefficient_quad(const PayoffMatrix& m, Player target, Player viewer,
                                 double own_C, QuadVariant variant) {
  if (!(own_C >= 0.0 && own_C <= 1.0)) throw std::domain_error("own_C must lie in [0, 1]");
  const double c = own_C, s = 1.0 - own_C;
  const auto d = [&](int lab) { return m.at(target, lab); };
  CoefficientQuad q;
  q.variant = variant;
  q.viewer = viewer;
  q.target = target;
  switch (variant) {
    case QuadVariant::NonEntangled:
      // The viewer's own bit is fixed first; the quad indexes the opponents'
      // bits (00, 10, 01, 11) in A<B<C order.
      switch (viewer) {
        case Player::A:
          q.d = c * d(0b000) + s * d(0b100);
          q.e = c * d(0b010) + s * d(0b110);
          q.f = c * d(0b001) + s * d(0b101);
          q.g = c * d(0b011) + s * d(0b111);
          break;
        case Player::B:
          q.d = c * d(0b000) + s * d(0b010);
          q.e = c * d(0b100) + s * d(0b110);
          q.f = c * d(0b001) + s * d(0b011);
          q.g = c * d(0b101) + s * d(0b111);
          break;
        case Player::C:
          q.d = c * d(0b000) + s * d(0b001);
          q.e = c * d(0b100) + s * d(0b101);
          q.f = c * d(0b010) + s * d(0b011);
          q.g = c * d(0b110) + s * d(0b111);
          break;
      }
      break;
    case QuadVariant::MaxEntangled:
      // Weights pair as (C1C2)d + (S1S2)e + (C1S2)f + (S1C2)g over the two
      // opponents; the own-bit companions follow the GHZ branching.
      switch (viewer) {
        case Player::A:
          q.d = c * d(0b000) + s * d(0b011);
          q.e = c * d(0b100) + s * d(0b111);
          q.f = c * d(0b001) + s * d(0b010);
          q.g = c * d(0b101) + s * d(0b110);
          break;
        case Player::B:
          q.d = c * d(0b000) + s * d(0b101);
          q.e = c * d(0b010) + s * d(0b111);
          q.f = c * d(0b001) + s * d(0b100);
          q.g = c * d(0b011) + s * d(0b110);
          break;
        case Player::C:
          q.d = c * d(0b000) + s * d(0b001);
          q.e = c * d(0b110) + s * d(0b111);
          q.f = c * d(0b101) + s * d(0b100);
          q.g = c * d(0b011) + s * d(0b010);
          break;
      }
      break;
    case QuadVariant::PartialBar:
      // Barred symbols of the NOT-dual bilinear form; only the four labels
      // with a = 0 appear since the duality folds the rest in.
      switch (viewer) {
        case Player::A:
          q.d = c * d(0b000) + s * d(0b100);
          q.e = c * d(0b101) + s * d(0b001);
          q.f = c * d(0b001) + s * d(0b101);
          q.g = c * d(0b100) + s * d(0b000);
          break;
        case Player::B:
          q.d = c * d(0b000) + s * d(0b101);
          q.e = c * d(0b100) + s * d(0b001);
          q.f = c * d(0b001) + s * d(0b100);
          q.g = c * d(0b101) + s * d(0b000);
          break;
        case Player::C:
          q.d = c * d(0b000) + s * d(0b001);
          q.e = c * d(0b101) + s * d(0b100);
          q.f = c * d(0b100) + s * d(0b101);
          q.g = c * d(0b001) + s * d(0b000);
          break;
      }
      break;
  }
  return q;
}

namespace {

// Opponent C values in A<B<C order for the given viewer.
std::pair<double, double> opponent_Cs(Player viewer, const std::array<double, 3>& C) {
  const auto [o1, o2] = opponents(viewer);
  return {C[index(o1)], C[index(o2)]};
}

}  // namespace

double nonentangled_payoff_view(const PayoffMatrix& m, Player viewer,
                                const std::array<double, 3>& C, Player target) {
  const CoefficientQuad q =
      coefficient_quad(m, target, viewer, C[index(viewer)], QuadVariant::NonEntangled);
  const auto [c1, c2] = opponent_Cs(viewer, C);
  const double s1 = 1 - c1, s2 = 1 - c2;
  return c1 * c2 * q.d + s1 * c2 * q.e + c1 * s2 * q.f + s1 * s2 * q.g;
}

double maxentangled_payoff_view(const PayoffMatrix& m, Player viewer,
                                const std::array<double, 3>& C, Player target) {
  const CoefficientQuad q =
      coefficient_quad(m, target, viewer, C[index(viewer)], QuadVariant::MaxEntangled);
  const auto [c1, c2] = opponent_Cs(viewer, C);
  const double s1 = 1 - c1, s2 = 1 - c2;
  return c1 * c2 * q.d + s1 * s2 * q.e + c1 * s2 * q.f + s1 * c2 * q.g;
}

// ---------------------------------------------------------------------------

PayoffMatrix symmetry_permute_matrix(const PayoffMatrix& m) {
  PayoffMatrix out = m;
  for (Player k : {Player::A, Player::B, Player::C}) {
    std::swap(out.at(k, 0b100), out.at(k, 0b011));
    std::swap(out.at(k, 0b010), out.at(k, 0b101));
  }
  return out;
}

PayoffMatrix phase_transform_matrix(const PayoffMatrix& m, const StrategyTriple& s,
                                    const EntanglementConfig& cfg) {
  const bool zero = near(cfg.gamma, 0.0, 1e-9) && near(cfg.delta, 0.0, 1e-9);
  const bool maxent = near(cfg.gamma, kPi / 2, 1e-9) && near(cfg.delta, kPi / 2, 1e-9);
  if (!zero && !maxent)
    throw std::domain_error("phase absorption requires gamma = delta in {0, pi/2}");
  const double eta1 = cfg.eta1(), eta2 = cfg.eta2(), xi = cfg.xi();
  const double aA = s.of(Player::A).alpha, aB = s.of(Player::B).alpha, aC = s.of(Player::C).alpha;
  const double bA = s.of(Player::A).beta, bB = s.of(Player::B).beta, bC = s.of(Player::C).beta;

  struct PairRule {
    int u, v;
    double phase_u, phase_v;
    bool minus;  // the pair whose xi term enters with a minus sign
  };
  const PairRule rules[] = {
      {0b000, 0b111, aA + aB + aC, bA + bB + bC, false},
      {0b001, 0b110, aA + aB - bC, bA + bB - aC, false},
      {0b100, 0b011, -bA + aB + aC, -aA + bB + bC, true},
      {0b101, 0b010, bA - aB + bC, aA - bB + aC, true},
  };

  PayoffMatrix out = m;
  for (Player k : {Player::A, Player::B, Player::C}) {
    for (const PairRule& r : rules) {
      const double du = m.at(k, r.u), dv = m.at(k, r.v);
      const double sgn = r.minus ? -1.0 : 1.0;
      const double row_u = (eta1 + sgn * xi * std::cos(2 * r.phase_u)) * du +
                           (eta2 - sgn * xi * std::cos(2 * r.phase_u)) * dv;
      const double row_v = (eta2 - sgn * xi * std::cos(2 * r.phase_v)) * du +
                           (eta1 + sgn * xi * std::cos(2 * r.phase_v)) * dv;
      // At maximum entanglement the minus-pair outcomes trade places, so the
      // absorbed entries land on the partner labels.
      if (r.minus && maxent) {
        out.at(k, r.v) = row_u;
        out.at(k, r.u) = row_v;
      } else {
        out.at(k, r.u) = row_u;
        out.at(k, r.v) = row_v;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

EntanglementConfig partial_branch_config(PartialBranch branch) {
  return branch == PartialBranch::DeltaZero ? EntanglementConfig{kPi / 2, 0.0}
                                            : EntanglementConfig{0.0, kPi / 2};
}

bool has_partial_phases(const StrategyTriple& s, double tolerance) {
  for (Player k : {Player::A, Player::B, Player::C})
    if (!near(s.of(k).alpha, 0.0, tolerance)) return false;
  return near(s.of(Player::A).beta, -kPi / 2, tolerance) &&
         near(s.of(Player::B).beta, kPi / 2, tolerance) &&
         near(s.of(Player::C).beta, 0.0, tolerance);
}

StrategyTriple partial_strategies(double thetaA, double thetaB, double thetaC) {
  return {{thetaA, 0.0, -kPi / 2}, {thetaB, 0.0, kPi / 2}, {thetaC, 0.0, 0.0}};
}

std::array<double, 8> partial_outcome_probabilities(const StrategyTriple& s,
                                                    PartialBranch branch) {
  if (!has_partial_phases(s))
    throw std::domain_error("partial-regime payoff requires the fixed phase assignment");
  const double c[3] = {s.of(Player::A).c(), s.of(Player::B).c(), s.of(Player::C).c()};
  const double sn[3] = {s.of(Player::A).s(), s.of(Player::B).s(), s.of(Player::C).s()};
  const auto t = [&](int lab) {
    double prod = 1.0;
    for (Player p : {Player::A, Player::B, Player::C})
      prod *= bit_of(lab, p) ? sn[index(p)] : c[index(p)];
    return prod;
  };
  // Branch (i) takes the upper signs, branch (ii) the lower ones.
  const double sgn = branch == PartialBranch::DeltaZero ? 1.0 : -1.0;
  std::array<double, 8> p{};
  for (int lab = 0; lab < 8; ++lab) {
    const double eps = popcount_parity(lab) ? -1.0 : 1.0;
    const double amp = t(lab) + sgn * eps * t(complement_label(lab));
    p[lab] = 0.5 * amp * amp;
  }
  return p;
}

Payoffs partial_payoff(const StrategyTriple& s, const PayoffMatrix& m, PartialBranch branch) {
  const std::array<double, 8> p = partial_outcome_probabilities(s, branch);
  Payoffs out{};
  for (Player k : {Player::A, Player::B, Player::C}) {
    double sum = 0.0;
    for (int lab = 0; lab < 8; ++lab) sum += p[lab] * m.at(k, lab);
    out[index(k)] = sum;
  }
  return out;
}

Payoffs partial_halfangle_payoff(double thetaB, double thetaC, const PayoffMatrix& m,
                                 PartialBranch branch) {
  return partial_payoff(partial_strategies(kPi / 2, thetaB, thetaC), m, branch);
}

// ---------------------------------------------------------------------------

bool satisfies_not_duality(const PayoffMatrix& m, Player k, double tolerance) {
  for (int lab = 0; lab < 4; ++lab)
    if (!near(m.at(k, lab), m.at(k, complement_label(lab)), tolerance)) return false;
  return true;
}

bool satisfies_not_duality(const PayoffMatrix& m, double tolerance) {
  for (Player k : {Player::A, Player::B, Player::C})
    if (!satisfies_not_duality(m, k, tolerance)) return false;
  return true;
}

double partial_dual_payoff_view(const PayoffMatrix& m, Player viewer,
                                const std::array<double, 3>& C, Player target) {
  if (!satisfies_not_duality(m, target, 1e-9))
    throw std::domain_error("payoff slice violates the complement-pair equality");
  const CoefficientQuad q =
      coefficient_quad(m, target, viewer, C[index(viewer)], QuadVariant::PartialBar);
  const auto [c1, c2] = opponent_Cs(viewer, C);
  // P = K c1 c2 + linear terms + G with the barred symbols; for viewers A and
  // B the F bar rides on the first opponent, for viewer C on the second.
  const double lin = viewer == Player::C ? (q.e - q.g) * c1 + (q.f - q.g) * c2
                                         : (q.f - q.g) * c1 + (q.e - q.g) * c2;
  return partial_dual_bilinear_coefficient(m, viewer, target) * c1 * c2 + lin + q.g;
}

double partial_dual_bilinear_coefficient(const PayoffMatrix& m, Player viewer, Player target) {
  const auto d = [&](int lab) { return m.at(target, lab); };
  switch (viewer) {
    case Player::A: return d(0b000) + d(0b100) - d(0b001) - d(0b101);
    case Player::B: return d(0b000) + d(0b101) - d(0b001) - d(0b100);
    default: return d(0b000) + d(0b001) - d(0b100) - d(0b101);
  }
}

}  // namespace qgkd
