#include "qgkd/adversary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qgkd {

namespace {

int count(const std::array<bool, 3>& flags) {
  return int(flags[0]) + int(flags[1]) + int(flags[2]);
}

}  // namespace

int EavesdropConfig::forward_count() const { return count(forward); }
int EavesdropConfig::backward_count() const { return count(backward); }

void EavesdropConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("tap probability must lie in [0, 1]");
}

DensityMatrix3 phase_damp(const DensityMatrix3& rho, double p,
                          const std::array<bool, 3>& targets) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("tap probability must lie in [0, 1]");
  DensityMatrix3 out = rho;
  const double mu = 1.0 - p;
  for (Player q : {Player::A, Player::B, Player::C}) {
    if (!targets[index(q)]) continue;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        if (bit_of(i, q) != bit_of(j, q)) out.rho(i, j) *= mu;
  }
  return out;
}

DensityMatrix3 tapped_final_state(const EntanglementConfig& cfg, const StrategyTriple& s,
                                  const EavesdropConfig& e) {
  e.validate();
  const PureState3 psi = initial_state(cfg);
  DensityMatrix3 rho;
  rho.rho = psi.amplitudes * psi.amplitudes.adjoint();
  rho = phase_damp(rho, e.p, e.forward);
  const Mat8 u = kron3(strategy_unitary(s.of(Player::A)).u, strategy_unitary(s.of(Player::B)).u,
                       strategy_unitary(s.of(Player::C)).u);
  rho.rho = u * rho.rho * u.adjoint();
  return phase_damp(rho, e.p, e.backward);
}

Payoffs tapped_expected_payoffs(const EntanglementConfig& cfg, const StrategyTriple& s,
                                const PayoffMatrix& m, const EavesdropConfig& e) {
  e.validate();
  if (e.forward_only()) {
    // Every forward tap multiplies the lone initial-state coherence by mu_p,
    // so the general closed form applies with the product of the factors.
    ClosedFormOptions opt;
    opt.mu_coherence = std::pow(e.mu_p(), e.forward_count());
    return closed_form_payoffs(cfg, s, m, opt);
  }
  return expected_payoffs_oracle(tapped_final_state(cfg, s, e), m, cfg.delta);
}

Payoffs tapped_partial_payoff(const StrategyTriple& s, const PayoffMatrix& m,
                              PartialBranch branch, const EavesdropConfig& e) {
  e.validate();
  const EntanglementConfig cfg = partial_branch_config(branch);
  if (!has_partial_phases(s))
    throw std::domain_error("partial-regime payoff requires the fixed phase assignment");
  if (!e.forward_only())
    return expected_payoffs_oracle(tapped_final_state(cfg, s, e), m, cfg.delta);
  // Forward taps scale only the interference cross-term, and only on the
  // entangled branch; the product branch carries no initial coherence to damp.
  const double mu = branch == PartialBranch::DeltaZero
                        ? std::pow(e.mu_p(), e.forward_count())
                        : 1.0;
  const double c[3] = {s.of(Player::A).c(), s.of(Player::B).c(), s.of(Player::C).c()};
  const double sn[3] = {s.of(Player::A).s(), s.of(Player::B).s(), s.of(Player::C).s()};
  const auto t = [&](int lab) {
    double prod = 1.0;
    for (Player q : {Player::A, Player::B, Player::C})
      prod *= bit_of(lab, q) ? sn[index(q)] : c[index(q)];
    return prod;
  };
  const double sgn = branch == PartialBranch::DeltaZero ? 1.0 : -1.0;
  Payoffs out{};
  for (int lab = 0; lab < 8; ++lab) {
    const double eps = std::popcount(unsigned(lab)) % 2 ? -1.0 : 1.0;
    const double tl = t(lab), tc = t(complement_label(lab));
    const double prob = 0.5 * (tl * tl + tc * tc) + mu * sgn * eps * tl * tc;
    for (Player k : {Player::A, Player::B, Player::C}) out[index(k)] += prob * m.at(k, lab);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Regime r) {
  switch (r) {
    case Regime::NonEntangled: return "non-entangled";
    case Regime::MaxEntangled: return "max-entangled";
    case Regime::PartialDeltaZero: return "partial-delta-zero";
    case Regime::PartialGammaZero: return "partial-gamma-zero";
  }
  return "?";
}

EntanglementConfig regime_config(Regime r) {
  switch (r) {
    case Regime::NonEntangled: return non_entangled();
    case Regime::MaxEntangled: return max_entangled();
    case Regime::PartialDeltaZero: return partial_branch_config(PartialBranch::DeltaZero);
    case Regime::PartialGammaZero: return partial_branch_config(PartialBranch::GammaZero);
  }
  throw std::domain_error("unknown regime");
}

namespace {

bool phases_are_zero(const StrategyTriple& s) {
  for (Player k : {Player::A, Player::B, Player::C}) {
    const PlayerStrategy& ps = s.of(k);
    if (std::abs(ps.alpha) > 1e-12 || std::abs(ps.beta) > 1e-12) return false;
  }
  return true;
}

DetectionReport undetectable(Regime regime, const Payoffs& delta, std::string cause,
                             std::uint64_t n, std::optional<double> p_true) {
  DetectionReport r;
  r.verdict = DetectionReport::Verdict::Undetectable;
  r.regime = regime;
  r.payoff_delta = delta;
  r.sample_count = n;
  r.p_true = p_true;
  r.cause = std::move(cause);
  return r;
}

}  // namespace

DetectionReport detect_eavesdropper(const Payoffs& observed, Regime regime,
                                    const StrategyTriple& s, const PayoffMatrix& m,
                                    double sensitivity, std::uint64_t sample_count,
                                    std::optional<double> p_true) {
  const bool partial =
      regime == Regime::PartialDeltaZero || regime == Regime::PartialGammaZero;
  if (partial ? !has_partial_phases(s) : !phases_are_zero(s))
    throw std::domain_error(
        "detection is certified only at the regime's fixed phase assignment");

  const EntanglementConfig cfg = regime_config(regime);
  EavesdropConfig fully_damped;
  fully_damped.p = 1.0;
  const PartialBranch branch = regime == Regime::PartialDeltaZero
                                   ? PartialBranch::DeltaZero
                                   : PartialBranch::GammaZero;
  // P(mu_p) is affine: P = damped + mu_p * slope, per player.
  const Payoffs clean = partial ? partial_payoff(s, m, branch)
                                : expected_payoffs_closed(cfg, s, m);
  const Payoffs damped = partial ? tapped_partial_payoff(s, m, branch, fully_damped)
                                 : tapped_expected_payoffs(cfg, s, m, fully_damped);

  Payoffs delta{};
  for (int k = 0; k < 3; ++k) delta[k] = observed[k] - clean[k];

  if (regime == Regime::NonEntangled)
    return undetectable(regime, delta, "payoffs carry no initial-state coherence",
                        sample_count, p_true);
  if (regime == Regime::PartialGammaZero)
    return undetectable(regime, delta, "product-state branch is tap-immune", sample_count,
                        p_true);

  int best = 0;
  Payoffs slope{};
  for (int k = 0; k < 3; ++k) {
    slope[k] = clean[k] - damped[k];
    if (std::abs(slope[k]) > std::abs(slope[best])) best = k;
  }
  DetectionReport r;
  r.regime = regime;
  r.payoff_delta = delta;
  r.slope = slope[best];
  r.sample_count = sample_count;
  r.p_true = p_true;
  if (std::abs(slope[best]) < 1e-9)
    return undetectable(regime, delta, "mu_p slope vanishes at the operating point",
                        sample_count, p_true);

  double max_dev = 0.0;
  for (int k = 0; k < 3; ++k) max_dev = std::max(max_dev, std::abs(delta[k]));
  if (max_dev <= sensitivity) {
    r.verdict = DetectionReport::Verdict::Clean;
    return r;
  }
  // observed = clean + (mu_hat - 1) * slope  =>  p_hat = -delta / slope
  const double p_hat = -delta[best] / slope[best];
  r.verdict = DetectionReport::Verdict::Tapped;
  r.p_hat = std::clamp(p_hat, 0.0, 1.0);
  return r;
}

}  // namespace qgkd
