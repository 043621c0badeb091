#include "qgkd/state_core.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qgkd/constants.hpp"

namespace qgkd {

namespace {
constexpr Complex kI{0.0, 1.0};
}

double PureState3::norm_error() const { return std::abs(amplitudes.squaredNorm() - 1.0); }

double DensityMatrix3::hermiticity_error() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix3::trace_error() const { return std::abs(rho.trace() - Complex{1.0, 0.0}); }

double DensityMatrix3::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat8> es(0.5 * (rho + rho.adjoint()));
  return es.eigenvalues().minCoeff();
}

double LocalUnitary::unitarity_error() const {
  return (u * u.adjoint() - Mat2::Identity()).cwiseAbs().maxCoeff();
}

double MeasurementBasis::orthonormality_error() const {
  double worst = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      const Complex g = vectors[i].dot(vectors[j]);  // conjugate-linear in first arg
      worst = std::max(worst, std::abs(g - (i == j ? Complex{1, 0} : Complex{0, 0})));
    }
  return worst;
}

double MeasurementBasis::completeness_error() const {
  Mat8 sum = Mat8::Zero();
  for (const auto& v : vectors) sum += v * v.adjoint();
  return (sum - Mat8::Identity()).cwiseAbs().maxCoeff();
}

PureState3 initial_state(const EntanglementConfig& cfg) {
  PureState3 psi;
  psi.amplitudes[label(0, 0, 0)] = std::cos(cfg.gamma / 2);
  psi.amplitudes[label(1, 1, 1)] = kI * std::sin(cfg.gamma / 2);
  return psi;
}

LocalUnitary strategy_unitary(double theta, double alpha, double beta) {
  return strategy_unitary(PlayerStrategy{theta, alpha, beta});
}

LocalUnitary strategy_unitary(const PlayerStrategy& s) {
  // U = cos(θ/2) R + sin(θ/2) Q with
  //   R|0> = e^{iα}|0>,        R|1> = e^{-iα}|1>,
  //   Q|0> = e^{i(π/2-β)}|1>,  Q|1> = e^{i(π/2+β)}|0>.
  Mat2 r = Mat2::Zero(), q = Mat2::Zero();
  r(0, 0) = std::exp(kI * s.alpha);
  r(1, 1) = std::exp(-kI * s.alpha);
  q(1, 0) = std::exp(kI * (kPi / 2 - s.beta));
  q(0, 1) = std::exp(kI * (kPi / 2 + s.beta));
  LocalUnitary u;
  u.u = s.c() * r + s.s() * q;
  return u;
}

Mat8 kron3(const Mat2& a, const Mat2& b, const Mat2& c) {
  Mat8 out;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      out(i, j) = a((i >> 2) & 1, (j >> 2) & 1) * b((i >> 1) & 1, (j >> 1) & 1) *
                  c(i & 1, j & 1);
  return out;
}

DensityMatrix3 evolve(const PureState3& state, const LocalUnitary& uA, const LocalUnitary& uB,
                      const LocalUnitary& uC) {
  const Mat8 u = kron3(uA.u, uB.u, uC.u);
  const Vec8 phi = u * state.amplitudes;
  DensityMatrix3 rho;
  rho.rho = phi * phi.adjoint();
  return rho;
}

MeasurementBasis measurement_basis(double delta) {
  if (!(delta >= 0.0 && delta <= kPi / 2 + 1e-12))
    throw std::domain_error("delta must lie in [0, pi/2]");
  const double cd = std::cos(delta / 2), sd = std::sin(delta / 2);
  MeasurementBasis basis;
  basis.delta = delta;
  for (int lab = 0; lab < 8; ++lab) {
    // +i sin for {000, 111, 001, 110}; -i sin for {010, 101, 011, 100}
    const bool plus = lab == 0b000 || lab == 0b111 || lab == 0b001 || lab == 0b110;
    Vec8 v = Vec8::Zero();
    v[lab] = cd;
    v[complement_label(lab)] = (plus ? kI : -kI) * sd;
    basis.vectors[lab] = v;
  }
  return basis;
}

Mat8 payoff_operator(const PayoffMatrix& m, Player k, double delta) {
  const MeasurementBasis basis = measurement_basis(delta);
  Mat8 op = Mat8::Zero();
  for (int lab = 0; lab < 8; ++lab)
    op += m.at(k, lab) * (basis.vectors[lab] * basis.vectors[lab].adjoint());
  return op;
}

DensityMatrix3 final_state(const EntanglementConfig& cfg, const StrategyTriple& s) {
  return evolve(initial_state(cfg), strategy_unitary(s.of(Player::A)),
                strategy_unitary(s.of(Player::B)), strategy_unitary(s.of(Player::C)));
}

Payoffs expected_payoffs_oracle(const DensityMatrix3& rho, const PayoffMatrix& m, double delta) {
  Payoffs p{};
  for (Player k : {Player::A, Player::B, Player::C})
    p[index(k)] = (payoff_operator(m, k, delta) * rho.rho).trace().real();
  return p;
}

Payoffs expected_payoffs_oracle(const EntanglementConfig& cfg, const StrategyTriple& s,
                                const PayoffMatrix& m) {
  return expected_payoffs_oracle(final_state(cfg, s), m, cfg.delta);
}

std::array<double, 8> outcome_distribution(const DensityMatrix3& rho, double delta) {
  const MeasurementBasis basis = measurement_basis(delta);
  std::array<double, 8> p{};
  for (int lab = 0; lab < 8; ++lab)
    p[lab] = (basis.vectors[lab].adjoint() * rho.rho * basis.vectors[lab])(0, 0).real();
  return p;
}

int sample_outcome(const std::array<double, 8>& dist, Rng& rng) {
  const double sum = std::accumulate(dist.begin(), dist.end(), 0.0);
  if (std::abs(sum - 1.0) > tol::kDistSum * 1e2)
    throw std::domain_error("outcome distribution is not normalized");
  const double x = rng.uniform(0.0, sum);
  double acc = 0.0;
  for (int lab = 0; lab < 8; ++lab) {
    acc += dist[lab];
    if (x < acc) return lab;
  }
  return 7;
}

std::array<std::uint64_t, 8> sample_counts(const std::array<double, 8>& dist,
                                           std::uint64_t shots, Rng& rng) {
  const double sum = std::accumulate(dist.begin(), dist.end(), 0.0);
  if (std::abs(sum - 1.0) > tol::kDistSum * 1e2)
    throw std::domain_error("outcome distribution is not normalized");
  std::array<std::uint64_t, 8> counts{};
  double remaining_mass = sum;
  std::uint64_t remaining = shots;
  for (int lab = 0; lab < 7 && remaining > 0; ++lab) {
    const double p = remaining_mass > 0 ? std::min(1.0, dist[lab] / remaining_mass) : 0.0;
    counts[lab] = rng.binomial(remaining, p);
    remaining -= counts[lab];
    remaining_mass -= dist[lab];
  }
  counts[7] = remaining;
  return counts;
}

}  // namespace qgkd
