#pragma once

#include <array>

#include "qgkd/rng.hpp"
#include "qgkd/types.hpp"

// Exact 3-qubit engine: state preparation, local unitaries, the delta-basis,
// payoff observables and the brute-force expected-payoff oracle. Everything
// downstream is checked against this module.
namespace qgkd {

struct PureState3 {
  Vec8 amplitudes = Vec8::Zero();

  double norm_error() const;  // | Σ|amp|² - 1 |
};

struct DensityMatrix3 {
  Mat8 rho = Mat8::Zero();

  double hermiticity_error() const;
  double trace_error() const;
  double min_eigenvalue() const;
};

struct LocalUnitary {
  Mat2 u = Mat2::Identity();

  double unitarity_error() const;  // max |U U† - I|
};

struct MeasurementBasis {
  double delta = 0.0;
  std::array<Vec8, 8> vectors{};  // indexed by label abc

  double orthonormality_error() const;
  double completeness_error() const;
};

PureState3 initial_state(const EntanglementConfig& cfg);

LocalUnitary strategy_unitary(double theta, double alpha, double beta);
LocalUnitary strategy_unitary(const PlayerStrategy& s);

Mat8 kron3(const Mat2& a, const Mat2& b, const Mat2& c);

DensityMatrix3 evolve(const PureState3& state, const LocalUnitary& uA,
                      const LocalUnitary& uB, const LocalUnitary& uC);

MeasurementBasis measurement_basis(double delta);

// $^{(k)} = Σ_abc $^{(k)}_{abc} |ψ_abc><ψ_abc|
Mat8 payoff_operator(const PayoffMatrix& m, Player k, double delta);

DensityMatrix3 final_state(const EntanglementConfig& cfg, const StrategyTriple& s);

// P^k = Tr($^{(k)} ρ_f) by full matrix arithmetic. Project-wide ground truth.
Payoffs expected_payoffs_oracle(const EntanglementConfig& cfg, const StrategyTriple& s,
                                const PayoffMatrix& m);
Payoffs expected_payoffs_oracle(const DensityMatrix3& rho, const PayoffMatrix& m, double delta);

// p_abc = Tr(|ψ_abc><ψ_abc| ρ)
std::array<double, 8> outcome_distribution(const DensityMatrix3& rho, double delta);

// One projective-measurement realization. Same generator state => same outcome.
int sample_outcome(const std::array<double, 8>& dist, Rng& rng);

// Multinomial counts for `shots` repetitions of the measurement.
std::array<std::uint64_t, 8> sample_counts(const std::array<double, 8>& dist,
                                           std::uint64_t shots, Rng& rng);

// Single-round "measured payoff": outcome probability times the payoff
// eigenvalue of the collapsed basis state. Exposed as a product of the two
// separately meaningful quantities.
inline double measured_payoff(double probability, double payoff_entry) {
  return probability * payoff_entry;
}

}  // namespace qgkd
