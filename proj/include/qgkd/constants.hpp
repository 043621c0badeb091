#pragma once

// Central tolerance table. Every numeric bound used by the library and the
// test suites lives here; nothing is tuned locally.
namespace qgkd::tol {

inline constexpr double kHermitian = 1e-12;       // ρ = ρ†
inline constexpr double kTrace = 1e-12;           // Tr ρ = 1
inline constexpr double kPsd = 1e-10;             // eigenvalues ≥ -kPsd
inline constexpr double kNorm = 1e-12;            // |ψ|² = 1
inline constexpr double kOrthonormal = 1e-12;     // basis Gram matrix
inline constexpr double kUnitary = 1e-12;         // U U† = I
inline constexpr double kSpectrum = 1e-9;         // payoff-operator eigenvalues
inline constexpr double kDistSum = 1e-10;         // Σ p_abc = 1
inline constexpr double kClosedForm = 1e-9;       // closed form vs oracle
inline constexpr double kSymmetryMap = 1e-10;     // permuted-matrix equivalence
inline constexpr double kPhaseTransform = 1e-9;   // phase-transformed matrix
inline constexpr double kLastTermVanish = 1e-12;  // interference term
inline constexpr double kGlobalPhase = 1e-10;     // payoff invariance
inline constexpr double kCommute = 1e-10;         // payoff operators commute
inline constexpr double kRecovery = 1e-6;         // recovered strategies
inline constexpr double kRecoveryClamp = 1e-6;    // slack before clamping C
inline constexpr double kRatioMatch = 1e-9;       // ratio-triple distinctness
inline constexpr double kIdentify = 1e-6;         // outcome identification
inline constexpr double kSingularDenominator = 1e-9;
inline constexpr double kSafetyMargin = 1e-3;     // generator denominator margin
inline constexpr double kCaseEquality = 1e-12;    // symmetry-case entry checks
inline constexpr double kPIndependence = 1e-10;   // tap-immune regimes
inline constexpr double kTappedClosed = 1e-9;     // tapped closed form vs oracle
inline constexpr double kPHatExact = 1e-6;        // tap-probability inversion

}  // namespace qgkd::tol
