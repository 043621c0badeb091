#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qgkd {

using Complex = std::complex<double>;
using Vec8 = Eigen::Matrix<Complex, 8, 1>;
using Mat8 = Eigen::Matrix<Complex, 8, 8>;
using Mat2 = Eigen::Matrix<Complex, 2, 2>;

inline constexpr double kPi = 3.14159265358979323846;

enum class Player { A = 0, B = 1, C = 2 };

inline int index(Player p) { return static_cast<int>(p); }
inline char letter(Player p) { return "ABC"[index(p)]; }

// The two players other than `p`, in A<B<C order.
inline std::array<Player, 2> opponents(Player p) {
  switch (p) {
    case Player::A: return {Player::B, Player::C};
    case Player::B: return {Player::A, Player::C};
    default: return {Player::A, Player::B};
  }
}

// Basis labels abc map to the integer 4a+2b+c. Alice owns qubit a,
// Bob qubit b, Charlie qubit c.
inline int label(int a, int b, int c) { return 4 * a + 2 * b + c; }
inline int bit_of(int lab, Player p) { return (lab >> (2 - index(p))) & 1; }
inline int complement_label(int lab) { return 7 - lab; }
inline std::string label_string(int lab) {
  return {char('0' + ((lab >> 2) & 1)), char('0' + ((lab >> 1) & 1)), char('0' + (lab & 1))};
}

// Entanglement of the initial state (gamma) and of the measurement basis
// (delta), with the derived eta1/eta2/xi combinations.
struct EntanglementConfig {
  double gamma = 0.0;
  double delta = 0.0;

  EntanglementConfig() = default;
  EntanglementConfig(double gamma_, double delta_) : gamma(gamma_), delta(delta_) {
    if (!(gamma >= 0.0 && gamma <= kPi / 2 + 1e-12))
      throw std::domain_error("gamma must lie in [0, pi/2]");
    if (!(delta >= 0.0 && delta <= kPi / 2 + 1e-12))
      throw std::domain_error("delta must lie in [0, pi/2]");
  }

  double eta1() const {
    const double cg = std::cos(gamma / 2), sg = std::sin(gamma / 2);
    const double cd = std::cos(delta / 2), sd = std::sin(delta / 2);
    return cg * cg * cd * cd + sg * sg * sd * sd;
  }
  double eta2() const {
    const double cg = std::cos(gamma / 2), sg = std::sin(gamma / 2);
    const double cd = std::cos(delta / 2), sd = std::sin(delta / 2);
    return sg * sg * cd * cd + cg * cg * sd * sd;
  }
  double xi() const { return 0.5 * std::sin(delta) * std::sin(gamma); }
};

inline EntanglementConfig non_entangled() { return {0.0, 0.0}; }
inline EntanglementConfig max_entangled() { return {kPi / 2, kPi / 2}; }

// One player's (theta, alpha, beta) with the derived C/S and half-angle values.
struct PlayerStrategy {
  double theta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  PlayerStrategy() = default;
  PlayerStrategy(double theta_, double alpha_, double beta_)
      : theta(theta_), alpha(alpha_), beta(beta_) {
    if (!(theta >= -1e-12 && theta <= kPi + 1e-12))
      throw std::domain_error("theta must lie in [0, pi]");
    if (!(alpha >= -kPi - 1e-12 && alpha <= kPi + 1e-12))
      throw std::domain_error("alpha must lie in [-pi, pi]");
    if (!(beta >= -kPi - 1e-12 && beta <= kPi + 1e-12))
      throw std::domain_error("beta must lie in [-pi, pi]");
  }

  double C() const { const double c = std::cos(theta / 2); return c * c; }
  double S() const { const double s = std::sin(theta / 2); return s * s; }
  double c() const { return std::cos(theta / 2); }
  double s() const { return std::sin(theta / 2); }
};

struct StrategyTriple {
  std::array<PlayerStrategy, 3> by_player;

  StrategyTriple() = default;
  StrategyTriple(PlayerStrategy a, PlayerStrategy b, PlayerStrategy c)
      : by_player{a, b, c} {}

  const PlayerStrategy& of(Player p) const { return by_player[index(p)]; }
  PlayerStrategy& of(Player p) { return by_player[index(p)]; }

  double C(Player p) const { return of(p).C(); }
  double S(Player p) const { return of(p).S(); }

  static StrategyTriple from_theta(double tA, double tB, double tC) {
    return {{tA, 0, 0}, {tB, 0, 0}, {tC, 0, 0}};
  }
};

// theta from a disclosed C value; the branch theta in [0, pi] is fixed since
// every recovery-regime formula depends on theta only through C and S.
inline double theta_from_C(double C) {
  const double clamped = std::min(1.0, std::max(0.0, C));
  return 2.0 * std::acos(std::sqrt(clamped));
}

// 24 real entries $^{(k)}_{abc}: the classical game table.
struct PayoffMatrix {
  // entries[k][label], k indexed by Player, label = 4a+2b+c
  std::array<std::array<double, 8>, 3> entries{};

  double at(Player k, int lab) const { return entries[index(k)][lab]; }
  double& at(Player k, int lab) { return entries[index(k)][lab]; }

  bool all_finite() const {
    for (const auto& row : entries)
      for (double v : row)
        if (!std::isfinite(v)) return false;
    return true;
  }

  static PayoffMatrix constant(double v) {
    PayoffMatrix m;
    for (auto& row : m.entries) row.fill(v);
    return m;
  }
};

inline std::array<double, 3> payoff_row(const PayoffMatrix& m, int lab) {
  return {m.at(Player::A, lab), m.at(Player::B, lab), m.at(Player::C, lab)};
}

using Payoffs = std::array<double, 3>;  // (P^A, P^B, P^C)

}  // namespace qgkd
