#include "qgkd/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qgkd {

namespace {

void impose_dual(PayoffMatrix& m, Player k) {
  for (int lab = 0; lab < 4; ++lab) m.at(k, 7 - lab) = m.at(k, lab);
}

void impose_case(PayoffMatrix& m, Player k, SymmetryCase c) {
  switch (c) {
    case SymmetryCase::CaseI:
      m.at(k, 0b101) = m.at(k, 0b001);
      m.at(k, 0b111) = m.at(k, 0b011);
      m.at(k, 0b110) = m.at(k, 0b010);
      break;
    case SymmetryCase::CaseII:
      m.at(k, 0b101) = m.at(k, 0b100);
      m.at(k, 0b110) = m.at(k, 0b100);
      m.at(k, 0b111) = m.at(k, 0b100);
      break;
    case SymmetryCase::CaseIII:
      for (int lab = 2; lab < 8; ++lab) m.at(k, lab) = m.at(k, 0b001);
      break;
    // The partial cases are written on the 000-011 representatives (the
    // complement symmetry identifies 101 with 010 and 100 with 011) and then
    // mirrored onto the upper labels.
    case SymmetryCase::PartialSymI:
      m.at(k, 0b001) = m.at(k, 0b000);
      m.at(k, 0b010) = m.at(k, 0b011);
      impose_dual(m, k);
      break;
    case SymmetryCase::PartialSymII:
      m.at(k, 0b010) = m.at(k, 0b001);
      m.at(k, 0b011) = m.at(k, 0b000);
      impose_dual(m, k);
      break;
    case SymmetryCase::PartialSymIII:
      m.at(k, 0b001) = m.at(k, 0b000);
      m.at(k, 0b010) = m.at(k, 0b000);
      m.at(k, 0b011) = m.at(k, 0b000);
      impose_dual(m, k);
      break;
    case SymmetryCase::None:
      break;
  }
}

bool is_partial_case(SymmetryCase c) {
  return c == SymmetryCase::PartialSymI || c == SymmetryCase::PartialSymII ||
         c == SymmetryCase::PartialSymIII;
}

// Nondegeneracy of the differences each case's recovery divides by,
// evaluated on every constrained slice.
bool gaps_ok(const PayoffMatrix& m, Player k, SymmetryCase c, double min_gap) {
  const auto d = [&](int lab) { return m.at(k, lab); };
  const auto far = [&](double a, double b) { return std::abs(a - b) >= min_gap; };
  switch (c) {
    case SymmetryCase::CaseI:
      // midpoint D-E and E-G of the recovery quotients
      return far(d(0b000) + d(0b010), d(0b100) + d(0b110)) &&
             far(d(0b100) + d(0b110), d(0b001) + d(0b011));
    case SymmetryCase::CaseII:
      return far(d(0b000) + d(0b010), d(0b001) + d(0b011)) &&
             far(d(0b001) + d(0b011), 2 * d(0b100));
    case SymmetryCase::CaseIII:
      return far(d(0b000), d(0b001));
    case SymmetryCase::PartialSymI:
      return far(d(0b100), d(0b000));
    case SymmetryCase::PartialSymII:
      return far(d(0b001), d(0b000));
    case SymmetryCase::PartialSymIII:
      return true;
    case SymmetryCase::None:
      return true;
  }
  return true;
}

PayoffMatrix draw(Rng& rng, const GeneratorOptions& opt) {
  PayoffMatrix m;
  for (auto& row : m.entries)
    for (double& v : row) v = rng.uniform(opt.entry_low, opt.entry_high);
  return m;
}

PayoffMatrix generate(SymmetryCase c, bool dual_only, Rng& rng, const GeneratorOptions& opt) {
  const bool all = opt.constrain_all_players || is_partial_case(c) || dual_only;
  // The complement symmetry makes complementary profiles share one ratio
  // triple whenever every slice is symmetric, so distinctness is unreachable.
  const bool check_ratios = opt.require_ratio_distinct && !(all && (dual_only || is_partial_case(c)));
  for (int attempt = 0; attempt < 500; ++attempt) {
    PayoffMatrix m = draw(rng, opt);
    const auto constrained = all ? std::vector<Player>{Player::A, Player::B, Player::C}
                                 : std::vector<Player>{Player::A, Player::B};
    for (Player k : constrained) {
      if (dual_only)
        impose_dual(m, k);
      else
        impose_case(m, k, c);
    }
    bool ok = true;
    if (!dual_only)
      for (Player k : constrained)
        if (!gaps_ok(m, k, c, opt.min_gap)) ok = false;
    if (dual_only) {
      // keep the bilinear coefficient of the dual form away from zero
      for (Player viewer : {Player::A, Player::B, Player::C})
        if (std::abs(partial_dual_bilinear_coefficient(m, viewer, Player::A)) < opt.min_gap)
          ok = false;
    }
    if (ok && check_ratios && !validate_ratio_distinctness(m).distinct) ok = false;
    if (ok) return m;
  }
  throw std::runtime_error("matrix generation failed to satisfy the constraints");
}

}  // namespace

PayoffMatrix generate_case_matrix(SymmetryCase c, Rng& rng, const GeneratorOptions& opt) {
  return generate(c, false, rng, opt);
}

PayoffMatrix generate_not_dual_matrix(Rng& rng, const GeneratorOptions& opt) {
  return generate(SymmetryCase::None, true, rng, opt);
}

PayoffMatrix generate_generic_matrix(Rng& rng, const GeneratorOptions& opt) {
  return generate(SymmetryCase::None, false, rng, opt);
}

double minimum_case_gap(const PayoffMatrix& m, SymmetryCase c) {
  const auto players = is_partial_case(c)
                           ? std::vector<Player>{Player::A, Player::B, Player::C}
                           : std::vector<Player>{Player::A, Player::B};
  double best = std::numeric_limits<double>::infinity();
  for (Player k : players) {
    const auto d = [&](int lab) { return m.at(k, lab); };
    const auto gap = [&](double a, double b) { best = std::min(best, std::abs(a - b)); };
    switch (c) {
      case SymmetryCase::CaseI:
        gap(d(0b000) + d(0b010), d(0b100) + d(0b110));
        gap(d(0b100) + d(0b110), d(0b001) + d(0b011));
        break;
      case SymmetryCase::CaseII:
        gap(d(0b000) + d(0b010), d(0b001) + d(0b011));
        gap(d(0b001) + d(0b011), 2 * d(0b100));
        break;
      case SymmetryCase::CaseIII:
        gap(d(0b000), d(0b001));
        break;
      case SymmetryCase::PartialSymI:
        gap(d(0b100), d(0b000));
        break;
      case SymmetryCase::PartialSymII:
        gap(d(0b001), d(0b000));
        break;
      case SymmetryCase::PartialSymIII:
      case SymmetryCase::None:
        break;
    }
  }
  return best;
}

}  // namespace qgkd
