#pragma once

#include "qgkd/key_recovery.hpp"
#include "qgkd/rng.hpp"
#include "qgkd/types.hpp"

// Reproducible payoff-matrix generators for every solved symmetry class. Each
// generator draws random entries, imposes the class equalities, and keeps the
// payoff gaps that recovery divides by above a safety margin.
namespace qgkd {

struct GeneratorOptions {
  // Impose the case equalities on Charlie's slice too. Needed whenever the
  // session key includes P^C symbols that Bob and Charlie must compute
  // without knowing every strategy.
  bool constrain_all_players = false;
  // Keep the ratio triples of the 8 profiles pairwise distinct (retries the
  // draw). Unsatisfiable for the complement-symmetric classes when all three
  // slices are constrained; the generator then skips the check.
  bool require_ratio_distinct = true;
  double entry_low = 0.5;
  double entry_high = 3.5;
  double min_gap = 0.2;  // lower bound on recovery-critical entry differences
};

PayoffMatrix generate_case_matrix(SymmetryCase c, Rng& rng, const GeneratorOptions& opt = {});

// Complement-pair-symmetric matrix with no additional case structure.
PayoffMatrix generate_not_dual_matrix(Rng& rng, const GeneratorOptions& opt = {});

// Unconstrained ratio-distinct matrix.
PayoffMatrix generate_generic_matrix(Rng& rng, const GeneratorOptions& opt = {});

// Smallest absolute payoff gap that the case's recovery divides by, over the
// two constrained players. Returns +inf for cases without such a gap.
double minimum_case_gap(const PayoffMatrix& m, SymmetryCase c);

}  // namespace qgkd
