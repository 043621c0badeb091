#pragma once

#include <string>
#include <vector>

// Discrepancy ledger: every place where a formula as printed in the source
// text disagrees with the brute-force oracle, frozen as a reproducible record
// (regime, parameter point, printed value, oracle value, absolute difference).
// The printed variants are re-evaluated live, so the ledger doubles as a
// regression test that the divergences are real and stable.
namespace qgkd {

struct LedgerEntry {
  std::string id;               // stable slug naming the divergent term
  std::string regime;           // entanglement regime of the evaluation
  std::string parameter_point;  // concrete parameters the record was taken at
  std::string printed_term;     // what the printed formula states, functionally
  double printed_value = 0.0;
  double oracle_value = 0.0;
  double abs_difference = 0.0;
};

std::vector<LedgerEntry> build_discrepancy_ledger();

// One tab-separated line: id, regime, point, printed term, printed value,
// oracle value, absolute difference. Deterministic formatting (%.12g).
std::string format_ledger_line(const LedgerEntry& e);

// Full file image: a commented header plus one line per entry.
std::string render_discrepancy_ledger();

}  // namespace qgkd
