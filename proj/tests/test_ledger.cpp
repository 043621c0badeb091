#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qgkd/ledger.hpp"

using namespace qgkd;

#ifndef QGKD_LEDGER_FILE
#define QGKD_LEDGER_FILE "data/discrepancy_ledger.tsv"
#endif

TEST_CASE("every ledger entry records a genuine divergence") {
  const auto entries = build_discrepancy_ledger();
  CHECK(entries.size() >= 13);
  for (const LedgerEntry& e : entries) {
    INFO(e.id);
    CHECK(!e.id.empty());
    CHECK(!e.regime.empty());
    CHECK(!e.parameter_point.empty());
    CHECK(!e.printed_term.empty());
    CHECK(std::isfinite(e.oracle_value));
    // divergences must be real: well above every verification tolerance
    CHECK((e.abs_difference > 1e-6 || std::isinf(e.abs_difference)));
    if (std::isfinite(e.printed_value))
      CHECK(e.abs_difference ==
            doctest::Approx(std::abs(e.printed_value - e.oracle_value)));
  }
}

TEST_CASE("ledger rendering is deterministic") {
  CHECK(render_discrepancy_ledger() == render_discrepancy_ledger());
  const auto entries = build_discrepancy_ledger();
  for (const LedgerEntry& e : entries) {
    const std::string line = format_ledger_line(e);
    // one record per line, tab separated, seven fields
    CHECK(std::count(line.begin(), line.end(), '\t') == 6);
    CHECK(line.find('\n') == std::string::npos);
  }
}

TEST_CASE("shipped ledger file matches the regenerated records") {
  std::ifstream in(QGKD_LEDGER_FILE, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing " QGKD_LEDGER_FILE);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == render_discrepancy_ledger());
}
