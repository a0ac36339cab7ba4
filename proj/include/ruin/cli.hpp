#pragma once

#include <iosfwd>
#include <vector>

namespace ruin {

/// Runs the ruinsim command line. Returns the process exit status; module
/// errors are reported on `err` with status 1.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct FiniteTableRow {
  double u, c, sigma, delta, T, gamma;
  double reference;  // 4-decimal reference value
};

struct InfiniteTableRow {
  double u, c, sigma, delta, gamma;
  double reference;
};

/// Published finite-horizon asymptotic values (12 rows).
const std::vector<FiniteTableRow>& finite_horizon_table();
/// Published infinite-horizon asymptotic values (8 rows).
const std::vector<InfiniteTableRow>& infinite_horizon_table();

}  // namespace ruin
