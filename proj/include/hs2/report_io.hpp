#pragma once

#include <string>
#include <vector>

namespace hs2 {

/// Shortest round-trip decimal representation of a double ("nan"/"inf"
/// spelled lowercase). Deterministic across runs; re-parses to the same bits.
std::string fmt_double(double v);

/// One CSV row from already-formatted cells.
std::string csv_row(const std::vector<std::string>& cells);

}  // namespace hs2
