#pragma once

// Locale-independent CSV output: '.' decimal point and shortest
// round-trippable number formatting regardless of the global locale.

#include <iosfwd>
#include <string>
#include <vector>

namespace ddsim {

// shortest representation that parses back to the same double
std::string format_double(double v);

// header + equal-length columns, one row per index, '\n' line endings
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

}  // namespace ddsim
