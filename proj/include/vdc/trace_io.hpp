#pragma once

#include <ostream>
#include <string>

#include "vdc/simulation.hpp"

namespace vdc {

/// Locale-independent CSV: header row with the column names, then one row
/// per step, numbers with 12 significant digits and a dot decimal point.
void write_csv(const TraceTable& table, std::ostream& os);
void write_csv(const TraceTable& table, const std::string& path);

/// 12-significant-digit decimal text of one number (shared by CSV and
/// config output).
std::string format_number(double v);

}  // namespace vdc
