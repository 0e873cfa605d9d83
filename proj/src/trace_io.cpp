#include "vdc/trace_io.hpp"

#include <charconv>
#include <fstream>

namespace vdc {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

void write_csv(const TraceTable& table, std::ostream& os) {
  for (size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << "\n";
  for (const std::vector<double>& row : table.rows) {
    if (row.size() != table.columns.size())
      throw ModelError("trace row width does not match the header");
    for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << "\n";
  }
}

void write_csv(const TraceTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot open trace output file: " + path);
  write_csv(table, out);
}

}  // namespace vdc
