#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixnet {

// Column-major string table as read from disk, before typing.
struct RawTable {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> columns;

  int n_rows() const { return columns.empty() ? 0 : static_cast<int>(columns[0].size()); }
  int n_cols() const { return static_cast<int>(names.size()); }
};

// RFC-4180-style CSV: quoted fields, "" escapes, CR/LF line endings. The
// first record is the header. Ragged rows raise DataError.
RawTable parse_csv(std::istream& in);
RawTable read_csv(const std::string& path);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// One CSV field, quoted only when needed.
std::string csv_escape(const std::string& field);

}  // namespace mixnet
