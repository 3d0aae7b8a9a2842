#include "mixnet/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "mixnet/errors.hpp"

namespace mixnet {

namespace {

// Splits the stream into records of fields, honoring quotes.
std::vector<std::vector<std::string>> read_records(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  int c;
  while ((c = in.get()) != EOF) {
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          field.clear();
          records.push_back(std::move(row));
          row.clear();
          row_started = false;
        }
        break;
      default:
        field.push_back(ch);
        row_started = true;
        break;
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  if (row_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    records.push_back(std::move(row));
  }
  return records;
}

}  // namespace

RawTable parse_csv(std::istream& in) {
  auto records = read_records(in);
  if (records.empty()) throw DataError("csv: file is empty");

  auto& header = records[0];
  if (!header.empty() && header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
    header[0].erase(0, 3);
  }

  RawTable table;
  table.names = header;
  std::size_t p = header.size();
  table.columns.resize(p);
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != p) {
      throw DataError("csv: row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                      " fields, expected " + std::to_string(p));
    }
    for (std::size_t c = 0; c < p; ++c) table.columns[c].push_back(std::move(records[r][c]));
  }
  return table;
}

RawTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file: " + path);
  return parse_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out += "\"";
  return out;
}

}  // namespace mixnet
