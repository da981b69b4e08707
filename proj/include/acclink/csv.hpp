#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace acclink::csv {

/// Minimal RFC 4180 support: fields containing separators, quotes or newlines
/// are quoted on write and unquoted on read.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

/// Parses one CSV record. Embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line);

/// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);
double parse_double(const std::string& field, std::string_view context);

struct Table {
  std::vector<std::string> comments;  // '#' lines preceding the header, without the marker
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws when missing
};

Table read_table(std::istream& in, const std::string& source_name);

}  // namespace acclink::csv
