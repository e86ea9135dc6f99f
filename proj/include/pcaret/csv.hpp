#pragma once

#include <string>
#include <vector>

namespace pcaret {

// Minimal RFC 4180 CSV support: comma-delimited, double-quoted fields
// with "" escapes, quoted fields may contain commas and newlines.

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0; // 1-based line the record started on
};

// Parses an entire CSV document. Throws DataError on unterminated
// quotes, naming the offending line.
std::vector<CsvRecord> parse_csv(const std::string& text);

// Quotes a field only when needed.
std::string csv_escape(const std::string& field);

std::string csv_join(const std::vector<std::string>& fields);

} // namespace pcaret
