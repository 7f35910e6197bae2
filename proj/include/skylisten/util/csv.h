#ifndef SKYLISTEN_UTIL_CSV_H_
#define SKYLISTEN_UTIL_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace skylisten::util {

using CsvRow = std::vector<std::string>;

// RFC 4180 quoting: fields containing a comma, quote or newline are wrapped
// in double quotes with embedded quotes doubled.
std::string CsvEscape(std::string_view field);
std::string JoinCsvRow(const CsvRow& fields);

// Parses a whole document. Quoted fields may span lines. A trailing newline
// does not produce an empty row; "\r\n" line endings are accepted.
std::vector<CsvRow> ParseCsv(std::string_view text);

}  // namespace skylisten::util

#endif  // SKYLISTEN_UTIL_CSV_H_
