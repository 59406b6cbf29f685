#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace apsolve::cli {

using CsvRow = std::vector<std::string>;

// RFC 4180: fields with commas, quotes or line breaks are quoted, quotes doubled.
void write_csv_row(std::ostream& out, const CsvRow& row);
std::vector<CsvRow> read_csv(std::istream& in);

}  // namespace apsolve::cli
