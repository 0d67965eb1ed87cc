#pragma once

#include <string>
#include <vector>

#include "polysound/errors.hpp"

namespace polysound {

// Numeric table with named columns.  All emitters in this project write
// through this type so the quoting, precision, and line-ending rules live
// in one place.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // each row has columns.size() cells
};

// Render a table: header line, then one row per line, values printed with
// %.17g so a read-back reproduces the doubles exactly.  Lines end with "\n".
std::string format_csv(const CsvTable& table);

// Write content to path via a temporary file in the same directory followed
// by a rename, so a crash never leaves a half-written file behind.
void write_file_atomic(const std::string& path, const std::string& content);

void write_csv(const std::string& path, const CsvTable& table);

// Parse a CSV produced by format_csv (or any comma-separated numeric table
// with a header row).  Throws IoError naming the offending line on malformed
// input and on rows whose cell count disagrees with the header.
CsvTable read_csv(const std::string& path);

// Entire file as a string; IoError if unreadable.
std::string read_file(const std::string& path);

}  // namespace polysound
