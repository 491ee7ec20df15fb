/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#pragma once

#include <istream>
#include <string>
#include <vector>

namespace gbd {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows; // each row has header.size() cells

    int column(const std::string& name) const; // -1 when absent
};

// RFC-4180ish reader: comma separated, double-quote quoting with ""
// escapes, quoted cells may contain newlines. Ragged rows raise
// DataError.
CsvTable read_csv(std::istream& in, const std::string& name = "");

} // namespace gbd
