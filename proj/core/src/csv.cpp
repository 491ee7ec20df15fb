/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#include "gbd/csv.hpp"
#include "gbd/errors.hpp"

namespace gbd {

int CsvTable::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

CsvTable read_csv(std::istream& in, const std::string& name) {
    std::string where = name.empty() ? "csv input" : name;
    CsvTable table;
    std::vector<std::string> record;
    std::string cell;
    bool quoted = false;
    bool cell_started = false;
    bool record_started = false;

    auto end_cell = [&] {
        record.push_back(std::move(cell));
        cell.clear();
        cell_started = false;
    };
    auto end_record = [&] {
        end_cell();
        if (table.header.empty()) {
            table.header = std::move(record);
        } else {
            if (record.size() != table.header.size()) {
                throw DataError(where + ": ragged row " + std::to_string(table.rows.size() + 2));
            }
            table.rows.push_back(std::move(record));
        }
        record.clear();
        record_started = false;
    };

    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cell.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!cell_started) {
                quoted = true;
                cell_started = true;
                record_started = true;
            } else {
                cell.push_back(c);
            }
            break;
        case ',':
            end_cell();
            record_started = true;
            break;
        case '\r':
            break;
        case '\n':
            if (record_started || cell_started || !cell.empty()) end_record();
            break;
        default:
            cell.push_back(c);
            cell_started = true;
            record_started = true;
            break;
        }
    }
    if (quoted) throw DataError(where + ": unterminated quoted cell");
    if (record_started || cell_started || !cell.empty()) end_record();
    return table;
}

} // namespace gbd
