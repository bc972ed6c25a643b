#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "cattree/core.hpp"

namespace cattree {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> records;
};

namespace detail {

// RFC-4180 field splitting: quoted fields may contain commas, doubled
// quotes and line breaks.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& out) {
    out.clear();
    std::string field;
    bool quoted = false;
    bool any = false;
    int ch;
    while ((ch = in.get()) != std::char_traits<char>::eof()) {
        any = true;
        char c = static_cast<char>(ch);
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r')
                field.pop_back();
            out.push_back(field);
            return true;
        } else {
            field.push_back(c);
        }
    }
    if (!any)
        return false;
    if (!field.empty() && field.back() == '\r')
        field.pop_back();
    out.push_back(field);
    return true;
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    if (!detail::read_csv_record(in, table.header))
        throw Error("io error: empty csv input");
    std::vector<std::string> rec;
    while (detail::read_csv_record(in, rec)) {
        if (rec.size() == 1 && rec[0].empty())
            continue;  // blank line
        table.records.push_back(rec);
    }
    return table;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("io error: cannot open " + path.string());
    return read_csv(in);
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += "\"\"";
        else
            out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string join_record(const std::vector<std::string>& rec) {
    std::string out;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        if (i)
            out.push_back(',');
        out += csv_escape(rec[i]);
    }
    return out;
}

}  // namespace cattree
