#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "cattree/dataset.hpp"
#include "cattree/metrics.hpp"
#include "cattree/tree.hpp"

namespace cattree {

struct RunConfig {
    DatasetSpec dataset;
    BuildConfig build;
    int max_iters = 1;          // recursive reclustering passes
    std::size_t min_changes = 1;
    std::vector<std::string> report_columns;
    GroupedVarianceOptions variance;
    bool weighted_gain = false;
    std::string format = "json";  // or "table"
    std::uint64_t seed = 0;       // 0 = keep input order
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty() || !out.empty())
        out.push_back(trim(cur));
    while (!out.empty() && out.back().empty())
        out.pop_back();
    return out;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw Error("config error: bad boolean for '" + key + "': " + v);
}

inline EncodingTable parse_encoding(const std::string& value) {
    if (value == "@month")
        return month_encoding();
    if (value == "@day")
        return day_encoding();
    EncodingTable table;
    for (const std::string& pair : split_list(value)) {
        std::size_t colon = pair.find(':');
        if (colon == std::string::npos)
            throw Error("config error: encoding entry '" + pair +
                        "' is not token:value");
        const std::string token = trim(pair.substr(0, colon));
        auto num = parse_number(trim(pair.substr(colon + 1)));
        if (token.empty() || !num)
            throw Error("config error: encoding entry '" + pair +
                        "' is not token:value");
        table[token] = *num;
    }
    return table;
}

}  // namespace detail

inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
    using detail::parse_bool;
    using detail::split_list;
    auto number = [&]() {
        auto v = detail::parse_number(value);
        if (!v)
            throw Error("config error: bad number for '" + key + "': " + value);
        return *v;
    };
    if (key == "path")
        cfg.dataset.path = value;
    else if (key == "category_columns")
        cfg.dataset.category_columns = split_list(value);
    else if (key == "feature_columns")
        cfg.dataset.feature_columns = split_list(value);
    else if (key == "output_column")
        cfg.dataset.output_column = value;
    else if (key == "normalize")
        cfg.dataset.normalize = parse_bool(value, key);
    else if (key.rfind("encoding.", 0) == 0)
        cfg.dataset.encodings[key.substr(9)] = detail::parse_encoding(value);
    else if (key == "target")
        cfg.build.target = number();
    else if (key == "depth_cap")
        cfg.build.depth_cap = static_cast<int>(number());
    else if (key == "min_branch_size")
        cfg.build.min_branch_size = static_cast<std::size_t>(number());
    else if (key == "max_iters")
        cfg.max_iters = static_cast<int>(number());
    else if (key == "min_changes")
        cfg.min_changes = static_cast<std::size_t>(number());
    else if (key == "report_columns")
        cfg.report_columns = split_list(value);
    else if (key == "weighted_groups")
        cfg.variance.weighted = parse_bool(value, key);
    else if (key == "sample_variance")
        cfg.variance.kind = parse_bool(value, key) ? VarianceKind::sample
                                                   : VarianceKind::population;
    else if (key == "weighted_gain")
        cfg.weighted_gain = parse_bool(value, key);
    else if (key == "format")
        cfg.format = value;
    else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(number());
    else
        throw Error("config error: unknown key '" + key + "'");
}

inline void validate_run_config(const RunConfig& cfg) {
    if (cfg.dataset.path.empty())
        throw Error("config error: no dataset path");
    if (!(cfg.build.target > 0.0))
        throw Error("invalid target");
    if (cfg.build.depth_cap < 1 || cfg.build.depth_cap > 64)
        throw Error("config error: depth_cap must be in 1..64");
    if (cfg.max_iters < 0 || cfg.max_iters > 100)
        throw Error("config error: max_iters must be in 0..100");
    if (cfg.build.min_branch_size < 1)
        throw Error("config error: min_branch_size must be >= 1");
    if (cfg.format != "json" && cfg.format != "table")
        throw Error("config error: format must be json or table");
}

// Key-value recipe files: one `key = value` per line, '#' comments.
inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("io error: cannot open " + path.string());
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = detail::trim(line);
        if (text.empty() || text[0] == '#')
            continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw Error("config error: line " + std::to_string(lineno) +
                        " is not key = value");
        apply_config_entry(cfg, detail::trim(text.substr(0, eq)),
                           detail::trim(text.substr(eq + 1)));
    }
    // dataset paths resolve relative to the recipe file
    if (!cfg.dataset.path.empty() && cfg.dataset.path.is_relative())
        cfg.dataset.path = path.parent_path() / cfg.dataset.path;
    return cfg;
}

}  // namespace cattree
