#pragma once

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cattree/core.hpp"
#include "cattree/csv.hpp"

namespace cattree {

using EncodingTable = std::map<std::string, double>;

struct DatasetSpec {
    std::filesystem::path path;
    std::vector<std::string> category_columns;
    std::vector<std::string> feature_columns;
    std::optional<std::string> output_column;
    std::map<std::string, EncodingTable> encodings;
    bool normalize = true;
};

struct Dataset {
    std::vector<DataRow> rows;               // features normalized when requested
    std::vector<std::string> categories;     // sorted, unique
    std::vector<std::string> feature_names;
    std::size_t dropped_count = 0;

    std::vector<FeatureVector> raw_features; // pre-normalization, for reports
    std::string output_name;                 // empty when no output column
    std::vector<std::string> source_header;  // original csv header
    std::vector<std::vector<std::string>> source_records;  // retained rows, input order
    bool normalized = false;
    std::vector<double> feature_min, feature_max;  // raw scale, valid when normalized
};

inline double encode_month(const std::string& token) {
    static const char* names[12] = {"jan", "feb", "mar", "apr", "may", "jun",
                                    "jul", "aug", "sep", "oct", "nov", "dec"};
    std::string t;
    for (char c : token)
        t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (int i = 0; i < 12; ++i)
        if (t == names[i])
            return i + 1.0;
    throw Error("encoding error: unknown month token '" + token + "'");
}

inline double encode_day(const std::string& token) {
    static const char* names[7] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
    std::string t;
    for (char c : token)
        t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (int i = 0; i < 7; ++i)
        if (t == names[i])
            return i + 1.0;
    throw Error("encoding error: unknown day token '" + token + "'");
}

inline EncodingTable month_encoding() {
    static const char* names[12] = {"jan", "feb", "mar", "apr", "may", "jun",
                                    "jul", "aug", "sep", "oct", "nov", "dec"};
    EncodingTable t;
    for (int i = 0; i < 12; ++i)
        t[names[i]] = i + 1.0;
    return t;
}

inline EncodingTable day_encoding() {
    static const char* names[7] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
    EncodingTable t;
    for (int i = 0; i < 7; ++i)
        t[names[i]] = i + 1.0;
    return t;
}

namespace detail {

inline std::optional<double> parse_number(const std::string& s) {
    if (s.empty())
        return std::nullopt;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin != end && (*begin == ' ' || *begin == '\t'))
        ++begin;
    while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t'))
        --end;
    if (begin == end)
        return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        return std::nullopt;
    return value;
}

inline std::size_t column_index(const std::vector<std::string>& header,
                                const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw Error("schema error: unknown column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

// "(x, y)" for composite categories, the bare token otherwise
inline std::string category_token(const std::vector<std::string>& parts) {
    if (parts.size() == 1)
        return parts[0];
    std::string out = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += ", ";
        out += parts[i];
    }
    out += ")";
    return out;
}

}  // namespace detail

inline FeatureVector normalize_row(const FeatureVector& raw,
                                   const std::vector<double>& mins,
                                   const std::vector<double>& maxs) {
    if (raw.size() != mins.size() || raw.size() != maxs.size())
        throw Error("dimension mismatch");
    FeatureVector out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double range = maxs[i] - mins[i];
        out[i] = range > 0.0 ? (raw[i] - mins[i]) / range : 0.0;
    }
    return out;
}

// Min-max scale every feature column to [0,1] over the retained rows.
// Constant columns map to 0.
inline void minmax_normalize(Dataset& ds) {
    if (ds.rows.empty() || ds.normalized)
        return;
    const std::size_t dim = ds.feature_names.size();
    std::vector<double> mins(dim, std::numeric_limits<double>::infinity());
    std::vector<double> maxs(dim, -std::numeric_limits<double>::infinity());
    for (const DataRow& r : ds.rows)
        for (std::size_t i = 0; i < dim; ++i) {
            mins[i] = std::min(mins[i], r.features[i]);
            maxs[i] = std::max(maxs[i], r.features[i]);
        }
    for (DataRow& r : ds.rows)
        r.features = normalize_row(r.features, mins, maxs);
    ds.feature_min = std::move(mins);
    ds.feature_max = std::move(maxs);
    ds.normalized = true;
}

inline void validate_spec_columns(const DatasetSpec& spec,
                                  const std::vector<std::string>& header) {
    std::set<std::string> seen;
    auto check = [&](const std::string& name) {
        detail::column_index(header, name);
        if (!seen.insert(name).second)
            throw Error("schema error: column '" + name + "' used more than once");
    };
    if (spec.category_columns.empty())
        throw Error("schema error: no category columns");
    if (spec.feature_columns.empty())
        throw Error("schema error: no feature columns");
    for (const auto& c : spec.category_columns)
        check(c);
    for (const auto& c : spec.feature_columns)
        check(c);
    if (spec.output_column)
        check(*spec.output_column);
    for (const auto& [col, table] : spec.encodings) {
        detail::column_index(header, col);
        std::set<double> values;
        for (const auto& [tok, val] : table)
            if (!values.insert(val).second)
                throw Error("encoding error: table for column '" + col +
                            "' maps two tokens to the same value");
    }
}

inline Dataset load_dataset(const DatasetSpec& spec) {
    CsvTable csv = read_csv(spec.path);
    validate_spec_columns(spec, csv.header);

    std::vector<std::size_t> cat_idx, feat_idx;
    for (const auto& c : spec.category_columns)
        cat_idx.push_back(detail::column_index(csv.header, c));
    for (const auto& c : spec.feature_columns)
        feat_idx.push_back(detail::column_index(csv.header, c));
    std::optional<std::size_t> out_idx;
    if (spec.output_column)
        out_idx = detail::column_index(csv.header, *spec.output_column);

    // value of one cell under the spec; nullopt = missing, throws on a
    // non-missing token the encoding table does not know
    auto cell_value = [&](const std::vector<std::string>& rec,
                          std::size_t idx) -> std::optional<double> {
        const std::string& raw = rec[idx];
        if (raw.empty())
            return std::nullopt;
        auto enc = spec.encodings.find(csv.header[idx]);
        if (enc != spec.encodings.end()) {
            auto it = enc->second.find(raw);
            if (it == enc->second.end())
                throw Error("encoding error: no encoding for token '" + raw +
                            "' in column '" + csv.header[idx] + "'");
            return it->second;
        }
        return detail::parse_number(raw);
    };

    Dataset ds;
    ds.source_header = csv.header;
    for (const auto& c : spec.feature_columns)
        ds.feature_names.push_back(c);
    if (spec.output_column)
        ds.output_name = *spec.output_column;

    std::set<std::string> category_set;
    for (const auto& rec : csv.records) {
        if (rec.size() != csv.header.size()) {
            ++ds.dropped_count;  // short or long record counts as incomplete
            continue;
        }
        bool missing = false;
        std::vector<std::string> cat_parts;
        for (std::size_t idx : cat_idx) {
            if (rec[idx].empty()) {
                missing = true;
                break;
            }
            cat_parts.push_back(rec[idx]);
        }
        FeatureVector features;
        if (!missing) {
            for (std::size_t idx : feat_idx) {
                auto v = cell_value(rec, idx);
                if (!v) {
                    missing = true;
                    break;
                }
                features.push_back(*v);
            }
        }
        std::optional<double> output;
        if (!missing && out_idx) {
            output = cell_value(rec, *out_idx);
            if (!output)
                missing = true;
        }
        if (missing) {
            ++ds.dropped_count;
            continue;
        }
        DataRow row;
        row.features = std::move(features);
        row.category = detail::category_token(cat_parts);
        row.output_value = output;
        row.row_id = static_cast<RowId>(ds.rows.size());
        category_set.insert(row.category);
        ds.raw_features.push_back(row.features);
        ds.rows.push_back(std::move(row));
        ds.source_records.push_back(rec);
    }
    ds.categories.assign(category_set.begin(), category_set.end());
    if (spec.normalize)
        minmax_normalize(ds);
    return ds;
}

}  // namespace cattree
