#pragma once

#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cattree/core.hpp"
#include "cattree/dataset.hpp"
#include "cattree/recluster.hpp"

namespace cattree {

enum class VarianceKind { population, sample };

// Population variance by default (divide by N), so singleton groups are
// well-defined and contribute zero.
inline double variance(std::span<const double> values,
                       VarianceKind kind = VarianceKind::population) {
    if (values.empty())
        throw Error("empty group");
    const std::size_t n = values.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        mean += (values[i] - mean) / static_cast<double>(i + 1);
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    if (kind == VarianceKind::sample)
        return n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    return ss / static_cast<double>(n);
}

struct GroupedVarianceOptions {
    bool weighted = false;  // weight group variances by group size
    VarianceKind kind = VarianceKind::population;
};

// Average of the per-group variances over non-empty groups; unweighted by
// default, matching a per-classifier reading of "average variance".
inline double grouped_variance(const std::vector<std::vector<double>>& groups,
                               const GroupedVarianceOptions& opts = {}) {
    double sum = 0.0;
    double weight_sum = 0.0;
    for (const auto& g : groups) {
        if (g.empty())
            continue;
        const double w = opts.weighted ? static_cast<double>(g.size()) : 1.0;
        sum += w * variance(g, opts.kind);
        weight_sum += w;
    }
    if (weight_sum == 0.0)
        throw Error("degenerate clustering");
    return sum / weight_sum;
}

// Variance drop from splitting a value set into subsets. The plain form
// subtracts the unweighted sum of subset variances; the weighted form is
// the classical within-group decomposition.
inline double information_gain(std::span<const double> parent,
                               const std::vector<std::vector<double>>& subsets,
                               bool weighted = false) {
    const double parent_var = variance(parent);
    double sum = 0.0;
    for (const auto& s : subsets) {
        if (s.empty())
            continue;
        const double w =
            weighted ? static_cast<double>(s.size()) / static_cast<double>(parent.size())
                     : 1.0;
        sum += w * variance(s);
    }
    return parent_var - sum;
}

struct VarianceReport {
    std::string column_name;
    double variance_before = 0.0;
    double variance_after = 0.0;
    std::size_t groups_before = 0;
    std::size_t groups_after = 0;
    std::optional<double> reduction_ratio;  // after/before, absent when before == 0
};

namespace detail {

// report columns are read on the raw scale; the output column uses its
// encoded values
inline std::vector<double> column_values(const Dataset& ds, const std::string& column) {
    std::vector<double> out;
    out.reserve(ds.rows.size());
    if (!ds.output_name.empty() && column == ds.output_name) {
        for (const DataRow& r : ds.rows)
            out.push_back(r.output_value.value());
        return out;
    }
    for (std::size_t i = 0; i < ds.feature_names.size(); ++i)
        if (ds.feature_names[i] == column) {
            for (const auto& raw : ds.raw_features)
                out.push_back(raw[i]);
            return out;
        }
    throw Error("schema error: unknown report column '" + column + "'");
}

inline std::vector<std::vector<double>> split_by_clusters(
    const std::vector<double>& values, const ClusterSet& set) {
    std::vector<std::vector<double>> groups;
    groups.reserve(set.clusters.size());
    for (const auto& [key, ids] : set.clusters) {
        std::vector<double> g;
        g.reserve(ids.size());
        for (RowId id : ids)
            g.push_back(values[static_cast<std::size_t>(id)]);
        groups.push_back(std::move(g));
    }
    return groups;
}

inline std::size_t non_empty_count(const ClusterSet& set) {
    std::size_t n = 0;
    for (const auto& [key, ids] : set.clusters)
        n += ids.empty() ? 0 : 1;
    return n;
}

}  // namespace detail

inline std::vector<VarianceReport> build_variance_report(
    const Dataset& dataset, const ClusterSet& before, const ClusterSet& after,
    const std::vector<std::string>& columns, const GroupedVarianceOptions& opts = {}) {
    std::vector<VarianceReport> reports;
    reports.reserve(columns.size());
    for (const std::string& column : columns) {
        const auto values = detail::column_values(dataset, column);
        VarianceReport rep;
        rep.column_name = column;
        rep.variance_before =
            grouped_variance(detail::split_by_clusters(values, before), opts);
        rep.variance_after =
            grouped_variance(detail::split_by_clusters(values, after), opts);
        rep.groups_before = detail::non_empty_count(before);
        rep.groups_after = detail::non_empty_count(after);
        if (rep.variance_before > 0.0)
            rep.reduction_ratio = rep.variance_after / rep.variance_before;
        reports.push_back(std::move(rep));
    }
    return reports;
}

// Aligned two-row table in the style the case studies report.
inline std::string format_variance_table(const std::vector<VarianceReport>& reports) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    const std::string label_before = "Variance Before";
    const std::string label_after = "Variance After";
    std::vector<std::size_t> widths;
    for (const auto& r : reports) {
        std::size_t w = r.column_name.size();
        w = std::max(w, fmt(r.variance_before).size());
        w = std::max(w, fmt(r.variance_after).size());
        widths.push_back(w);
    }
    std::string out(label_before.size(), ' ');
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out += "  ";
        out += std::string(widths[i] - reports[i].column_name.size(), ' ');
        out += reports[i].column_name;
    }
    out += "\n" + label_before;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto s = fmt(reports[i].variance_before);
        out += "  " + std::string(widths[i] - s.size(), ' ') + s;
    }
    out += "\n" + label_after +
           std::string(label_before.size() - label_after.size(), ' ');
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto s = fmt(reports[i].variance_after);
        out += "  " + std::string(widths[i] - s.size(), ' ') + s;
    }
    out += "\n";
    return out;
}

}  // namespace cattree
