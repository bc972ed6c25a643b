#pragma once

// Brute-force reference implementations the tests check the library
// against. These deliberately recompute everything from the definitions
// and share no code with the library internals.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cattree/core.hpp"
#include "cattree/dataset.hpp"
#include "cattree/tree.hpp"

namespace oracle {

inline double mean_sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

inline std::vector<double> componentwise_mean(const std::vector<cattree::FeatureVector>& rows) {
    std::vector<double> out;
    for (std::size_t i = 0; i < rows.front().size(); ++i) {
        std::vector<double> col;
        for (const auto& r : rows)
            col.push_back(r[i]);
        out.push_back(mean_sum(col));
    }
    return out;
}

inline double variance_two_pass(const std::vector<double>& v) {
    const double m = mean_sum(v);
    double ss = 0.0;
    for (double x : v)
        ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size());
}

// literal error definition: mean over components of |x*w - t| with
// w = t / max(e, eps)
inline double weighted_error(const cattree::FeatureVector& row,
                             const cattree::FeatureVector& exemplar, double target) {
    double s = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        const double w = target / std::max(exemplar[i], cattree::kEps);
        s += std::abs(row[i] * w - target);
    }
    return s / static_cast<double>(row.size());
}

// index of the winning exemplar, ties to the lexicographically smallest name
inline std::size_t nearest_index(const cattree::FeatureVector& row,
                                 const std::vector<cattree::FeatureVector>& exemplars,
                                 const std::vector<std::string>& names, double target) {
    std::size_t best = 0;
    double best_err = weighted_error(row, exemplars[0], target);
    for (std::size_t k = 1; k < exemplars.size(); ++k) {
        const double err = weighted_error(row, exemplars[k], target);
        if (err < best_err || (err == best_err && names[k] < names[best])) {
            best = k;
            best_err = err;
        }
    }
    return best;
}

inline std::map<std::string, std::vector<int>> group_by_category(
    const std::vector<cattree::DataRow>& rows) {
    std::map<std::string, std::vector<int>> groups;
    for (const auto& r : rows)
        groups[r.category].push_back(r.row_id);
    return groups;
}

// independent walk of a built tree: smallest error at each layer
inline std::string descend(const cattree::Forest& forest,
                           const cattree::FeatureVector& row) {
    auto pick = [&](const std::vector<cattree::TreeNode>& nodes) {
        const cattree::TreeNode* best = &nodes.front();
        double best_err = weighted_error(row, best->classifier.exemplar,
                                         best->classifier.target);
        for (const auto& n : nodes) {
            const double err =
                weighted_error(row, n.classifier.exemplar, n.classifier.target);
            if (err < best_err ||
                (err == best_err &&
                 n.classifier.category < best->classifier.category)) {
                best = &n;
                best_err = err;
            }
        }
        return best;
    };
    const cattree::TreeNode* node = pick(forest.trees);
    while (!node->children.empty())
        node = pick(node->children);
    return node->classifier.category;
}

// one Lloyd-style pass: means from the current groups, then re-assign all
// rows by the weighted error
inline std::map<std::string, std::vector<int>> recluster_pass(
    const std::map<std::string, std::vector<int>>& groups,
    const std::vector<cattree::DataRow>& rows, double target) {
    std::vector<std::string> keys;
    std::vector<cattree::FeatureVector> exemplars;
    for (const auto& [key, ids] : groups) {
        if (ids.empty())
            continue;
        std::vector<cattree::FeatureVector> members;
        for (int id : ids)
            members.push_back(rows[static_cast<std::size_t>(id)].features);
        keys.push_back(key);
        exemplars.push_back(componentwise_mean(members));
    }
    std::map<std::string, std::vector<int>> next;
    for (const auto& k : keys)
        next[k];
    for (const auto& r : rows)
        next[keys[nearest_index(r.features, exemplars, keys, target)]].push_back(r.row_id);
    return next;
}

// ---- random instance helpers -------------------------------------------

inline cattree::Dataset random_dataset(std::mt19937_64& rng, std::size_t n_rows,
                                       std::size_t dim, std::size_t n_cats,
                                       double lo = 0.05, double hi = 1.0) {
    std::uniform_real_distribution<double> value(lo, hi);
    std::uniform_int_distribution<std::size_t> cat(0, n_cats - 1);
    cattree::Dataset ds;
    std::set<std::string> cats;
    for (std::size_t i = 0; i < n_rows; ++i) {
        cattree::DataRow row;
        row.row_id = static_cast<int>(i);
        // every category appears at least once
        const std::size_t c = i < n_cats ? i : cat(rng);
        row.category = "cat" + std::to_string(c);
        for (std::size_t d = 0; d < dim; ++d)
            row.features.push_back(value(rng));
        cats.insert(row.category);
        ds.raw_features.push_back(row.features);
        ds.rows.push_back(std::move(row));
    }
    ds.categories.assign(cats.begin(), cats.end());
    for (std::size_t d = 0; d < dim; ++d)
        ds.feature_names.push_back("f" + std::to_string(d));
    return ds;
}

// two tight, well separated blobs labelled A and B
inline cattree::Dataset two_blob_dataset(std::mt19937_64& rng, std::size_t per_blob) {
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    cattree::Dataset ds;
    for (std::size_t i = 0; i < 2 * per_blob; ++i) {
        const bool first = i < per_blob;
        cattree::DataRow row;
        row.row_id = static_cast<int>(i);
        row.category = first ? "A" : "B";
        const double cx = first ? 0.2 : 0.8;
        const double cy = first ? 0.25 : 0.75;
        row.features = {cx + jitter(rng), cy + jitter(rng)};
        ds.raw_features.push_back(row.features);
        ds.rows.push_back(std::move(row));
    }
    ds.categories = {"A", "B"};
    ds.feature_names = {"x", "y"};
    return ds;
}

}  // namespace oracle
