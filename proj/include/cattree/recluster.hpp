#pragma once

#include <map>
#include <string>
#include <vector>

#include "cattree/core.hpp"
#include "cattree/dataset.hpp"
#include "cattree/tree.hpp"

namespace cattree {

// A partition of the dataset keyed by originating category. Keys survive
// reclustering even when a cluster no longer holds any of that category's
// rows; empty clusters may be retained under their key.
struct ClusterSet {
    std::map<std::string, std::vector<RowId>> clusters;
    int generation = 0;
    std::size_t changes_from_previous = 0;
    std::vector<std::string> dropped_keys;  // emptied out during reclustering
};

// Group rows by their labeled category (the "before" grouping of the
// variance comparisons).
inline ClusterSet category_grouping(const Dataset& dataset) {
    ClusterSet set;
    for (const std::string& c : dataset.categories)
        set.clusters[c];
    for (const DataRow& r : dataset.rows)
        set.clusters[r.category].push_back(r.row_id);
    return set;
}

// The per-tree row populations: each base tree's assigned set under its
// category key.
inline ClusterSet secondary_clusters(const Forest& forest, const Dataset& dataset) {
    if (forest.trees.empty())
        throw Error("untrained model");
    ClusterSet set;
    set.generation = 0;
    for (const TreeNode& tree : forest.trees)
        set.clusters[tree.classifier.category] = tree.assigned_rows;
    set.changes_from_previous = foreign_assignment_count(forest, dataset);
    return set;
}

// Repeatedly rebuild exemplars from the current clusters and re-assign every
// row by smallest error. Stops after max_iters passes or once fewer than
// min_changes rows move.
inline ClusterSet recursive_recluster(const ClusterSet& initial, const Dataset& dataset,
                                      int max_iters, std::size_t min_changes,
                                      double target = 1.0) {
    ClusterSet current = initial;
    for (int iter = 0; iter < max_iters; ++iter) {
        std::vector<CategoryClassifier> classifiers;
        for (const auto& [key, ids] : current.clusters) {
            if (ids.empty()) {
                current.dropped_keys.push_back(key);
                continue;
            }
            classifiers.push_back(
                make_classifier(key, detail::gather(dataset.rows, ids), target));
        }
        if (classifiers.empty())
            throw Error("degenerate clustering");
        for (const std::string& key : current.dropped_keys)
            current.clusters.erase(key);

        auto all = detail::gather(dataset.rows, [&] {
            std::vector<RowId> ids;
            ids.reserve(dataset.rows.size());
            for (const DataRow& r : dataset.rows)
                ids.push_back(r.row_id);
            return ids;
        }());
        const auto assignment = assign_rows(classifiers, all);

        ClusterSet next;
        next.generation = current.generation + 1;
        next.dropped_keys = current.dropped_keys;
        std::map<std::string, std::size_t> index_of;
        for (std::size_t k = 0; k < classifiers.size(); ++k) {
            next.clusters[classifiers[k].category] = assignment[k];
            index_of[classifiers[k].category] = k;
        }
        std::size_t moved = 0;
        for (const auto& [key, ids] : current.clusters) {
            for (RowId id : ids) {
                const auto& now = assignment[index_of[key]];
                if (!std::binary_search(now.begin(), now.end(), id))
                    ++moved;
            }
        }
        next.changes_from_previous = moved;
        current = std::move(next);
        if (moved < min_changes)
            break;
    }
    return current;
}

// Appendix-style plain listing: one header per cluster, member rows printed
// as their original csv records.
inline std::string format_cluster_listing(const ClusterSet& set, const Dataset& dataset) {
    std::string out;
    bool first = true;
    for (const auto& [key, ids] : set.clusters) {
        if (!first)
            out += "\n";
        out += "Rows clustered for " + key + "\n\n";
        if (first) {
            std::string header;
            for (std::size_t i = 0; i < dataset.source_header.size(); ++i) {
                if (i)
                    header += ", ";
                header += dataset.source_header[i];
            }
            out += header + "\n\n";
        }
        for (RowId id : ids)
            out += join_record(dataset.source_records[static_cast<std::size_t>(id)]) + "\n";
        first = false;
    }
    return out;
}

}  // namespace cattree
