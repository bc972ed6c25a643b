#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cattree/core.hpp"
#include "cattree/dataset.hpp"

namespace cattree {

struct BuildConfig {
    double target = 1.0;
    int depth_cap = 10;
    std::size_t min_branch_size = 2;
};

struct TreeNode {
    CategoryClassifier classifier;
    std::vector<RowId> assigned_rows;  // rows that chose this node at its layer
    std::vector<TreeNode> children;
    int depth = 0;
};

struct Forest {
    std::vector<TreeNode> trees;  // one per base category, sorted by category
    BuildConfig config;
};

namespace detail {

inline std::vector<const DataRow*> gather(const std::vector<DataRow>& rows,
                                          std::span<const RowId> ids) {
    std::vector<const DataRow*> out;
    out.reserve(ids.size());
    for (RowId id : ids)
        out.push_back(&rows[static_cast<std::size_t>(id)]);
    return out;
}

// categories present in a row subset, sorted
inline std::vector<std::string> categories_of(std::span<const DataRow* const> rows) {
    std::vector<std::string> cats;
    for (const DataRow* r : rows)
        cats.push_back(r->category);
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    return cats;
}

}  // namespace detail

// One classifier per category over its own rows. Classifiers come out
// sorted by category so that index order is the tie-break order.
inline std::vector<CategoryClassifier> train_base_layer(const Dataset& dataset,
                                                        const BuildConfig& config) {
    if (dataset.rows.empty())
        throw Error("empty batch");
    std::map<std::string, std::vector<const DataRow*>> batches;
    for (const DataRow& r : dataset.rows)
        batches[r.category].push_back(&r);
    std::vector<CategoryClassifier> classifiers;
    classifiers.reserve(batches.size());
    for (const auto& [category, rows] : batches)
        classifiers.push_back(make_classifier(category, rows, config.target));
    return classifiers;
}

// Every row goes to the classifier with the smallest error; equal errors
// break toward the lowest category identifier.
inline std::vector<std::vector<RowId>> assign_rows(
    std::span<const CategoryClassifier> classifiers,
    std::span<const DataRow* const> rows) {
    if (classifiers.empty())
        throw Error("empty batch");
    std::vector<std::vector<RowId>> assigned(classifiers.size());
    for (const DataRow* row : rows) {
        std::size_t best = 0;
        double best_err = row_error(row->features, classifiers[0]);
        for (std::size_t k = 1; k < classifiers.size(); ++k) {
            const double err = row_error(row->features, classifiers[k]);
            if (err < best_err ||
                (err == best_err &&
                 classifiers[k].category < classifiers[best].category)) {
                best = k;
                best_err = err;
            }
        }
        assigned[best].push_back(row->row_id);
    }
    return assigned;
}

// Recursive branch construction under one classifier. `assigned` are the
// rows this node won at its layer.
inline TreeNode build_tree(const CategoryClassifier& base,
                           std::span<const DataRow* const> assigned,
                           const Dataset& dataset, const BuildConfig& config,
                           int depth = 0) {
    TreeNode node;
    node.classifier = base;
    node.depth = depth;
    node.assigned_rows.reserve(assigned.size());
    for (const DataRow* r : assigned)
        node.assigned_rows.push_back(r->row_id);

    const auto cats = detail::categories_of(assigned);
    if (cats.size() < 2 || depth >= config.depth_cap ||
        assigned.size() < config.min_branch_size)
        return node;

    // one child classifier per category present, trained on that
    // category's share of the assigned rows
    std::vector<CategoryClassifier> child_classifiers;
    child_classifiers.reserve(cats.size());
    for (const auto& cat : cats) {
        std::vector<const DataRow*> batch;
        for (const DataRow* r : assigned)
            if (r->category == cat)
                batch.push_back(r);
        child_classifiers.push_back(make_classifier(cat, batch, config.target));
    }

    const auto child_assignment = assign_rows(child_classifiers, assigned);
    for (std::size_t k = 0; k < child_classifiers.size(); ++k) {
        const auto subset = detail::gather(dataset.rows, child_assignment[k]);
        if (subset.size() == assigned.size()) {
            // nothing moved: the child repeats this node's population, so
            // recursing would never terminate
            TreeNode child;
            child.classifier = child_classifiers[k];
            child.depth = depth + 1;
            child.assigned_rows = child_assignment[k];
            node.children.push_back(std::move(child));
        } else {
            node.children.push_back(build_tree(child_classifiers[k], subset,
                                               dataset, config, depth + 1));
        }
    }
    return node;
}

inline Forest train_forest(const Dataset& dataset, const BuildConfig& config) {
    Forest forest;
    forest.config = config;
    const auto classifiers = train_base_layer(dataset, config);
    auto all = detail::gather(dataset.rows, [&] {
        std::vector<RowId> ids;
        ids.reserve(dataset.rows.size());
        for (const DataRow& r : dataset.rows)
            ids.push_back(r.row_id);
        return ids;
    }());
    const auto base_assignment = assign_rows(classifiers, all);
    forest.trees.reserve(classifiers.size());
    for (std::size_t k = 0; k < classifiers.size(); ++k) {
        const auto subset = detail::gather(dataset.rows, base_assignment[k]);
        forest.trees.push_back(
            build_tree(classifiers[k], subset, dataset, config, 0));
    }
    return forest;
}

// Descend by smallest error: base layer picks the tree, then each branch
// layer picks a child, until a leaf declares the category.
inline std::string classify(const Forest& forest, const FeatureVector& row) {
    if (forest.trees.empty())
        throw Error("untrained model");
    const TreeNode* node = nullptr;
    double best_err = 0.0;
    for (const TreeNode& tree : forest.trees) {
        const double err = row_error(row, tree.classifier);
        if (!node || err < best_err ||
            (err == best_err &&
             tree.classifier.category < node->classifier.category)) {
            node = &tree;
            best_err = err;
        }
    }
    while (!node->children.empty()) {
        const TreeNode* next = nullptr;
        best_err = 0.0;
        for (const TreeNode& child : node->children) {
            const double err = row_error(row, child.classifier);
            if (!next || err < best_err ||
                (err == best_err &&
                 child.classifier.category < next->classifier.category)) {
                next = &child;
                best_err = err;
            }
        }
        node = next;
    }
    return node->classifier.category;
}

// base-layer rows whose tree is not their own category
inline std::size_t foreign_assignment_count(const Forest& forest,
                                            const Dataset& dataset) {
    std::size_t count = 0;
    for (const TreeNode& tree : forest.trees)
        for (RowId id : tree.assigned_rows)
            if (dataset.rows[static_cast<std::size_t>(id)].category !=
                tree.classifier.category)
                ++count;
    return count;
}

inline std::size_t node_count(const TreeNode& node) {
    std::size_t n = 1;
    for (const TreeNode& c : node.children)
        n += node_count(c);
    return n;
}

inline int max_depth(const TreeNode& node) {
    int d = node.depth;
    for (const TreeNode& c : node.children)
        d = std::max(d, max_depth(c));
    return d;
}

}  // namespace cattree
