#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cattree/dataset.hpp"
#include "cattree/metrics.hpp"
#include "cattree/recluster.hpp"
#include "cattree/tree.hpp"

namespace cattree {

using json = nlohmann::json;

inline json node_to_json(const TreeNode& node) {
    json j;
    j["category"] = node.classifier.category;
    j["exemplar"] = node.classifier.exemplar;
    j["weights"] = node.classifier.weights;
    j["target"] = node.classifier.target;
    j["train_count"] = node.classifier.train_count;
    j["depth"] = node.depth;
    j["assigned_rows"] = node.assigned_rows;
    j["children"] = json::array();
    for (const TreeNode& c : node.children)
        j["children"].push_back(node_to_json(c));
    return j;
}

inline TreeNode node_from_json(const json& j) {
    TreeNode node;
    node.classifier.category = j.at("category").get<std::string>();
    node.classifier.exemplar = j.at("exemplar").get<FeatureVector>();
    node.classifier.weights = j.at("weights").get<FeatureVector>();
    node.classifier.target = j.at("target").get<double>();
    node.classifier.train_count = j.at("train_count").get<std::size_t>();
    node.depth = j.at("depth").get<int>();
    node.assigned_rows = j.at("assigned_rows").get<std::vector<RowId>>();
    for (const json& c : j.at("children"))
        node.children.push_back(node_from_json(c));
    return node;
}

// Everything needed to classify raw csv rows later: the forest plus the
// ingestion metadata (column names, encodings, normalization bounds).
struct Model {
    Forest forest;
    std::vector<std::string> feature_names;
    std::string output_name;
    std::map<std::string, EncodingTable> encodings;
    bool normalized = false;
    std::vector<double> feature_min, feature_max;
    std::vector<std::string> categories;
};

inline Model make_model(Forest forest, const Dataset& dataset, const DatasetSpec& spec) {
    Model m;
    m.forest = std::move(forest);
    m.feature_names = dataset.feature_names;
    m.output_name = dataset.output_name;
    m.encodings = spec.encodings;
    m.normalized = dataset.normalized;
    m.feature_min = dataset.feature_min;
    m.feature_max = dataset.feature_max;
    m.categories = dataset.categories;
    return m;
}

inline json model_to_json(const Model& m) {
    json j;
    j["format_version"] = 1;
    j["config"] = {{"target", m.forest.config.target},
                   {"depth_cap", m.forest.config.depth_cap},
                   {"min_branch_size", m.forest.config.min_branch_size}};
    j["feature_names"] = m.feature_names;
    j["output_column"] = m.output_name;
    j["categories"] = m.categories;
    j["normalized"] = m.normalized;
    j["feature_min"] = m.feature_min;
    j["feature_max"] = m.feature_max;
    json enc = json::object();
    for (const auto& [col, table] : m.encodings)
        enc[col] = table;
    j["encodings"] = enc;
    j["trees"] = json::array();
    for (const TreeNode& t : m.forest.trees)
        j["trees"].push_back(node_to_json(t));
    return j;
}

inline Model model_from_json(const json& j) {
    Model m;
    m.forest.config.target = j.at("config").at("target").get<double>();
    m.forest.config.depth_cap = j.at("config").at("depth_cap").get<int>();
    m.forest.config.min_branch_size = j.at("config").at("min_branch_size").get<std::size_t>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.output_name = j.at("output_column").get<std::string>();
    m.categories = j.at("categories").get<std::vector<std::string>>();
    m.normalized = j.at("normalized").get<bool>();
    m.feature_min = j.at("feature_min").get<std::vector<double>>();
    m.feature_max = j.at("feature_max").get<std::vector<double>>();
    for (const auto& [col, table] : j.at("encodings").items())
        m.encodings[col] = table.get<EncodingTable>();
    for (const json& t : j.at("trees"))
        m.forest.trees.push_back(node_from_json(t));
    return m;
}

inline json cluster_set_to_json(const ClusterSet& set) {
    json j;
    j["generation"] = set.generation;
    j["changes_from_previous"] = set.changes_from_previous;
    j["dropped_keys"] = set.dropped_keys;
    json clusters = json::object();
    for (const auto& [key, ids] : set.clusters)
        clusters[key] = ids;
    j["clusters"] = clusters;
    return j;
}

inline json report_to_json(const std::vector<VarianceReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) {
        json j;
        j["column"] = r.column_name;
        j["variance_before"] = r.variance_before;
        j["variance_after"] = r.variance_after;
        j["groups_before"] = r.groups_before;
        j["groups_after"] = r.groups_after;
        if (r.reduction_ratio)
            j["reduction_ratio"] = *r.reduction_ratio;
        arr.push_back(j);
    }
    return arr;
}

}  // namespace cattree
