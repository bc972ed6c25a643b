#pragma once

#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cattree/config.hpp"
#include "cattree/dataset.hpp"
#include "cattree/metrics.hpp"
#include "cattree/recluster.hpp"
#include "cattree/serialize.hpp"
#include "cattree/tree.hpp"

namespace cattree {

// Permute row order; row ids stay equal to the row's index.
inline void shuffle_dataset(Dataset& ds, std::uint64_t seed) {
    if (seed == 0)
        return;
    std::vector<std::size_t> perm(ds.rows.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    Dataset shuffled = ds;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled.rows[i] = ds.rows[perm[i]];
        shuffled.rows[i].row_id = static_cast<RowId>(i);
        shuffled.raw_features[i] = ds.raw_features[perm[i]];
        shuffled.source_records[i] = ds.source_records[perm[i]];
    }
    ds = std::move(shuffled);
}

inline Dataset subset_dataset(const Dataset& ds, std::span<const std::size_t> indices) {
    Dataset out;
    out.feature_names = ds.feature_names;
    out.output_name = ds.output_name;
    out.source_header = ds.source_header;
    out.dropped_count = 0;
    std::set<std::string> cats;
    for (std::size_t i : indices) {
        DataRow row = ds.rows[i];
        row.row_id = static_cast<RowId>(out.rows.size());
        cats.insert(row.category);
        out.raw_features.push_back(ds.raw_features[i]);
        out.source_records.push_back(ds.source_records[i]);
        out.rows.push_back(std::move(row));
    }
    out.categories.assign(cats.begin(), cats.end());
    return out;
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("io error: cannot write " + path.string());
    f << text;
}

inline json train_summary(const Dataset& ds, const Forest& forest) {
    std::size_t nodes = 0;
    int depth = 0;
    std::size_t branched = 0;
    json depths = json::object();
    for (const TreeNode& t : forest.trees) {
        nodes += node_count(t);
        depth = std::max(depth, max_depth(t));
        branched += t.children.empty() ? 0 : 1;
        depths[t.classifier.category] = max_depth(t);
    }
    json j;
    j["rows"] = ds.rows.size();
    j["dropped_rows"] = ds.dropped_count;
    j["categories"] = ds.categories.size();
    j["foreign_assignments"] = foreign_assignment_count(forest, ds);
    j["nodes"] = nodes;
    j["max_depth"] = depth;
    j["tree_depths"] = depths;
    j["branched_trees"] = branched;
    return j;
}

// clusters that hold rows but none from their own originating category,
// the effect the case study calls out
inline std::vector<std::string> clusters_without_own_rows(const ClusterSet& set,
                                                          const Dataset& ds) {
    std::vector<std::string> keys;
    for (const auto& [key, ids] : set.clusters) {
        if (ids.empty())
            continue;
        bool own = false;
        for (RowId id : ids)
            if (ds.rows[static_cast<std::size_t>(id)].category == key) {
                own = true;
                break;
            }
        if (!own)
            keys.push_back(key);
    }
    return keys;
}

inline std::vector<std::string> default_report_columns(const RunConfig& cfg,
                                                       const Dataset& ds) {
    if (!cfg.report_columns.empty())
        return cfg.report_columns;
    if (!ds.output_name.empty())
        return {ds.output_name};
    return ds.feature_names;
}

}  // namespace detail

// train: fit the forest, write forest.json + summary.json, print the summary
inline int cmd_train(const RunConfig& cfg, const std::filesystem::path& out_dir,
                     std::ostream& out, std::ostream& err) {
    try {
        validate_run_config(cfg);
        Dataset ds = load_dataset(cfg.dataset);
        shuffle_dataset(ds, cfg.seed);
        Forest forest = train_forest(ds, cfg.build);
        const json summary = detail::train_summary(ds, forest);
        const Model model = make_model(std::move(forest), ds, cfg.dataset);
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            detail::write_text_file(out_dir / "forest.json",
                                    model_to_json(model).dump(2) + "\n");
            detail::write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
        }
        if (cfg.format == "table") {
            for (const auto& [key, value] : summary.items())
                out << key << ": " << value << "\n";
        } else {
            out << summary.dump(2) << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

// recluster: secondary clusters, the recursive pass, cluster listing and the
// before/after variance report
inline int cmd_recluster(const RunConfig& cfg, const std::filesystem::path& out_dir,
                         std::ostream& out, std::ostream& err) {
    try {
        validate_run_config(cfg);
        Dataset ds = load_dataset(cfg.dataset);
        shuffle_dataset(ds, cfg.seed);
        Forest forest = train_forest(ds, cfg.build);
        const ClusterSet secondary = secondary_clusters(forest, ds);
        const ClusterSet final_clusters = recursive_recluster(
            secondary, ds, cfg.max_iters, cfg.min_changes, cfg.build.target);
        const ClusterSet before = category_grouping(ds);
        const auto columns = detail::default_report_columns(cfg, ds);
        const auto reports =
            build_variance_report(ds, before, final_clusters, columns, cfg.variance);

        json clusters_json = cluster_set_to_json(final_clusters);
        clusters_json["without_own_rows"] =
            detail::clusters_without_own_rows(final_clusters, ds);
        json report_json = report_to_json(reports);
        // whole-column information gain of the final split, per column
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const auto values = detail::column_values(ds, columns[i]);
            std::vector<std::vector<double>> subsets;
            for (const auto& [key, ids] : final_clusters.clusters) {
                std::vector<double> s;
                for (RowId id : ids)
                    s.push_back(values[static_cast<std::size_t>(id)]);
                subsets.push_back(std::move(s));
            }
            report_json[i]["information_gain"] =
                information_gain(values, subsets, cfg.weighted_gain);
        }
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            detail::write_text_file(out_dir / "clusters.json",
                                    clusters_json.dump(2) + "\n");
            detail::write_text_file(out_dir / "report.json", report_json.dump(2) + "\n");
            detail::write_text_file(out_dir / "clusters.txt",
                                    format_cluster_listing(final_clusters, ds));
        }
        if (cfg.format == "table") {
            out << format_cluster_listing(final_clusters, ds) << "\n";
            out << format_variance_table(reports);
            const auto orphaned = detail::clusters_without_own_rows(final_clusters, ds);
            if (!orphaned.empty()) {
                out << "\nClusters holding no rows of their own category:";
                for (const auto& key : orphaned)
                    out << " " << key;
                out << "\n";
            }
        } else {
            json j;
            j["clusters"] = clusters_json;
            j["report"] = report_json;
            out << j.dump(2) << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

namespace detail {

inline FeatureVector parse_input_row(const Model& model,
                                     const std::vector<std::string>& header,
                                     const std::vector<std::string>& rec) {
    std::vector<std::size_t> idx;
    for (const auto& name : model.feature_names)
        idx.push_back(column_index(header, name));
    FeatureVector raw;
    raw.reserve(idx.size());
    for (std::size_t i : idx) {
        if (i >= rec.size())
            throw Error("dimension mismatch");
        auto enc = model.encodings.find(header[i]);
        if (enc != model.encodings.end()) {
            auto it = enc->second.find(rec[i]);
            if (it == enc->second.end())
                throw Error("encoding error: no encoding for token '" + rec[i] +
                            "' in column '" + header[i] + "'");
            raw.push_back(it->second);
            continue;
        }
        auto v = parse_number(rec[i]);
        if (!v)
            throw Error("dimension mismatch: bad value '" + rec[i] + "' in column '" +
                        header[i] + "'");
        raw.push_back(*v);
    }
    return raw;
}

}  // namespace detail

// classify: one category per input csv row, input order preserved
inline int cmd_classify(const RunConfig& cfg, const std::filesystem::path& model_path,
                        std::istream& input, std::ostream& out, std::ostream& err) {
    try {
        Model model;
        if (!model_path.empty()) {
            std::ifstream f(model_path);
            if (!f)
                throw Error("io error: cannot open " + model_path.string());
            model = model_from_json(json::parse(f));
        } else {
            validate_run_config(cfg);
            Dataset ds = load_dataset(cfg.dataset);
            shuffle_dataset(ds, cfg.seed);
            model = make_model(train_forest(ds, cfg.build), ds, cfg.dataset);
        }
        if (model.forest.trees.empty())
            throw Error("untrained model");

        if (input.peek() == std::char_traits<char>::eof())
            return 0;  // empty input, empty output
        const CsvTable csv = read_csv(input);
        for (const auto& rec : csv.records) {
            FeatureVector raw = detail::parse_input_row(model, csv.header, rec);
            const FeatureVector features =
                model.normalized
                    ? normalize_row(raw, model.feature_min, model.feature_max)
                    : raw;
            out << classify(model.forest, features) << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

// bench: train-set accuracy, optional seeded hold-out split, branch stats
inline int cmd_bench(const RunConfig& cfg, double holdout, std::ostream& out,
                     std::ostream& err) {
    try {
        validate_run_config(cfg);
        if (holdout < 0.0 || holdout >= 1.0)
            throw Error("config error: holdout must be in [0, 1)");
        DatasetSpec raw_spec = cfg.dataset;
        raw_spec.normalize = false;
        Dataset full = load_dataset(raw_spec);
        shuffle_dataset(full, cfg.seed);
        if (full.rows.empty())
            throw Error("empty batch");

        const std::size_t n = full.rows.size();
        const auto n_test = static_cast<std::size_t>(holdout * static_cast<double>(n));
        std::vector<std::size_t> train_idx(n - n_test), test_idx(n_test);
        std::iota(train_idx.begin(), train_idx.end(), std::size_t{0});
        std::iota(test_idx.begin(), test_idx.end(), n - n_test);

        Dataset train = subset_dataset(full, train_idx);
        if (cfg.dataset.normalize)
            minmax_normalize(train);
        const Forest forest = train_forest(train, cfg.build);

        auto accuracy_on = [&](const Dataset& src, std::span<const std::size_t> idx) {
            std::size_t hits = 0;
            for (std::size_t i : idx) {
                FeatureVector features = src.raw_features[i];
                if (train.normalized)
                    features =
                        normalize_row(features, train.feature_min, train.feature_max);
                if (classify(forest, features) == src.rows[i].category)
                    ++hits;
            }
            return idx.empty() ? 0.0
                               : static_cast<double>(hits) /
                                     static_cast<double>(idx.size());
        };

        json j = detail::train_summary(train, forest);
        j["train_accuracy"] = accuracy_on(full, train_idx);
        if (n_test > 0) {
            j["holdout_rows"] = n_test;
            j["holdout_accuracy"] = accuracy_on(full, test_idx);
        }
        j["seed"] = cfg.seed;
        if (cfg.format == "table") {
            for (const auto& [key, value] : j.items())
                out << key << ": " << value << "\n";
        } else {
            out << j.dump(2) << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cattree
