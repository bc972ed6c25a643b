#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cattree/commands.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string data_path;
    std::vector<std::string> category_columns;
    std::vector<std::string> feature_columns;
    std::string output_column;
    std::optional<bool> normalize;
    std::optional<double> target;
    std::optional<int> depth_cap;
    std::optional<std::size_t> min_branch_size;
    std::optional<int> max_iters;
    std::optional<std::size_t> min_changes;
    std::vector<std::string> report_columns;
    std::optional<bool> weighted_groups;
    std::optional<bool> sample_variance;
    std::string format;
    std::optional<std::uint64_t> seed;
};

void add_common_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "recipe file (key = value lines)");
    cmd->add_option("--data", o.data_path, "dataset csv path (overrides recipe)");
    cmd->add_option("--category-columns", o.category_columns,
                    "columns whose joined values form the category")
        ->delimiter(',');
    cmd->add_option("--feature-columns", o.feature_columns, "feature columns")
        ->delimiter(',');
    cmd->add_option("--output-column", o.output_column, "analysis column");
    cmd->add_option("--normalize", o.normalize, "min-max normalize features");
    cmd->add_option("--target", o.target, "classifier target value");
    cmd->add_option("--depth-cap", o.depth_cap, "maximum branch depth (1..64)");
    cmd->add_option("--min-branch-size", o.min_branch_size,
                    "smallest subset that may branch");
    cmd->add_option("--max-iters", o.max_iters, "recursive recluster passes (0..100)");
    cmd->add_option("--min-changes", o.min_changes,
                    "stop reclustering below this many moves");
    cmd->add_option("--columns", o.report_columns, "variance report columns")
        ->delimiter(',');
    cmd->add_option("--weighted-groups", o.weighted_groups,
                    "weight group variances by size");
    cmd->add_option("--sample-variance", o.sample_variance,
                    "sample variance instead of population");
    cmd->add_option("--format", o.format, "json or table");
    cmd->add_option("--seed", o.seed, "shuffle seed, 0 keeps input order");
}

cattree::RunConfig resolve_config(const CommonOpts& o) {
    cattree::RunConfig cfg;
    if (!o.config_path.empty())
        cfg = cattree::load_run_config(o.config_path);
    if (!o.data_path.empty())
        cfg.dataset.path = o.data_path;
    if (!o.category_columns.empty())
        cfg.dataset.category_columns = o.category_columns;
    if (!o.feature_columns.empty())
        cfg.dataset.feature_columns = o.feature_columns;
    if (!o.output_column.empty())
        cfg.dataset.output_column = o.output_column;
    if (o.normalize)
        cfg.dataset.normalize = *o.normalize;
    if (o.target)
        cfg.build.target = *o.target;
    if (o.depth_cap)
        cfg.build.depth_cap = *o.depth_cap;
    if (o.min_branch_size)
        cfg.build.min_branch_size = *o.min_branch_size;
    if (o.max_iters)
        cfg.max_iters = *o.max_iters;
    if (o.min_changes)
        cfg.min_changes = *o.min_changes;
    if (!o.report_columns.empty())
        cfg.report_columns = o.report_columns;
    if (o.weighted_groups)
        cfg.variance.weighted = *o.weighted_groups;
    if (o.sample_variance)
        cfg.variance.kind = *o.sample_variance ? cattree::VarianceKind::sample
                                               : cattree::VarianceKind::population;
    if (!o.format.empty())
        cfg.format = o.format;
    if (o.seed)
        cfg.seed = *o.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"category trees: exemplar clustering, reclustering and variance analysis"};
    app.require_subcommand(1);

    CommonOpts train_opts, recluster_opts, classify_opts, bench_opts;
    std::string train_out = "out", recluster_out;
    std::string model_path, input_path;
    double holdout = 0.0;

    CLI::App* train = app.add_subcommand("train", "fit a forest and save it");
    add_common_options(train, train_opts);
    train->add_option("--out", train_out, "output directory for forest.json");

    CLI::App* recluster =
        app.add_subcommand("recluster", "secondary clusters and variance report");
    add_common_options(recluster, recluster_opts);
    recluster->add_option("--out", recluster_out, "also write json/text outputs here");

    CLI::App* classify = app.add_subcommand("classify", "label rows from a csv");
    add_common_options(classify, classify_opts);
    classify->add_option("--model", model_path, "forest.json from a train run");
    classify->add_option("--input", input_path, "csv of rows to classify, - for stdin");

    CLI::App* bench = app.add_subcommand("bench", "accuracy and branch statistics");
    add_common_options(bench, bench_opts);
    bench->add_option("--holdout", holdout, "held-out fraction in [0, 1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed())
            return cattree::cmd_train(resolve_config(train_opts), train_out, std::cout,
                                      std::cerr);
        if (recluster->parsed())
            return cattree::cmd_recluster(resolve_config(recluster_opts), recluster_out,
                                          std::cout, std::cerr);
        if (classify->parsed()) {
            const cattree::RunConfig cfg = resolve_config(classify_opts);
            if (input_path.empty() || input_path == "-")
                return cattree::cmd_classify(cfg, model_path, std::cin, std::cout,
                                             std::cerr);
            std::ifstream in(input_path, std::ios::binary);
            if (!in) {
                std::cerr << "error: io error: cannot open " << input_path << "\n";
                return 1;
            }
            return cattree::cmd_classify(cfg, model_path, in, std::cout, std::cerr);
        }
        if (bench->parsed())
            return cattree::cmd_bench(resolve_config(bench_opts), holdout, std::cout,
                                      std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
