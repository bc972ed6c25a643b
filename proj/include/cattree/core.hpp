#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cattree {

// Divisor floor for degenerate exemplar components. With min-max scaled
// inputs only constant-zero columns hit it.
inline constexpr double kEps = 1e-9;

using FeatureVector = std::vector<double>;
using RowId = int;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DataRow {
    FeatureVector features;
    std::string category;
    std::optional<double> output_value;
    RowId row_id = 0;
};

// One classifier per category: exemplar is the mean of its training batch,
// weights map the exemplar onto the target component-wise.
struct CategoryClassifier {
    std::string category;
    FeatureVector exemplar;
    FeatureVector weights;
    double target = 1.0;
    std::size_t train_count = 0;
};

inline FeatureVector compute_exemplar(std::span<const DataRow* const> rows) {
    if (rows.empty())
        throw Error("empty batch");
    const std::size_t dim = rows.front()->features.size();
    FeatureVector mean(dim, 0.0);
    std::size_t n = 0;
    for (const DataRow* row : rows) {
        if (row->features.size() != dim)
            throw Error("ragged rows");
        ++n;
        // running mean: exact for repeated identical rows
        for (std::size_t i = 0; i < dim; ++i)
            mean[i] += (row->features[i] - mean[i]) / static_cast<double>(n);
    }
    return mean;
}

inline FeatureVector compute_exemplar(std::span<const DataRow> rows) {
    std::vector<const DataRow*> ptrs;
    ptrs.reserve(rows.size());
    for (const DataRow& r : rows)
        ptrs.push_back(&r);
    return compute_exemplar(ptrs);
}

inline FeatureVector compute_weights(const FeatureVector& exemplar, double target) {
    if (!(target > 0.0))
        throw Error("invalid target");
    FeatureVector weights(exemplar.size());
    for (std::size_t i = 0; i < exemplar.size(); ++i)
        weights[i] = target / std::max(exemplar[i], kEps);
    return weights;
}

// Mean absolute deviation of the weighted row from the target. For
// non-degenerate components this is evaluated as w*|x - e|, which is the
// same quantity but exactly zero when the row equals the exemplar.
inline double row_error(const FeatureVector& row, const CategoryClassifier& c) {
    if (row.size() != c.exemplar.size())
        throw Error("dimension mismatch");
    if (row.empty())
        return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (c.exemplar[i] >= kEps)
            sum += c.weights[i] * std::abs(row[i] - c.exemplar[i]);
        else
            sum += std::abs(row[i] * c.weights[i] - c.target);
    }
    return sum / static_cast<double>(row.size());
}

inline CategoryClassifier make_classifier(std::string category,
                                          std::span<const DataRow* const> rows,
                                          double target) {
    CategoryClassifier c;
    c.category = std::move(category);
    c.exemplar = compute_exemplar(rows);
    c.weights = compute_weights(c.exemplar, target);
    c.target = target;
    c.train_count = rows.size();
    return c;
}

}  // namespace cattree
