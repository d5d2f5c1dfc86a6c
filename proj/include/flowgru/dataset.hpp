#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace flowgru {

// Row-major feature matrix with integer class labels. class_names gives the
// label encoding: labels[i] indexes into it.
struct LabeledDataset {
    std::size_t n_features = 0;
    std::vector<double> features;  // rows() x n_features
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;

    std::size_t rows() const { return labels.size(); }

    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * n_features, n_features};
    }

    std::vector<double> row_vec(std::size_t i) const {
        auto r = row(i);
        return {r.begin(), r.end()};
    }

    void push_row(std::span<const double> values, int label) {
        features.insert(features.end(), values.begin(), values.end());
        labels.push_back(label);
    }

    // Rows per class, indexed by class id.
    std::vector<std::size_t> class_histogram() const;

    // Checks the internal consistency (matrix size, label range, finite
    // values); throws DataError on violation.
    void validate() const;
};

// Per-column centering/spread parameters from standard scaling.
struct ScalerParams {
    std::vector<double> mean, stddev;
    std::vector<bool> degenerate;  // true where the column had ~zero spread
};

// In-place z-score normalization: (x - mean) / stddev per column, with the
// population standard deviation. A column with stddev below 1e-12 becomes
// all zeros and is flagged. Needs at least 2 rows.
ScalerParams standard_scale(LabeledDataset& ds);

// Keeps the columns whose absolute Pearson correlation with the
// integer-encoded label strictly exceeds the threshold. A zero-variance
// column correlates 0 by convention. Column order is preserved.
LabeledDataset pearson_select(const LabeledDataset& ds, double threshold);

// The correlation vector itself (one entry per column), exposed for tests.
std::vector<double> pearson_with_label(const LabeledDataset& ds);

// Seeded stratified split. Per class, round(fraction * n) rows go to test
// (at least 1, at most n-1), chosen by a per-class shuffle; row order within
// each side preserves the original order. Every class needs >= 2 rows.
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed);

// Gaussian blobs: k classes, unit variance, class c's mean is `separation`
// in feature (c mod n_features) and 0 elsewhere. Rows are emitted class by
// class, n_per_class each.
LabeledDataset generate_synthetic(std::size_t n_per_class, std::size_t n_features,
                                  std::size_t k_classes, double separation,
                                  std::uint64_t seed);

// CSV with a header row: feature columns first, then "label" holding class
// names. Values are written with enough digits to round-trip exactly.
void write_csv(const LabeledDataset& ds, const std::string& path);

// Reads a file written by write_csv (or shaped like one). When
// expected_classes is non-empty the label encoding follows it and unknown
// names are an error; otherwise classes are numbered in order of first
// appearance.
LabeledDataset read_labeled_csv(const std::string& path,
                                const std::vector<std::string>& expected_classes = {});

}  // namespace flowgru
