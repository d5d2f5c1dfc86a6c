#include "flowgru/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "flowgru/csv.hpp"
#include "flowgru/errors.hpp"
#include "flowgru/rng.hpp"

namespace flowgru {

std::vector<std::size_t> LabeledDataset::class_histogram() const {
    std::vector<std::size_t> h(class_names.size(), 0);
    for (int l : labels) h.at(static_cast<std::size_t>(l)) += 1;
    return h;
}

void LabeledDataset::validate() const {
    if (n_features == 0 && !labels.empty()) throw DataError("dataset has no feature columns");
    if (features.size() != rows() * n_features) {
        throw DataError("dataset matrix size does not match row count");
    }
    if (feature_names.size() != n_features) {
        throw DataError("dataset feature name count does not match columns");
    }
    for (int l : labels) {
        if (l < 0 || static_cast<std::size_t>(l) >= class_names.size()) {
            throw DataError("dataset label out of range");
        }
    }
    for (double v : features) {
        if (!std::isfinite(v)) throw DataError("dataset contains a non-finite value");
    }
}

ScalerParams standard_scale(LabeledDataset& ds) {
    const std::size_t n = ds.rows();
    const std::size_t cols = ds.n_features;
    if (n < 2) throw DataError("standard scaling needs at least 2 rows");

    ScalerParams out;
    out.mean.assign(cols, 0.0);
    out.stddev.assign(cols, 0.0);
    out.degenerate.assign(cols, false);

    // Columns are independent.
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < cols; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += ds.features[i * cols + j];
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = ds.features[i * cols + j] - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));  // population
        out.mean[j] = mean;
        out.stddev[j] = sd;
        if (sd < 1e-12) {
            out.degenerate[j] = true;
            for (std::size_t i = 0; i < n; ++i) ds.features[i * cols + j] = 0.0;
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                ds.features[i * cols + j] = (ds.features[i * cols + j] - mean) / sd;
            }
        }
    }
    return out;
}

std::vector<double> pearson_with_label(const LabeledDataset& ds) {
    const std::size_t n = ds.rows();
    const std::size_t cols = ds.n_features;
    if (n == 0) throw DataError("correlation over an empty dataset");

    double ymean = 0.0;
    for (int l : ds.labels) ymean += static_cast<double>(l);
    ymean /= static_cast<double>(n);
    double yss = 0.0;
    for (int l : ds.labels) {
        const double d = static_cast<double>(l) - ymean;
        yss += d * d;
    }
    const double ysd = std::sqrt(yss / static_cast<double>(n));

    std::vector<double> r(cols, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < cols; ++j) {
        double xmean = 0.0;
        for (std::size_t i = 0; i < n; ++i) xmean += ds.features[i * cols + j];
        xmean /= static_cast<double>(n);
        double xss = 0.0, cross = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = ds.features[i * cols + j] - xmean;
            xss += dx * dx;
            cross += dx * (static_cast<double>(ds.labels[i]) - ymean);
        }
        const double xsd = std::sqrt(xss / static_cast<double>(n));
        // Either side constant -> correlation 0 by convention.
        r[j] = (xsd < 1e-12 || ysd < 1e-12)
                   ? 0.0
                   : cross / (static_cast<double>(n) * xsd * ysd);
    }
    return r;
}

LabeledDataset pearson_select(const LabeledDataset& ds, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw DataError("correlation threshold must be in [0, 1]");
    }
    const std::vector<double> r = pearson_with_label(ds);
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (std::abs(r[j]) > threshold) keep.push_back(j);
    }
    if (keep.empty()) {
        throw DataError("no feature exceeds the correlation threshold " +
                        std::to_string(threshold));
    }

    LabeledDataset out;
    out.n_features = keep.size();
    out.labels = ds.labels;
    out.class_names = ds.class_names;
    for (std::size_t j : keep) out.feature_names.push_back(ds.feature_names[j]);
    out.features.reserve(ds.rows() * keep.size());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j : keep) {
            out.features.push_back(ds.features[i * ds.n_features + j]);
        }
    }
    return out;
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw DataError("test fraction must be strictly between 0 and 1");
    }
    const auto hist = ds.class_histogram();
    for (std::size_t c = 0; c < hist.size(); ++c) {
        if (hist[c] < 2) {
            throw DataError("class '" + ds.class_names[c] +
                            "' has fewer than 2 rows; cannot split");
        }
    }

    SeededRng rng(seed);
    std::vector<char> in_test(ds.rows(), 0);
    for (std::size_t c = 0; c < hist.size(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (ds.labels[i] == static_cast<int>(c)) members.push_back(i);
        }
        rng.shuffle(members);
        std::size_t n_test = static_cast<std::size_t>(
            std::lround(test_fraction * static_cast<double>(members.size())));
        n_test = std::max<std::size_t>(1, n_test);
        n_test = std::min(n_test, members.size() - 1);  // keep >= 1 train row
        for (std::size_t i = 0; i < n_test; ++i) in_test[members[i]] = 1;
    }

    LabeledDataset train, test;
    for (LabeledDataset* part : {&train, &test}) {
        part->n_features = ds.n_features;
        part->class_names = ds.class_names;
        part->feature_names = ds.feature_names;
    }
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        (in_test[i] ? test : train).push_row(ds.row(i), ds.labels[i]);
    }
    return {std::move(train), std::move(test)};
}

LabeledDataset generate_synthetic(std::size_t n_per_class, std::size_t n_features,
                                  std::size_t k_classes, double separation,
                                  std::uint64_t seed) {
    if (n_per_class == 0 || n_features == 0 || k_classes == 0) {
        throw std::domain_error("synthetic data needs positive counts");
    }
    if (!std::isfinite(separation)) {
        throw std::domain_error("synthetic separation must be finite");
    }

    LabeledDataset ds;
    ds.n_features = n_features;
    for (std::size_t c = 0; c < k_classes; ++c) {
        ds.class_names.push_back("class" + std::to_string(c));
    }
    for (std::size_t j = 0; j < n_features; ++j) {
        ds.feature_names.push_back("f" + std::to_string(j));
    }

    SeededRng rng(seed);
    std::vector<double> row(n_features);
    for (std::size_t c = 0; c < k_classes; ++c) {
        const std::size_t hot = c % n_features;
        for (std::size_t i = 0; i < n_per_class; ++i) {
            for (std::size_t j = 0; j < n_features; ++j) {
                row[j] = rng.normal() + (j == hot ? separation : 0.0);
            }
            ds.push_row(row, static_cast<int>(c));
        }
    }
    return ds;
}

void write_csv(const LabeledDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    for (const auto& name : ds.feature_names) out << csv_quote(name) << ',';
    out << "label\n";
    char buf[64];
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j = 0; j < ds.n_features; ++j) {
            // Shortest form that reads back to the identical double.
            auto res = std::to_chars(buf, buf + sizeof buf,
                                     ds.features[i * ds.n_features + j]);
            out.write(buf, res.ptr - buf);
            out << ',';
        }
        out << csv_quote(ds.class_names[static_cast<std::size_t>(ds.labels[i])]) << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

LabeledDataset read_labeled_csv(const std::string& path,
                                const std::vector<std::string>& expected_classes) {
    CsvTable table = read_csv_file(path);
    if (table.header.empty()) throw DataError("'" + path + "' has no header row");

    std::size_t label_col = table.header.size();
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j] == "label") label_col = j;
    }
    if (label_col == table.header.size()) {
        throw DataError("'" + path + "' has no 'label' column");
    }

    LabeledDataset ds;
    ds.class_names = expected_classes;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j != label_col) ds.feature_names.push_back(table.header[j]);
    }
    ds.n_features = ds.feature_names.size();
    if (ds.n_features == 0) throw DataError("'" + path + "' has no feature columns");

    std::vector<double> row(ds.n_features);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& cells = table.rows[i];
        std::size_t k = 0;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j == label_col) continue;
            double v = 0.0;
            if (!parse_csv_number(cells[j], v)) {
                throw DataError("'" + path + "' row " + std::to_string(i + 2) + " column '" +
                                table.header[j] + "': cannot parse '" + cells[j] +
                                "' as a number");
            }
            row[k++] = v;
        }
        const std::string& name = cells[label_col];
        auto it = std::find(ds.class_names.begin(), ds.class_names.end(), name);
        int label;
        if (it == ds.class_names.end()) {
            if (!expected_classes.empty()) {
                throw DataError("'" + path + "' row " + std::to_string(i + 2) +
                                ": unknown class '" + name + "'");
            }
            label = static_cast<int>(ds.class_names.size());
            ds.class_names.push_back(name);
        } else {
            label = static_cast<int>(it - ds.class_names.begin());
        }
        ds.push_row(row, label);
    }
    ds.validate();
    return ds;
}

}  // namespace flowgru
