#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flowgru/adam.hpp"
#include "flowgru/dataset.hpp"

namespace flowgru {

// How to turn one raw CSV export into a labeled dataset. Parsed from a
// small INI-style file (see recipes/ for the shipped ones):
//
//   csv = ../data/flows.csv          # resolved relative to the recipe file
//   label_column = label
//   drop_columns = flow_id, ts       # optional
//   correlation_threshold = 0.5
//   scale = true
//
//   [labels]                         # class order fixes the encoding
//   Acceptable = Acceptable, Safe
//   Unsafe = Unsafe, Dangerous
//
//   [expected_counts]                # optional; mismatches only warn
//   Acceptable = 2629
struct DatasetRecipe {
    std::string csv_path;
    std::string label_column;
    std::vector<std::string> drop_columns;
    double correlation_threshold = 0.5;
    bool scale = true;
    // Class name -> raw label values mapped to it; order defines class ids.
    std::vector<std::pair<std::string, std::vector<std::string>>> label_mapping;
    std::vector<std::pair<std::string, std::size_t>> expected_counts;

    static DatasetRecipe parse_file(const std::string& path);
};

// Loads the recipe's CSV: drops the configured columns, keeps every
// attribute column whose cells all parse as finite numbers, and maps raw
// label values through the recipe's classes. Unknown raw labels are an
// error; expected-count mismatches print a warning to stderr and continue.
LabeledDataset load_raw_csv(const DatasetRecipe& recipe);

// Experiment settings: which recipe, which activations to face off, seeds,
// optimizer and architecture knobs. Also an INI-style file.
struct ExperimentConfig {
    std::string recipe_path;
    std::string dataset_name;  // defaults to the recipe file's stem
    std::vector<std::string> activations = {"mish", "relu"};
    std::vector<std::uint64_t> seeds = {1, 2, 3};

    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    AdamConfig adam;
    double test_fraction = 0.2;
    bool use_smote = true;
    std::size_t smote_k = 5;
    std::string out_dir = "out";
    std::string report_format = "table";  // table | csv | jsonl

    // Architecture.
    std::size_t conv_filters = 32;
    std::size_t conv_kernel = 3;
    std::size_t pool_size = 2;
    std::size_t gru_units = 64;
    std::size_t dense_units = 128;
    std::string head = "dense";    // dense | gap
    std::string output = "auto";   // auto | softmax | sigmoid
    double lrelu_alpha = 0.01;
    double elu_alpha = 1.0;
    double prelu_alpha = 0.25;

    static ExperimentConfig parse_file(const std::string& path);
};

// Joins a possibly-relative path onto the directory of a config file.
std::string resolve_relative(const std::string& base_file, const std::string& path);

}  // namespace flowgru
