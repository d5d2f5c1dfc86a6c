#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flowgru/dataset.hpp"
#include "flowgru/metrics.hpp"
#include "flowgru/model.hpp"
#include "flowgru/recipe.hpp"
#include "flowgru/smote.hpp"
#include "flowgru/train.hpp"

namespace flowgru {

struct PrepareOptions {
    double test_fraction = 0.2;
    bool use_smote = true;
    std::size_t smote_k = 5;
    std::uint64_t seed = 42;
};

struct PreparedData {
    LabeledDataset train, test;
    ScalerParams scaler;
    std::vector<double> correlations;  // per raw numeric column, pre-selection
    std::vector<SyntheticSample> synthetics;
};

// The fixed preprocessing order: load raw CSV -> standard scale ->
// correlation-based feature selection -> stratified split -> SMOTE on the
// training side only. Each seeded stage draws from its own stream derived
// from opts.seed.
PreparedData prepare_data(const DatasetRecipe& recipe, const PrepareOptions& opts);

// The model architecture an experiment config asks for, bound to a dataset's
// width and class count.
ModelSpec build_spec(const ExperimentConfig& cfg, const std::string& activation,
                     std::size_t input_len, std::size_t n_classes);

struct RunResult {
    std::string activation;
    std::uint64_t seed = 0;
    ModelSpec spec;
    ModelParams params;
    std::vector<std::string> class_names, feature_names;
    std::vector<double> loss_trace;
    ConfusionMatrix cm;
    EvalReport report;
};

// Train one model on already-prepared data and score it on the test side.
RunResult train_eval(const ExperimentConfig& cfg, const std::string& activation,
                     std::uint64_t seed, const PreparedData& data);

// Full single run: prepare, train, evaluate, and persist the model file,
// the evaluation report and the loss trace into cfg.out_dir.
RunResult run_single(const ExperimentConfig& cfg, const std::string& activation,
                     std::uint64_t seed);

struct MetricQuad {
    double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
};

MetricQuad quad_of(const EvalReport& rep);

struct ActivationSummary {
    std::string activation;
    std::vector<std::uint64_t> seeds;
    std::vector<EvalReport> per_seed;
    MetricQuad mean;
};

struct ComparisonReport {
    std::string dataset_name;
    std::vector<std::uint64_t> seeds;
    std::vector<ActivationSummary> summaries;
    struct PairDiff {
        std::string a, b;   // labeled "a minus b"
        MetricQuad diff;
    };
    std::vector<PairDiff> pairs;
};

// Trains every activation in the config across every seed. The prepared
// data is computed once per seed and shared by all activations, so the
// comparison is apples to apples. Does not write files.
ComparisonReport compare(const ExperimentConfig& cfg,
                         std::vector<RunResult>* runs_out = nullptr);

// compare() plus persistence: per-run model/report/loss files and the
// comparison report, all under cfg.out_dir. Output bytes are deterministic
// for a fixed config.
ComparisonReport run_compare(const ExperimentConfig& cfg);

// Report writers. format is "csv", "table" or "jsonl"; every writer is
// deterministic byte for byte.
void write_eval_report(std::ostream& out, const EvalReport& rep,
                       const std::vector<std::string>& class_names,
                       const std::string& format);
void write_comparison_report(std::ostream& out, const ComparisonReport& rep,
                             const std::string& format);
void write_loss_trace(std::ostream& out, const std::vector<double>& trace);

}  // namespace flowgru
