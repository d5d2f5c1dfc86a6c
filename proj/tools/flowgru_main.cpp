#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowgru/errors.hpp"
#include "flowgru/experiment.hpp"
#include "flowgru/model_io.hpp"
#include "flowgru/train.hpp"

namespace {

using namespace flowgru;

// Global flags shared by the subcommands; only values the user actually
// passed override the config file.
struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch_size;
    std::optional<double> lr;
    bool no_smote = false;
    std::optional<std::string> format;
};

void apply_overrides(ExperimentConfig& cfg, const GlobalOpts& g) {
    if (g.seed) cfg.seeds = {*g.seed};
    if (g.epochs) cfg.epochs = *g.epochs;
    if (g.batch_size) cfg.batch_size = *g.batch_size;
    if (g.lr) cfg.adam.lr = *g.lr;
    if (g.no_smote) cfg.use_smote = false;
    if (g.format) cfg.report_format = *g.format;
}

int cmd_prepare(const std::string& recipe_path, const std::string& out_dir,
                double test_fraction, const GlobalOpts& g) {
    const DatasetRecipe recipe = DatasetRecipe::parse_file(recipe_path);
    PrepareOptions opts;
    opts.test_fraction = test_fraction;
    opts.use_smote = !g.no_smote;
    if (g.seed) opts.seed = *g.seed;

    const PreparedData data = prepare_data(recipe, opts);
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    write_csv(data.train, (dir / "train.csv").string());
    write_csv(data.test, (dir / "test.csv").string());

    std::cout << "selected " << data.train.n_features << " features:";
    for (const auto& f : data.train.feature_names) std::cout << ' ' << f;
    std::cout << '\n';
    const auto train_hist = data.train.class_histogram();
    const auto test_hist = data.test.class_histogram();
    for (std::size_t c = 0; c < train_hist.size(); ++c) {
        std::cout << data.train.class_names[c] << ": " << train_hist[c] << " train, "
                  << test_hist[c] << " test\n";
    }
    std::cout << data.synthetics.size() << " synthetic rows added\n";
    std::cout << "wrote " << (dir / "train.csv").string() << " and "
              << (dir / "test.csv").string() << '\n';
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& activation,
              std::uint64_t seed, const GlobalOpts& g) {
    ExperimentConfig cfg = ExperimentConfig::parse_file(config_path);
    apply_overrides(cfg, g);
    const RunResult run = run_single(cfg, activation, seed);
    std::cout << "trained " << activation << " (seed " << seed << ") on "
              << cfg.dataset_name << "; final loss "
              << (run.loss_trace.empty() ? 0.0 : run.loss_trace.back()) << "\n\n";
    write_eval_report(std::cout, run.report, run.class_names, cfg.report_format);
    return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& data_path,
                 const GlobalOpts& g) {
    const LoadedModel model = load_model(model_path);
    const LabeledDataset ds = read_labeled_csv(data_path, model.class_names);
    const std::vector<int> pred = predict_labels(model.spec, model.params, ds);
    const EvalReport rep = evaluate(confusion(ds.labels, pred, model.spec.n_classes));
    write_eval_report(std::cout, rep, model.class_names, g.format.value_or("table"));
    return 0;
}

int cmd_compare(const std::string& config_path, const GlobalOpts& g) {
    ExperimentConfig cfg = ExperimentConfig::parse_file(config_path);
    apply_overrides(cfg, g);
    const ComparisonReport rep = run_compare(cfg);
    write_comparison_report(std::cout, rep, "table");
    std::cout << "\nreports written to " << cfg.out_dir << '\n';
    return 0;
}

int cmd_synth(std::size_t classes, std::size_t rows, double sep, std::size_t features,
              const std::string& out_path, const GlobalOpts& g) {
    const LabeledDataset ds =
        generate_synthetic(rows, features, classes, sep, g.seed.value_or(42));
    write_csv(ds, out_path);
    std::cout << "wrote " << ds.rows() << " rows (" << classes << " classes, " << features
              << " features) to " << out_path << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CNN-BiGRU intrusion-detection experiments"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Override the run seed(s)")->group("Global");
    app.add_option("--epochs", g.epochs, "Override training epochs")->group("Global");
    app.add_option("--batch-size", g.batch_size, "Override the batch size")->group("Global");
    app.add_option("--lr", g.lr, "Override the learning rate")->group("Global");
    app.add_flag("--no-smote", g.no_smote, "Skip minority oversampling")->group("Global");
    app.add_option("--format", g.format, "Report format")
        ->check(CLI::IsMember({"csv", "table", "jsonl"}))
        ->group("Global");
    app.fallthrough();

    std::string recipe_path, config_path, activation, model_path, data_path;
    std::string out_dir = "prepared";
    std::string synth_out = "synthetic.csv";
    double test_fraction = 0.2;
    std::size_t classes = 3, rows = 200, features = 8;
    double sep = 2.0;

    auto* prepare = app.add_subcommand("prepare", "Preprocess a raw CSV into train/test sets");
    prepare->add_option("--recipe", recipe_path, "Dataset recipe file")->required();
    prepare->add_option("--out", out_dir, "Output directory");
    prepare->add_option("--test-fraction", test_fraction, "Test split fraction");

    auto* train = app.add_subcommand("train", "Train one model and report its test metrics");
    train->add_option("--config", config_path, "Experiment config file")->required();
    train->add_option("--activation", activation, "Hidden activation")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on a prepared CSV");
    evaluate->add_option("--model", model_path, "Model file")->required();
    evaluate->add_option("--data", data_path, "Prepared CSV (write_csv layout)")->required();

    auto* compare = app.add_subcommand("compare", "Run the full activation comparison");
    compare->add_option("--config", config_path, "Experiment config file")->required();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic Gaussian-blob CSV");
    synth->add_option("--classes", classes, "Number of classes");
    synth->add_option("--rows", rows, "Rows per class");
    synth->add_option("--sep", sep, "Class separation");
    synth->add_option("--features", features, "Feature count");
    synth->add_option("--out", synth_out, "Output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // Usage problems exit 1; --help and --version exit 0.
        return code == 0 ? 0 : 1;
    }

    try {
        if (prepare->parsed()) return cmd_prepare(recipe_path, out_dir, test_fraction, g);
        if (train->parsed()) {
            return cmd_train(config_path, activation, g.seed.value_or(42), g);
        }
        if (evaluate->parsed()) return cmd_evaluate(model_path, data_path, g);
        if (compare->parsed()) return cmd_compare(config_path, g);
        if (synth->parsed()) return cmd_synth(classes, rows, sep, features, synth_out, g);
    } catch (const flowgru::TrainingDiverged& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const flowgru::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
