#include <doctest.h>

#include <flowgru/errors.hpp>
#include <flowgru/experiment.hpp>
#include <flowgru/model_io.hpp>
#include <flowgru/recipe.hpp>
#include <flowgru/train.hpp>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace flowgru;
namespace fs = std::filesystem;

namespace {

const std::string kRecipeDir = FLOWGRU_RECIPE_DIR;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

// Temp dataset + recipe + config for a separable three-class problem.
struct SyntheticSetup {
    TempDir dir;
    ExperimentConfig cfg;

    SyntheticSetup() : dir("flowgru_exp_synth") {
        auto ds = generate_synthetic(40, 8, 3, 6.0, 1234);
        write_csv(ds, dir.file("blobs.csv"));
        write_file(dir.file("blobs.recipe"),
                   "csv = blobs.csv\n"
                   "label_column = label\n"
                   "correlation_threshold = 0\n"
                   "scale = true\n"
                   "\n"
                   "[labels]\n"
                   "class0 =\n"
                   "class1 =\n"
                   "class2 =\n");
        cfg.recipe_path = dir.file("blobs.recipe");
        cfg.dataset_name = "blobs";
        cfg.activations = {"mish", "relu"};
        cfg.seeds = {1, 2};
        cfg.epochs = 6;
        cfg.batch_size = 16;
        cfg.adam.lr = 0.003;
        cfg.test_fraction = 0.2;
        cfg.use_smote = false;
        cfg.out_dir = dir.file("out");
        cfg.conv_filters = 4;
        cfg.conv_kernel = 3;
        cfg.pool_size = 2;
        cfg.gru_units = 4;
        cfg.dense_units = 8;
    }
};

}  // namespace

TEST_CASE("relative paths resolve against the config file") {
    CHECK(resolve_relative("/a/b/conf.ini", "data.csv") == "/a/b/data.csv");
    CHECK(resolve_relative("/a/b/conf.ini", "../up.csv") == "/a/b/../up.csv");
    CHECK(resolve_relative("/a/b/conf.ini", "/abs/p.csv") == "/abs/p.csv");
}

TEST_CASE("the shipped sample recipe parses") {
    auto recipe = DatasetRecipe::parse_file(kRecipeDir + "/hogzilla_sample.recipe");
    CHECK(recipe.label_column == "verdict");
    CHECK(recipe.drop_columns == std::vector<std::string>{"flow_id"});
    CHECK(recipe.correlation_threshold == 0.5);
    CHECK(recipe.scale);
    CHECK(fs::exists(recipe.csv_path));

    REQUIRE(recipe.label_mapping.size() == 3);
    CHECK(recipe.label_mapping[0].first == "Acceptable");
    CHECK(recipe.label_mapping[0].second ==
          std::vector<std::string>{"Acceptable", "Safe"});
    CHECK(recipe.label_mapping[1].first == "Unrated");
    CHECK(recipe.label_mapping[2].first == "Unsafe");

    REQUIRE(recipe.expected_counts.size() == 3);
    CHECK(recipe.expected_counts[1] ==
          std::pair<std::string, std::size_t>{"Unrated", 80});
}

TEST_CASE("recipe validation") {
    TempDir dir("flowgru_recipe_bad");
    write_file(dir.file("no_csv.recipe"),
               "label_column = y\n[labels]\na =\n");
    CHECK_THROWS_AS(DatasetRecipe::parse_file(dir.file("no_csv.recipe")), DataError);

    write_file(dir.file("unknown.recipe"),
               "csv = x.csv\nlabel_column = y\nsurprise = 1\n[labels]\na =\n");
    CHECK_THROWS_AS(DatasetRecipe::parse_file(dir.file("unknown.recipe")), DataError);

    write_file(dir.file("no_labels.recipe"), "csv = x.csv\nlabel_column = y\n");
    CHECK_THROWS_AS(DatasetRecipe::parse_file(dir.file("no_labels.recipe")), DataError);

    write_file(dir.file("bad_thresh.recipe"),
               "csv = x.csv\nlabel_column = y\ncorrelation_threshold = 2\n[labels]\na =\n");
    CHECK_THROWS_AS(DatasetRecipe::parse_file(dir.file("bad_thresh.recipe")), DataError);

    write_file(dir.file("not_ini.recipe"),
               "csv = x.csv\nlabel_column = y\njust some words\n[labels]\na =\n");
    CHECK_THROWS_AS(DatasetRecipe::parse_file(dir.file("not_ini.recipe")), DataError);

    CHECK_THROWS_AS(DatasetRecipe::parse_file(dir.file("missing.recipe")), DataError);
}

TEST_CASE("loading the sample keeps numeric columns and maps labels") {
    auto recipe = DatasetRecipe::parse_file(kRecipeDir + "/hogzilla_sample.recipe");
    auto ds = load_raw_csv(recipe);
    CHECK(ds.rows() == 200);
    // flow_id is dropped by the recipe; proto and verdict are not numeric.
    CHECK(ds.feature_names ==
          std::vector<std::string>{"bytes_in", "bytes_out", "pkts_in",
                                   "duration_ms", "avg_pkt_len", "flow_rate",
                                   "iat_mean", "entropy", "ttl_const",
                                   "syn_ratio", "jitter"});
    CHECK(ds.class_names ==
          std::vector<std::string>{"Acceptable", "Unrated", "Unsafe"});
    CHECK(ds.class_histogram() == std::vector<std::size_t>{60, 80, 60});
}

TEST_CASE("unknown raw labels are fatal") {
    TempDir dir("flowgru_badlabel");
    write_file(dir.file("d.csv"), "x,label\n1,alpha\n2,beta\n");
    write_file(dir.file("d.recipe"),
               "csv = d.csv\nlabel_column = label\n[labels]\nalpha =\n");
    auto recipe = DatasetRecipe::parse_file(dir.file("d.recipe"));
    CHECK_THROWS_AS(load_raw_csv(recipe), DataError);
    try {
        load_raw_csv(recipe);
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("beta") != std::string::npos);
        CHECK(msg.find("row 3") != std::string::npos);
    }
}

TEST_CASE("a csv with no numeric attributes is rejected") {
    TempDir dir("flowgru_nonum");
    write_file(dir.file("d.csv"), "name,label\nfoo,a\nbar,a\n");
    write_file(dir.file("d.recipe"),
               "csv = d.csv\nlabel_column = label\n[labels]\na =\n");
    CHECK_THROWS_AS(load_raw_csv(DatasetRecipe::parse_file(dir.file("d.recipe"))),
                    DataError);
}

TEST_CASE("the preparation pipeline runs scale, select, split, smote in order") {
    auto recipe = DatasetRecipe::parse_file(kRecipeDir + "/hogzilla_sample.recipe");
    PrepareOptions opts;
    opts.seed = 42;
    auto prep = prepare_data(recipe, opts);

    // One correlation per raw numeric column, computed after scaling.
    CHECK(prep.correlations.size() == 11);
    // Only the engineered strong columns beat the 0.5 cut; the constant
    // column was flagged degenerate by the scaler and correlates 0.
    CHECK(prep.train.feature_names ==
          std::vector<std::string>{"bytes_in", "bytes_out", "avg_pkt_len",
                                   "flow_rate", "entropy", "syn_ratio"});
    CHECK(prep.test.feature_names == prep.train.feature_names);
    int degenerate = 0;
    for (bool d : prep.scaler.degenerate) degenerate += d ? 1 : 0;
    CHECK(degenerate == 1);
    CHECK(prep.scaler.degenerate[8]);  // ttl_const

    // 20% per class to test: 12 / 16 / 12.
    CHECK(prep.test.class_histogram() == std::vector<std::size_t>{12, 16, 12});
    // The training side is topped up to its majority class (64 rows).
    CHECK(prep.train.class_histogram() == std::vector<std::size_t>{64, 64, 64});
    CHECK(prep.synthetics.size() == 16 + 0 + 16);
    for (const auto& syn : prep.synthetics) {
        CHECK(syn.lambda >= 0.0);
        CHECK(syn.lambda <= 1.0);
    }

    // Scaled columns: the surviving features are z-scores, so everything
    // lives in a small range.
    for (double v : prep.train.features) CHECK(std::abs(v) < 12.0);

    SUBCASE("deterministic in the seed") {
        auto again = prepare_data(recipe, opts);
        CHECK(again.train.features == prep.train.features);
        CHECK(again.train.labels == prep.train.labels);
        CHECK(again.test.features == prep.test.features);

        PrepareOptions other = opts;
        other.seed = 43;
        auto moved = prepare_data(recipe, other);
        CHECK(moved.test.features != prep.test.features);
    }

    SUBCASE("smote can be disabled") {
        PrepareOptions plain = opts;
        plain.use_smote = false;
        auto prep2 = prepare_data(recipe, plain);
        CHECK(prep2.train.class_histogram() ==
              std::vector<std::size_t>{48, 64, 48});
        CHECK(prep2.synthetics.empty());
        // Same split as the smote run: smote only appends.
        CHECK(prep2.test.features == prep.test.features);
        for (std::size_t i = 0; i < prep2.train.rows(); ++i) {
            CHECK(prep2.train.row_vec(i) == prep.train.row_vec(i));
        }
    }
}

TEST_CASE("build_spec binds the config to the data") {
    ExperimentConfig cfg;
    cfg.conv_filters = 4;
    cfg.gru_units = 3;
    cfg.dense_units = 5;

    auto spec = build_spec(cfg, "mish", 10, 3);
    CHECK(spec.input_len == 10);
    CHECK(spec.n_classes == 3);
    CHECK(spec.output == OutputKind::Softmax);
    CHECK(spec.head == HeadKind::Dense);
    CHECK(spec.hidden_activation.kind == Act::Mish);

    // Two classes default to the single sigmoid unit.
    auto binary = build_spec(cfg, "relu", 10, 2);
    CHECK(binary.output == OutputKind::Sigmoid);
    // ... unless softmax is forced.
    cfg.output = "softmax";
    auto forced = build_spec(cfg, "relu", 10, 2);
    CHECK(forced.output == OutputKind::Softmax);
    cfg.output = "auto";

    cfg.head = "gap";
    auto gap = build_spec(cfg, "tanh", 10, 3);
    CHECK(gap.head == HeadKind::GlobalAveragePool);
    cfg.head = "dense";

    // Slope knobs reach the activation.
    cfg.lrelu_alpha = 0.05;
    auto lr = build_spec(cfg, "lrelu", 10, 3);
    CHECK(lr.hidden_activation.alpha == 0.05);
    cfg.elu_alpha = 1.5;
    auto el = build_spec(cfg, "elu", 10, 3);
    CHECK(el.hidden_activation.alpha == 1.5);
    cfg.prelu_alpha = 0.1;
    auto pr = build_spec(cfg, "prelu", 10, 3);
    CHECK(pr.hidden_activation.alpha == 0.1);

    CHECK_THROWS_AS(build_spec(cfg, "swish", 10, 3), DataError);
    CHECK_THROWS_AS(build_spec(cfg, "mish", 3, 3), DataError);
}

TEST_CASE("experiment config files parse with defaults and overrides") {
    TempDir dir("flowgru_cfg");
    write_file(dir.file("r.recipe"),
               "csv = d.csv\nlabel_column = y\n[labels]\na =\n");
    write_file(dir.file("exp.cfg"),
               "recipe = r.recipe\n"
               "activations = mish, relu, tanh\n"
               "seeds = 5, 6\n"
               "epochs = 9\n"
               "batch_size = 4\n"
               "lr = 0.01\n"
               "smote = false\n"
               "format = csv\n"
               "\n"
               "[model]\n"
               "conv_filters = 7\n"
               "gru_units = 5\n"
               "head = gap\n");
    auto cfg = ExperimentConfig::parse_file(dir.file("exp.cfg"));
    CHECK(cfg.recipe_path == dir.file("r.recipe"));
    CHECK(cfg.dataset_name == "r");  // recipe stem by default
    CHECK(cfg.activations == std::vector<std::string>{"mish", "relu", "tanh"});
    CHECK(cfg.seeds == std::vector<std::uint64_t>{5, 6});
    CHECK(cfg.epochs == 9);
    CHECK(cfg.batch_size == 4);
    CHECK(cfg.adam.lr == 0.01);
    CHECK(cfg.adam.beta1 == 0.9);  // untouched default
    CHECK_FALSE(cfg.use_smote);
    CHECK(cfg.report_format == "csv");
    CHECK(cfg.conv_filters == 7);
    CHECK(cfg.gru_units == 5);
    CHECK(cfg.head == "gap");
    CHECK(cfg.dense_units == 128);  // untouched default

    write_file(dir.file("bad_head.cfg"),
               "recipe = r.recipe\n[model]\nhead = wide\n");
    CHECK_THROWS_AS(ExperimentConfig::parse_file(dir.file("bad_head.cfg")), DataError);
    write_file(dir.file("bad_key.cfg"), "recipe = r.recipe\nturbo = on\n");
    CHECK_THROWS_AS(ExperimentConfig::parse_file(dir.file("bad_key.cfg")), DataError);
    write_file(dir.file("no_recipe.cfg"), "epochs = 3\n");
    CHECK_THROWS_AS(ExperimentConfig::parse_file(dir.file("no_recipe.cfg")), DataError);
}

TEST_CASE("the full comparison learns a separable problem") {
    SyntheticSetup s;
    // The structural cases keep the shared config tiny; give this one enough
    // steps to actually converge.
    s.cfg.epochs = 40;
    std::vector<RunResult> runs;
    auto rep = compare(s.cfg, &runs);

    REQUIRE(rep.summaries.size() == 2);
    REQUIRE(runs.size() == 4);  // 2 activations x 2 seeds, seed-major
    CHECK(runs[0].activation == "mish");
    CHECK(runs[0].seed == 1);
    CHECK(runs[1].activation == "relu");
    CHECK(runs[1].seed == 1);
    CHECK(runs[2].activation == "mish");
    CHECK(runs[2].seed == 2);

    for (const auto& run : runs) {
        CAPTURE(run.activation);
        CAPTURE(run.seed);
        // Widely separated blobs: anything that trains at all clears 90%.
        CHECK(run.report.accuracy >= 0.9);
        // The loss moved in the right direction.
        REQUIRE(run.loss_trace.size() >= 4);
        const double head = (run.loss_trace[0] + run.loss_trace[1]) / 2;
        const double tail = (run.loss_trace[run.loss_trace.size() - 2] +
                             run.loss_trace[run.loss_trace.size() - 1]) / 2;
        CHECK(tail < head);
    }

    // Mean of per-seed metrics sits inside their range.
    for (const auto& sum : rep.summaries) {
        REQUIRE(sum.per_seed.size() == 2);
        double lo = 1e9, hi = -1e9;
        for (const auto& r : sum.per_seed) {
            lo = std::min(lo, r.macro_f1);
            hi = std::max(hi, r.macro_f1);
        }
        CHECK(sum.mean.f1 >= lo - 1e-12);
        CHECK(sum.mean.f1 <= hi + 1e-12);
    }

    REQUIRE(rep.pairs.size() == 1);
    CHECK(rep.pairs[0].a == "mish");
    CHECK(rep.pairs[0].b == "relu");
    CHECK(rep.pairs[0].diff.f1 ==
          doctest::Approx(rep.summaries[0].mean.f1 - rep.summaries[1].mean.f1)
              .epsilon(1e-15));
}

TEST_CASE("comparisons are reproducible run to run") {
    SyntheticSetup s;
    s.cfg.seeds = {7};
    std::vector<RunResult> first, second;
    auto a = compare(s.cfg, &first);
    auto b = compare(s.cfg, &second);

    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(params_max_abs_diff(first[i].params, second[i].params) == 0.0);
        CHECK(first[i].loss_trace == second[i].loss_trace);
        CHECK(first[i].cm.counts == second[i].cm.counts);
    }
    for (const auto& format : {"table", "csv", "jsonl"}) {
        std::ostringstream sa, sb;
        write_comparison_report(sa, a, format);
        write_comparison_report(sb, b, format);
        CHECK(sa.str() == sb.str());
    }
}

TEST_CASE("an activation compared against itself differs by exactly zero") {
    SyntheticSetup s;
    s.cfg.activations = {"mish", "mish"};
    s.cfg.seeds = {3};
    auto rep = compare(s.cfg);
    REQUIRE(rep.pairs.size() == 1);
    CHECK(rep.pairs[0].diff.precision == 0.0);
    CHECK(rep.pairs[0].diff.recall == 0.0);
    CHECK(rep.pairs[0].diff.f1 == 0.0);
    CHECK(rep.pairs[0].diff.accuracy == 0.0);
}

TEST_CASE("run_single persists a loadable model and reports") {
    SyntheticSetup s;
    s.cfg.seeds = {5};
    auto run = run_single(s.cfg, "mish", 5);

    const std::string stem = (fs::path(s.cfg.out_dir) / "mish_seed5").string();
    REQUIRE(fs::exists(stem + ".fgm"));
    REQUIRE(fs::exists(stem + "_eval.txt"));
    REQUIRE(fs::exists(stem + "_loss.csv"));

    auto loaded = load_model(stem + ".fgm");
    CHECK(params_max_abs_diff(loaded.params, run.params) == 0.0);
    CHECK(loaded.class_names == run.class_names);
    CHECK(loaded.feature_names == run.feature_names);

    const std::string loss = slurp(stem + "_loss.csv");
    CHECK(loss.rfind("step,loss\n1,", 0) == 0);
    const std::string eval = slurp(stem + "_eval.txt");
    CHECK(eval.find("F1-Score") != std::string::npos);
    CHECK(eval.find("Accuracy: ") != std::string::npos);
}

TEST_CASE("evaluation report formats") {
    ConfusionMatrix cm(2);
    cm.at(0, 0) = 1;
    cm.at(0, 1) = 1;
    cm.at(1, 0) = 0;
    cm.at(1, 1) = 2;
    auto rep = evaluate(cm);
    const std::vector<std::string> names = {"aa", "b"};

    SUBCASE("table is stable byte for byte") {
        std::ostringstream out;
        write_eval_report(out, rep, names, "table");
        CHECK(out.str() ==
              "Num  Class  Precision  Recall     F1-Score\n"
              "0    aa     100.00%    50.00%     66.67%\n"
              "1    b      66.67%     100.00%    80.00%\n"
              "\n"
              "Accuracy: 75.00%  Macro Precision: 83.33%  "
              "Macro Recall: 75.00%  Macro F1-Score: 73.33%\n");
    }

    SUBCASE("csv round-trips the exact fractions") {
        std::ostringstream out;
        write_eval_report(out, rep, names, "csv");
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "class,precision,recall,f1,accuracy");
        std::getline(in, line);
        CHECK(line.rfind("aa,1,0.5,", 0) == 0);
        std::getline(in, line);  // class b
        std::getline(in, line);  // macro
        CHECK(line.rfind("macro,", 0) == 0);
        // %.17g survives the trip back to double.
        const auto last_comma = line.rfind(',');
        CHECK(std::stod(line.substr(last_comma + 1)) == rep.accuracy);
    }

    SUBCASE("jsonl parses line by line") {
        std::ostringstream out;
        write_eval_report(out, rep, names, "jsonl");
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        auto j0 = nlohmann::json::parse(line);
        CHECK(j0["class"] == "aa");
        CHECK(j0["precision"] == 1.0);
        CHECK(j0["recall"] == 0.5);
        std::getline(in, line);
        auto j1 = nlohmann::json::parse(line);
        CHECK(j1["class"] == "b");
        std::getline(in, line);
        auto jm = nlohmann::json::parse(line);
        CHECK(jm["accuracy"] == 0.75);
        CHECK(jm["macro_f1"].get<double>() == rep.macro_f1);
    }
}

TEST_CASE("comparison report formats") {
    ComparisonReport rep;
    rep.dataset_name = "demo";
    rep.seeds = {1, 2};
    ActivationSummary m;
    m.activation = "mish";
    m.seeds = {1, 2};
    m.mean = {0.98, 0.97, 0.975, 0.99};
    EvalReport e1;
    e1.macro_f1 = 0.97;
    EvalReport e2;
    e2.macro_f1 = 0.98;
    m.per_seed = {e1, e2};
    ActivationSummary r = m;
    r.activation = "relu";
    r.mean = {0.95, 0.94, 0.945, 0.96};
    rep.summaries = {m, r};
    ComparisonReport::PairDiff d;
    d.a = "mish";
    d.b = "relu";
    d.diff = {0.03, 0.03, 0.03, 0.03};
    rep.pairs = {d};

    SUBCASE("table") {
        std::ostringstream out;
        write_comparison_report(out, rep, "table");
        const std::string text = out.str();
        CHECK(text.find("Dataset: demo\n") != std::string::npos);
        CHECK(text.find("Seeds: 1, 2\n") != std::string::npos);
        CHECK(text.find("Difference") != std::string::npos);
        CHECK(text.find("+3.00") != std::string::npos);
        CHECK(text.find("98.00%") != std::string::npos);
        CHECK(text.find("Per-seed macro F1:") != std::string::npos);
        CHECK(text.find("seed 1 97.00%") != std::string::npos);
    }

    SUBCASE("csv") {
        std::ostringstream out;
        write_comparison_report(out, rep, "csv");
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "metric,mish,relu,diff_mish_minus_relu");
        std::getline(in, line);
        CHECK(line.rfind("precision,0.98", 0) == 0);
    }

    SUBCASE("jsonl") {
        std::ostringstream out;
        write_comparison_report(out, rep, "jsonl");
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        auto meta = nlohmann::json::parse(line);
        CHECK(meta["dataset"] == "demo");
        CHECK(meta["seeds"] == nlohmann::json({1, 2}));
        std::getline(in, line);
        auto p = nlohmann::json::parse(line);
        CHECK(p["metric"] == "precision");
        CHECK(p["mish"] == 0.98);
        CHECK(p["diffs"]["mish_minus_relu"].get<double>() ==
              doctest::Approx(0.03));
        // 4 metric lines + meta, then one line per (activation, seed).
        int data_lines = 0;
        while (std::getline(in, line)) ++data_lines;
        CHECK(data_lines == 3 + 4);
    }
}

TEST_CASE("loss traces are numbered from one") {
    std::ostringstream out;
    write_loss_trace(out, {0.5, 0.25});
    CHECK(out.str() == "step,loss\n1,0.5\n2,0.25\n");
}

TEST_CASE("exploding training reports divergence with its epoch") {
    auto ds = generate_synthetic(8, 8, 2, 3.0, 5);
    ModelSpec spec;
    spec.input_len = 8;
    spec.conv_filters = 2;
    spec.conv_kernel = 3;
    spec.pool_size = 2;
    spec.gru_units = 2;
    spec.dense_units = 4;
    spec.n_classes = 2;
    spec.hidden_activation = ActivationKind::tanh();

    TrainOptions opts;
    opts.epochs = 3;
    opts.batch_size = 4;
    opts.adam.lr = 1e39;  // quantizes straight to infinity
    opts.seed = 1;

    CHECK_THROWS_AS(train_model(spec, ds, opts), TrainingDiverged);
    try {
        train_model(spec, ds, opts);
    } catch (const TrainingDiverged& e) {
        CHECK(e.epoch >= 1);
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}
