#include "flowgru/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "flowgru/csv.hpp"
#include "flowgru/errors.hpp"
#include "flowgru/model_io.hpp"
#include "flowgru/rng.hpp"

namespace flowgru {

PreparedData prepare_data(const DatasetRecipe& recipe, const PrepareOptions& opts) {
    SeededRng base(opts.seed);
    PreparedData out;

    LabeledDataset ds = load_raw_csv(recipe);
    if (recipe.scale) {
        out.scaler = standard_scale(ds);
    }
    out.correlations = pearson_with_label(ds);
    ds = pearson_select(ds, recipe.correlation_threshold);

    auto [train, test] = stratified_split(ds, opts.test_fraction,
                                          base.fork(rng_role::split).seed());
    out.test = std::move(test);

    if (opts.use_smote) {
        SmoteConfig sc;
        sc.k = opts.smote_k;
        sc.seed = base.fork(rng_role::smote).seed();
        ResampleResult rr = resample(train, sc);
        out.train = std::move(rr.data);
        out.synthetics = std::move(rr.synthetics);
    } else {
        out.train = std::move(train);
    }
    return out;
}

ModelSpec build_spec(const ExperimentConfig& cfg, const std::string& activation,
                     std::size_t input_len, std::size_t n_classes) {
    ModelSpec spec;
    spec.input_len = input_len;
    spec.conv_filters = cfg.conv_filters;
    spec.conv_kernel = cfg.conv_kernel;
    spec.pool_size = cfg.pool_size;
    spec.gru_units = cfg.gru_units;
    spec.dense_units = cfg.dense_units;
    spec.head = cfg.head == "gap" ? HeadKind::GlobalAveragePool : HeadKind::Dense;
    spec.n_classes = n_classes;
    if (cfg.output == "softmax") {
        spec.output = OutputKind::Softmax;
    } else if (cfg.output == "sigmoid") {
        spec.output = OutputKind::Sigmoid;
    } else {
        spec.output = n_classes == 2 ? OutputKind::Sigmoid : OutputKind::Softmax;
    }

    ActivationKind act = activation_from_name(activation);
    if (act.kind == Act::LReLU) act = ActivationKind::lrelu(cfg.lrelu_alpha);
    if (act.kind == Act::ELU) act = ActivationKind::elu(cfg.elu_alpha);
    if (act.kind == Act::PReLU) act = ActivationKind::prelu(cfg.prelu_alpha);
    spec.hidden_activation = act;
    spec.validate();
    return spec;
}

RunResult train_eval(const ExperimentConfig& cfg, const std::string& activation,
                     std::uint64_t seed, const PreparedData& data) {
    RunResult run;
    run.activation = activation;
    run.seed = seed;
    run.class_names = data.train.class_names;
    run.feature_names = data.train.feature_names;
    run.spec = build_spec(cfg, activation, data.train.n_features,
                          data.train.class_names.size());

    TrainOptions topts;
    topts.epochs = cfg.epochs;
    topts.batch_size = cfg.batch_size;
    topts.adam = cfg.adam;
    topts.seed = seed;
    TrainResult tr = train_model(run.spec, data.train, topts);
    run.params = std::move(tr.params);
    run.loss_trace = std::move(tr.loss_trace);

    const std::vector<int> pred = predict_labels(run.spec, run.params, data.test);
    run.cm = confusion(data.test.labels, pred, run.spec.n_classes);
    run.report = evaluate(run.cm);
    return run;
}

namespace {

std::string report_ext(const std::string& format) {
    return format == "table" ? "txt" : format == "csv" ? "csv" : "jsonl";
}

void persist_run(const ExperimentConfig& cfg, const RunResult& run) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string stem =
        (fs::path(cfg.out_dir) / (run.activation + "_seed" + std::to_string(run.seed)))
            .string();

    save_model(stem + ".fgm", run.spec, run.params, run.class_names, run.feature_names);

    std::ofstream rep(stem + "_eval." + report_ext(cfg.report_format));
    if (!rep) throw DataError("cannot write the evaluation report for " + stem);
    write_eval_report(rep, run.report, run.class_names, cfg.report_format);

    std::ofstream loss(stem + "_loss.csv");
    if (!loss) throw DataError("cannot write the loss trace for " + stem);
    write_loss_trace(loss, run.loss_trace);
}

PrepareOptions prepare_options(const ExperimentConfig& cfg, std::uint64_t seed) {
    PrepareOptions popts;
    popts.test_fraction = cfg.test_fraction;
    popts.use_smote = cfg.use_smote;
    popts.smote_k = cfg.smote_k;
    popts.seed = seed;
    return popts;
}

}  // namespace

RunResult run_single(const ExperimentConfig& cfg, const std::string& activation,
                     std::uint64_t seed) {
    const DatasetRecipe recipe = DatasetRecipe::parse_file(cfg.recipe_path);
    const PreparedData data = prepare_data(recipe, prepare_options(cfg, seed));
    RunResult run = train_eval(cfg, activation, seed, data);
    persist_run(cfg, run);
    return run;
}

MetricQuad quad_of(const EvalReport& rep) {
    return {rep.macro_precision, rep.macro_recall, rep.macro_f1, rep.accuracy};
}

namespace {

ComparisonReport compare_impl(const ExperimentConfig& cfg, std::vector<RunResult>* runs_out,
                              bool persist) {
    const DatasetRecipe recipe = DatasetRecipe::parse_file(cfg.recipe_path);

    ComparisonReport rep;
    rep.dataset_name = cfg.dataset_name;
    rep.seeds = cfg.seeds;
    for (const auto& act : cfg.activations) {
        ActivationSummary s;
        s.activation = act;
        rep.summaries.push_back(std::move(s));
    }

    for (const std::uint64_t seed : cfg.seeds) {
        // One preparation per seed, shared by every activation, so the
        // contenders see exactly the same rows.
        const PreparedData data = prepare_data(recipe, prepare_options(cfg, seed));
        for (std::size_t a = 0; a < cfg.activations.size(); ++a) {
            RunResult run = train_eval(cfg, cfg.activations[a], seed, data);
            if (persist) persist_run(cfg, run);
            rep.summaries[a].seeds.push_back(seed);
            rep.summaries[a].per_seed.push_back(run.report);
            if (runs_out) runs_out->push_back(std::move(run));
        }
    }

    for (auto& s : rep.summaries) {
        MetricQuad m;
        for (const auto& r : s.per_seed) {
            const MetricQuad q = quad_of(r);
            m.precision += q.precision;
            m.recall += q.recall;
            m.f1 += q.f1;
            m.accuracy += q.accuracy;
        }
        const double n = static_cast<double>(s.per_seed.size());
        s.mean = {m.precision / n, m.recall / n, m.f1 / n, m.accuracy / n};
    }

    for (std::size_t i = 0; i < rep.summaries.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.summaries.size(); ++j) {
            ComparisonReport::PairDiff d;
            d.a = rep.summaries[i].activation;
            d.b = rep.summaries[j].activation;
            d.diff.precision =
                rep.summaries[i].mean.precision - rep.summaries[j].mean.precision;
            d.diff.recall = rep.summaries[i].mean.recall - rep.summaries[j].mean.recall;
            d.diff.f1 = rep.summaries[i].mean.f1 - rep.summaries[j].mean.f1;
            d.diff.accuracy = rep.summaries[i].mean.accuracy - rep.summaries[j].mean.accuracy;
            rep.pairs.push_back(std::move(d));
        }
    }
    return rep;
}

}  // namespace

ComparisonReport compare(const ExperimentConfig& cfg, std::vector<RunResult>* runs_out) {
    return compare_impl(cfg, runs_out, /*persist=*/false);
}

ComparisonReport run_compare(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    ComparisonReport rep = compare_impl(cfg, nullptr, /*persist=*/true);
    fs::create_directories(cfg.out_dir);
    std::ofstream out(
        (fs::path(cfg.out_dir) / ("comparison." + report_ext(cfg.report_format))).string());
    if (!out) throw DataError("cannot write the comparison report");
    write_comparison_report(out, rep, cfg.report_format);
    return rep;
}

namespace {

// Shortest decimal form that parses back to exactly the same double.
std::string num_str(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string pad(const std::string& s, std::size_t width) {
    std::string out = s;
    while (out.size() < width) out += ' ';
    return out;
}

const char* kMetricNames[4] = {"precision", "recall", "f1", "accuracy"};

double quad_get(const MetricQuad& q, std::size_t i) {
    switch (i) {
        case 0: return q.precision;
        case 1: return q.recall;
        case 2: return q.f1;
        default: return q.accuracy;
    }
}

}  // namespace

void write_eval_report(std::ostream& out, const EvalReport& rep,
                       const std::vector<std::string>& class_names,
                       const std::string& format) {
    if (format == "csv") {
        out << "class,precision,recall,f1,accuracy\n";
        for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
            const auto& m = rep.per_class[c];
            out << csv_quote(class_names[c]) << ',' << num_str(m.precision) << ','
                << num_str(m.recall) << ',' << num_str(m.f1) << ",\n";
        }
        out << "macro," << num_str(rep.macro_precision) << ',' << num_str(rep.macro_recall) << ','
            << num_str(rep.macro_f1) << ',' << num_str(rep.accuracy) << '\n';
        return;
    }
    if (format == "jsonl") {
        for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
            nlohmann::ordered_json j;
            j["class"] = class_names[c];
            j["precision"] = rep.per_class[c].precision;
            j["recall"] = rep.per_class[c].recall;
            j["f1"] = rep.per_class[c].f1;
            out << j.dump() << '\n';
        }
        nlohmann::ordered_json j;
        j["macro_precision"] = rep.macro_precision;
        j["macro_recall"] = rep.macro_recall;
        j["macro_f1"] = rep.macro_f1;
        j["accuracy"] = rep.accuracy;
        out << j.dump() << '\n';
        return;
    }

    // Text table.
    std::size_t name_w = 5;
    for (const auto& n : class_names) name_w = std::max(name_w, n.size());
    out << "Num  " << pad("Class", name_w + 2) << pad("Precision", 11) << pad("Recall", 11)
        << "F1-Score\n";
    for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
        const auto& m = rep.per_class[c];
        out << pad(std::to_string(c), 5) << pad(class_names[c], name_w + 2)
            << pad(format_percent(m.precision), 11) << pad(format_percent(m.recall), 11)
            << format_percent(m.f1) << '\n';
    }
    out << '\n'
        << "Accuracy: " << format_percent(rep.accuracy)
        << "  Macro Precision: " << format_percent(rep.macro_precision)
        << "  Macro Recall: " << format_percent(rep.macro_recall)
        << "  Macro F1-Score: " << format_percent(rep.macro_f1) << '\n';
}

void write_comparison_report(std::ostream& out, const ComparisonReport& rep,
                             const std::string& format) {
    static const char* kRowLabels[4] = {"Precision", "Recall", "F1-Score", "Accuracy"};

    if (format == "csv") {
        out << "metric";
        for (const auto& s : rep.summaries) out << ',' << s.activation;
        for (const auto& p : rep.pairs) out << ",diff_" << p.a << "_minus_" << p.b;
        out << '\n';
        for (std::size_t i = 0; i < 4; ++i) {
            out << kMetricNames[i];
            for (const auto& s : rep.summaries) out << ',' << num_str(quad_get(s.mean, i));
            for (const auto& p : rep.pairs) out << ',' << num_str(quad_get(p.diff, i));
            out << '\n';
        }
        return;
    }
    if (format == "jsonl") {
        {
            nlohmann::ordered_json j;
            j["dataset"] = rep.dataset_name;
            j["seeds"] = rep.seeds;
            out << j.dump() << '\n';
        }
        for (std::size_t i = 0; i < 4; ++i) {
            nlohmann::ordered_json j;
            j["metric"] = kMetricNames[i];
            for (const auto& s : rep.summaries) j[s.activation] = quad_get(s.mean, i);
            nlohmann::ordered_json diffs;
            for (const auto& p : rep.pairs) {
                diffs[p.a + "_minus_" + p.b] = quad_get(p.diff, i);
            }
            j["diffs"] = diffs;
            out << j.dump() << '\n';
        }
        for (const auto& s : rep.summaries) {
            for (std::size_t r = 0; r < s.per_seed.size(); ++r) {
                nlohmann::ordered_json j;
                j["activation"] = s.activation;
                j["seed"] = s.seeds[r];
                const MetricQuad q = quad_of(s.per_seed[r]);
                j["precision"] = q.precision;
                j["recall"] = q.recall;
                j["f1"] = q.f1;
                j["accuracy"] = q.accuracy;
                out << j.dump() << '\n';
            }
        }
        return;
    }

    // Text table.
    out << "Dataset: " << rep.dataset_name << '\n' << "Seeds:";
    for (std::size_t i = 0; i < rep.seeds.size(); ++i) {
        out << (i ? ", " : " ") << rep.seeds[i];
    }
    out << "\n\n";

    std::size_t col_w = 10;
    for (const auto& s : rep.summaries) col_w = std::max(col_w, s.activation.size() + 2);
    out << pad("Metric", 11);
    for (const auto& s : rep.summaries) out << pad(s.activation, col_w);
    if (rep.pairs.size() == 1) out << "Difference";
    out << '\n';
    for (std::size_t i = 0; i < 4; ++i) {
        out << pad(kRowLabels[i], 11);
        for (const auto& s : rep.summaries) {
            out << pad(format_percent(quad_get(s.mean, i)), col_w);
        }
        if (rep.pairs.size() == 1) out << format_signed_pp(quad_get(rep.pairs[0].diff, i));
        out << '\n';
    }
    if (rep.pairs.size() > 1) {
        out << '\n';
        for (const auto& p : rep.pairs) {
            out << p.a << " minus " << p.b << ':';
            for (std::size_t i = 0; i < 4; ++i) {
                out << ' ' << kMetricNames[i] << ' ' << format_signed_pp(quad_get(p.diff, i));
            }
            out << '\n';
        }
    }

    out << "\nPer-seed macro F1:\n";
    for (const auto& s : rep.summaries) {
        out << "  " << s.activation << ':';
        for (std::size_t r = 0; r < s.per_seed.size(); ++r) {
            out << (r ? ", " : " ") << "seed " << s.seeds[r] << ' '
                << format_percent(s.per_seed[r].macro_f1);
        }
        out << '\n';
    }
}

void write_loss_trace(std::ostream& out, const std::vector<double>& trace) {
    out << "step,loss\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << (i + 1) << ',' << num_str(trace[i]) << '\n';
    }
}

}  // namespace flowgru
