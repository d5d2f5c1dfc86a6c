#include "flowgru/recipe.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "flowgru/csv.hpp"
#include "flowgru/errors.hpp"

namespace flowgru {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// One parsed INI-ish file: ordered (key, value) pairs per section. The
// unnamed top section comes first. '#' and ';' start comment lines.
struct IniDoc {
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>
        sections;

    const std::vector<std::pair<std::string, std::string>>* find(const std::string& name) const {
        for (const auto& [sec, entries] : sections) {
            if (sec == name) return &entries;
        }
        return nullptr;
    }
};

IniDoc parse_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    IniDoc doc;
    doc.sections.emplace_back("", std::vector<std::pair<std::string, std::string>>{});
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            doc.sections.emplace_back(trim(t.substr(1, t.size() - 2)),
                                      std::vector<std::pair<std::string, std::string>>{});
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw DataError("'" + path + "' line " + std::to_string(lineno) +
                            ": expected key = value");
        }
        doc.sections.back().second.emplace_back(trim(t.substr(0, eq)),
                                                trim(t.substr(eq + 1)));
    }
    return doc;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',') {
            const std::string t = trim(cur);
            if (!t.empty()) out.push_back(t);
            cur.clear();
        } else {
            cur += c;
        }
    }
    const std::string t = trim(cur);
    if (!t.empty()) out.push_back(t);
    return out;
}

double parse_num(const std::string& path, const std::string& key, const std::string& value) {
    double v = 0.0;
    if (!parse_csv_number(value, v)) {
        throw DataError("'" + path + "': " + key + " = '" + value + "' is not a number");
    }
    return v;
}

std::size_t parse_count(const std::string& path, const std::string& key,
                        const std::string& value) {
    const double v = parse_num(path, key, value);
    if (v < 0 || v != std::floor(v)) {
        throw DataError("'" + path + "': " + key + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string& path, const std::string& key, const std::string& value) {
    if (value == "true" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "no" || value == "0") return false;
    throw DataError("'" + path + "': " + key + " must be true or false");
}

}  // namespace

std::string resolve_relative(const std::string& base_file, const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_file).parent_path() / p).string();
}

DatasetRecipe DatasetRecipe::parse_file(const std::string& path) {
    const IniDoc doc = parse_ini(path);
    DatasetRecipe r;
    const auto* top = doc.find("");
    for (const auto& [key, value] : *top) {
        if (key == "csv") r.csv_path = resolve_relative(path, value);
        else if (key == "label_column") r.label_column = value;
        else if (key == "drop_columns") r.drop_columns = split_list(value);
        else if (key == "correlation_threshold")
            r.correlation_threshold = parse_num(path, key, value);
        else if (key == "scale") r.scale = parse_bool(path, key, value);
        else throw DataError("'" + path + "': unknown key '" + key + "'");
    }
    if (r.csv_path.empty()) throw DataError("'" + path + "' does not set csv");
    if (r.label_column.empty()) throw DataError("'" + path + "' does not set label_column");
    if (!(r.correlation_threshold >= 0.0 && r.correlation_threshold <= 1.0)) {
        throw DataError("'" + path + "': correlation_threshold must be in [0, 1]");
    }

    const auto* labels = doc.find("labels");
    if (!labels || labels->empty()) {
        throw DataError("'" + path + "' needs a non-empty [labels] section");
    }
    for (const auto& [cls, raws] : *labels) {
        auto values = split_list(raws);
        if (values.empty()) values.push_back(cls);
        r.label_mapping.emplace_back(cls, std::move(values));
    }

    if (const auto* counts = doc.find("expected_counts")) {
        for (const auto& [cls, num] : *counts) {
            r.expected_counts.emplace_back(cls, parse_count(path, cls, num));
        }
    }
    return r;
}

LabeledDataset load_raw_csv(const DatasetRecipe& recipe) {
    const CsvTable table = read_csv_file(recipe.csv_path);
    if (table.header.empty()) throw DataError("'" + recipe.csv_path + "' has no header row");

    std::size_t label_col = table.header.size();
    std::vector<char> dropped(table.header.size(), 0);
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j] == recipe.label_column) label_col = j;
        for (const auto& d : recipe.drop_columns) {
            if (table.header[j] == d) dropped[j] = 1;
        }
    }
    if (label_col == table.header.size()) {
        throw DataError("'" + recipe.csv_path + "' has no column '" + recipe.label_column +
                        "'");
    }
    dropped[label_col] = 1;

    // A column is a feature when every one of its cells parses as a finite
    // number; text-ish columns silently drop out here.
    std::vector<char> numeric(table.header.size(), 1);
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (dropped[j]) {
            numeric[j] = 0;
            continue;
        }
        double v;
        for (const auto& row : table.rows) {
            if (!parse_csv_number(row[j], v)) {
                numeric[j] = 0;
                break;
            }
        }
    }

    LabeledDataset ds;
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (numeric[j]) {
            keep.push_back(j);
            ds.feature_names.push_back(table.header[j]);
        }
    }
    ds.n_features = keep.size();
    if (keep.empty()) {
        throw DataError("'" + recipe.csv_path + "' has no numeric attribute columns");
    }

    // Raw label value -> class id.
    std::map<std::string, int> raw_to_class;
    for (std::size_t c = 0; c < recipe.label_mapping.size(); ++c) {
        ds.class_names.push_back(recipe.label_mapping[c].first);
        for (const auto& raw : recipe.label_mapping[c].second) {
            raw_to_class[raw] = static_cast<int>(c);
        }
    }

    std::vector<double> row(ds.n_features);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& cells = table.rows[i];
        const auto it = raw_to_class.find(trim(cells[label_col]));
        if (it == raw_to_class.end()) {
            throw DataError("'" + recipe.csv_path + "' row " + std::to_string(i + 2) +
                            ": label value '" + cells[label_col] +
                            "' is not covered by the recipe's [labels]");
        }
        for (std::size_t k = 0; k < keep.size(); ++k) {
            parse_csv_number(cells[keep[k]], row[k]);
        }
        ds.push_row(row, it->second);
    }

    if (!recipe.expected_counts.empty()) {
        const auto hist = ds.class_histogram();
        for (const auto& [cls, want] : recipe.expected_counts) {
            const auto it = std::find(ds.class_names.begin(), ds.class_names.end(), cls);
            if (it == ds.class_names.end()) {
                std::cerr << "warning: expected_counts names unknown class '" << cls << "'\n";
                continue;
            }
            const std::size_t got = hist[static_cast<std::size_t>(it - ds.class_names.begin())];
            if (got != want) {
                std::cerr << "warning: class '" << cls << "' has " << got
                          << " rows, expected " << want << "\n";
            }
        }
    }
    ds.validate();
    return ds;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    const IniDoc doc = parse_ini(path);
    ExperimentConfig c;
    const auto* top = doc.find("");
    for (const auto& [key, value] : *top) {
        if (key == "recipe") c.recipe_path = resolve_relative(path, value);
        else if (key == "dataset_name") c.dataset_name = value;
        else if (key == "activations") c.activations = split_list(value);
        else if (key == "seeds") {
            c.seeds.clear();
            for (const auto& s : split_list(value)) {
                c.seeds.push_back(parse_count(path, key, s));
            }
        } else if (key == "epochs") c.epochs = parse_count(path, key, value);
        else if (key == "batch_size") c.batch_size = parse_count(path, key, value);
        else if (key == "lr") c.adam.lr = parse_num(path, key, value);
        else if (key == "beta1") c.adam.beta1 = parse_num(path, key, value);
        else if (key == "beta2") c.adam.beta2 = parse_num(path, key, value);
        else if (key == "epsilon") c.adam.epsilon = parse_num(path, key, value);
        else if (key == "test_fraction") c.test_fraction = parse_num(path, key, value);
        else if (key == "smote") c.use_smote = parse_bool(path, key, value);
        else if (key == "smote_k") c.smote_k = parse_count(path, key, value);
        else if (key == "out_dir") c.out_dir = resolve_relative(path, value);
        else if (key == "format") c.report_format = value;
        else throw DataError("'" + path + "': unknown key '" + key + "'");
    }
    if (c.recipe_path.empty()) throw DataError("'" + path + "' does not set recipe");
    if (c.activations.empty()) throw DataError("'" + path + "' lists no activations");
    if (c.seeds.empty()) throw DataError("'" + path + "' lists no seeds");
    if (c.dataset_name.empty()) {
        c.dataset_name = std::filesystem::path(c.recipe_path).stem().string();
    }

    if (const auto* model = doc.find("model")) {
        for (const auto& [key, value] : *model) {
            if (key == "conv_filters") c.conv_filters = parse_count(path, key, value);
            else if (key == "conv_kernel") c.conv_kernel = parse_count(path, key, value);
            else if (key == "pool_size") c.pool_size = parse_count(path, key, value);
            else if (key == "gru_units") c.gru_units = parse_count(path, key, value);
            else if (key == "dense_units") c.dense_units = parse_count(path, key, value);
            else if (key == "head") c.head = value;
            else if (key == "output") c.output = value;
            else if (key == "lrelu_alpha") c.lrelu_alpha = parse_num(path, key, value);
            else if (key == "elu_alpha") c.elu_alpha = parse_num(path, key, value);
            else if (key == "prelu_alpha") c.prelu_alpha = parse_num(path, key, value);
            else throw DataError("'" + path + "': unknown [model] key '" + key + "'");
        }
    }
    if (c.head != "dense" && c.head != "gap") {
        throw DataError("'" + path + "': head must be dense or gap");
    }
    if (c.output != "auto" && c.output != "softmax" && c.output != "sigmoid") {
        throw DataError("'" + path + "': output must be auto, softmax or sigmoid");
    }
    if (c.report_format != "table" && c.report_format != "csv" && c.report_format != "jsonl") {
        throw DataError("'" + path + "': format must be table, csv or jsonl");
    }
    return c;
}

}  // namespace flowgru
