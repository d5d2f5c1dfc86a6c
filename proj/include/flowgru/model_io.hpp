#pragma once

#include <string>
#include <vector>

#include "flowgru/model.hpp"

namespace flowgru {

struct LoadedModel {
    ModelSpec spec;
    ModelParams params;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
};

// Binary model file, format documented in docs/model_format.md: a fixed
// header (magic, version, architecture, activation, class and feature
// names) followed by every parameter tensor as little-endian float32 in
// the canonical order. Because parameters are kept f32-exact in memory,
// save -> load -> save reproduces the file byte for byte.
void save_model(const std::string& path, const ModelSpec& spec, const ModelParams& params,
                const std::vector<std::string>& class_names,
                const std::vector<std::string>& feature_names);

// Throws DataError on a bad magic/version, a truncated file, or shape
// inconsistencies.
LoadedModel load_model(const std::string& path);

}  // namespace flowgru
