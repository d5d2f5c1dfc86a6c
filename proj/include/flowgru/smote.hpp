#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "flowgru/dataset.hpp"

namespace flowgru {

struct SmoteConfig {
    std::size_t k = 5;       // neighbors considered per source point
    std::uint64_t seed = 0;  // drives neighbor choice and interpolation
    // Desired rows per class name. Empty = bring every class up to the
    // largest class. A target below a class's current count is an error.
    std::map<std::string, std::size_t> targets;
};

// Provenance of one generated row: which source/neighbor pair produced it
// and where on the segment it landed.
struct SyntheticSample {
    std::vector<double> features;
    std::size_t source_index;    // row in the input dataset
    std::size_t neighbor_index;  // row in the input dataset
    double lambda;               // in [0, 1]
    int label;
};

struct ResampleResult {
    // Original rows first, verbatim and in order, then the synthetic rows.
    LabeledDataset data;
    std::vector<SyntheticSample> synthetics;
};

// Interpolated sample x + lambda * (neighbor - x), elementwise. lambda must
// be in [0, 1] (domain error) and the vectors equally long.
std::vector<double> synthesize(std::span<const double> x, std::span<const double> neighbor,
                               double lambda);

// Indices (into ds) of the k nearest rows sharing ds.labels[query]'s class,
// by Euclidean distance, excluding the query itself. Distance ties resolve
// to the lower row index. k is capped at class size - 1; a class of one is
// an error naming the class.
std::vector<std::size_t> knn_same_class(const LabeledDataset& ds, std::size_t query,
                                        std::size_t k);

// Minority oversampling: every class is topped up to its target count with
// interpolated samples. Sources rotate round-robin through the class's rows
// (ascending index); the neighbor is drawn uniformly from the source's
// k-nearest list and lambda uniformly from [0, 1], all from the seeded
// generator. Deterministic for a fixed input and config.
ResampleResult resample(const LabeledDataset& ds, const SmoteConfig& cfg);

}  // namespace flowgru
