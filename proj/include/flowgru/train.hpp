#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "flowgru/adam.hpp"
#include "flowgru/dataset.hpp"
#include "flowgru/model.hpp"

namespace flowgru {

struct TrainOptions {
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    AdamConfig adam;
    std::uint64_t seed = 42;
};

struct TrainResult {
    ModelParams params;
    // Mean batch loss, one entry per optimizer step, in step order.
    std::vector<double> loss_trace;
};

// Full-batch-shuffled mini-batch training with Adam. Initialization and the
// per-epoch sample order derive from the seed, so a run is reproducible
// bit-for-bit. Throws TrainingDiverged (naming the epoch) if a step's loss
// comes back non-finite.
TrainResult train_model(const ModelSpec& spec, const LabeledDataset& train,
                        const TrainOptions& opts);

// Argmax class per row (for the sigmoid output, probability >= 0.5 picks
// class 1). Rows are independent and evaluated in parallel.
std::vector<int> predict_labels(const ModelSpec& spec, const ModelParams& params,
                                const LabeledDataset& ds);

}  // namespace flowgru
