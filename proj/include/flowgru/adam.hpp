#pragma once

#include <cstddef>

#include "flowgru/model.hpp"

namespace flowgru {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// First and second moment estimates, one slot per parameter, plus the step
// counter used for bias correction.
struct AdamState {
    std::size_t t = 0;
    ModelParams m, v;

    static AdamState zeros(const ModelSpec& spec);
};

// One bias-corrected Adam update:
//   m <- b1 m + (1-b1) g        mhat = m / (1 - b1^t)
//   v <- b2 v + (1-b2) g^2      vhat = v / (1 - b2^t)
//   p <- p - lr * mhat / (sqrt(vhat) + eps)
// with t incremented once per call. Updated parameters are re-quantized to
// single precision (the storage width of the model file).
void adam_step(AdamState& state, ModelParams& params, const ModelGrads& grads,
               const AdamConfig& cfg);

}  // namespace flowgru
