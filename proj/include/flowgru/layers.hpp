#pragma once

#include <cstddef>
#include <vector>

#include "flowgru/activations.hpp"
#include "flowgru/tensor.hpp"

namespace flowgru {

// 1-D valid convolution, stride 1, single input channel.
// input: [len] or [len, 1]; kernels: [filters, kernel]; bias: [filters].
// Output: [len - kernel + 1, filters]. If pre_out is given, the
// pre-activation values are stored there for the backward pass.
Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias,
                      const ActivationKind& act, Tensor* pre_out = nullptr);

// Per-channel temporal max pooling; a trailing remainder shorter than pool
// is dropped. input: [len, channels] -> [len / pool, channels]. If argmax
// is given it receives, per output element (row-major), the source row the
// max came from; ties go to the earliest position.
Tensor maxpool1d_forward(const Tensor& input, std::size_t pool,
                         std::vector<std::size_t>* argmax = nullptr);

// Fully connected layer: w [out, in], b [out], x [in].
Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                     const ActivationKind& act, Tensor* pre_out = nullptr);

// Mean over time: [steps, channels] -> [channels].
Tensor global_average_pool(const Tensor& seq);

}  // namespace flowgru
