#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "flowgru/activations.hpp"
#include "flowgru/gru.hpp"
#include "flowgru/layers.hpp"
#include "flowgru/tensor.hpp"

namespace flowgru {

enum class HeadKind { Dense, GlobalAveragePool };
enum class OutputKind { Softmax, Sigmoid };

// Architecture hyperparameters. The network is fixed-shape:
//   input [input_len, 1]
//   -> conv1d (valid, stride 1) -> maxpool -> bidirectional gru
//   -> head (dense on the concatenated final hidden states, or mean over time)
//   -> softmax over n_classes, or a single sigmoid unit for binary tasks.
// The same hidden activation is used by the conv, the gru candidate and the
// dense head; gates are always sigmoid.
struct ModelSpec {
    std::size_t input_len = 0;
    std::size_t conv_filters = 32;
    std::size_t conv_kernel = 3;
    std::size_t pool_size = 2;
    std::size_t gru_units = 64;
    std::size_t dense_units = 128;
    HeadKind head = HeadKind::Dense;
    OutputKind output = OutputKind::Softmax;
    std::size_t n_classes = 2;
    ActivationKind hidden_activation = ActivationKind::relu();

    std::size_t conv_out_len() const { return input_len - conv_kernel + 1; }
    std::size_t pooled_len() const { return conv_out_len() / pool_size; }
    // Width of the vector entering the output layer.
    std::size_t head_width() const {
        return head == HeadKind::Dense ? dense_units : 2 * gru_units;
    }
    std::size_t logit_count() const { return output == OutputKind::Sigmoid ? 1 : n_classes; }

    // Throws DataError when the dimensions cannot form a network (e.g. too
    // few input features for the conv kernel or the pool).
    void validate() const;
};

// Index of each learnable prelu slope when the hidden activation is prelu:
// one scalar per layer site, shared across the two gru directions.
namespace prelu_site {
inline constexpr std::size_t conv = 0;
inline constexpr std::size_t gru = 1;
inline constexpr std::size_t dense = 2;
}  // namespace prelu_site

// All trainable tensors. The same struct doubles as the gradient container
// (grads mirror parameters one to one).
struct ModelParams {
    Tensor conv_kernels;  // [filters, kernel]
    Tensor conv_bias;     // [filters]
    BiGruParams gru;
    Tensor dense_w, dense_b;  // dense head only; empty tensors otherwise
    Tensor out_w, out_b;
    Tensor prelu_alpha;  // [sites] when hidden activation is prelu; empty otherwise

    // Fixed traversal order; also the serialization order of the model file.
    std::vector<std::pair<std::string, Tensor*>> tensors();
    std::vector<std::pair<std::string, const Tensor*>> tensors() const;

    static ModelParams zeros(const ModelSpec& spec);
    // Glorot-uniform weights, zero biases, quantized to single precision.
    static ModelParams init(const ModelSpec& spec, std::uint64_t seed);
};

using ModelGrads = ModelParams;

// Intermediate values of one forward pass, kept for backprop.
struct ForwardCache {
    Tensor conv_pre, conv_out;
    Tensor pooled;
    std::vector<std::size_t> pool_argmax;
    GruCache gru_fwd, gru_bwd;
    Tensor bigru_out;
    Tensor head_in;              // [2*units]: dense-head input or gap output
    Tensor dense_pre, dense_out;
    std::vector<double> logits;
    std::vector<double> probs;
};

// Runs the network on one sample (length must equal spec.input_len) and
// returns a probability vector over classes. For the sigmoid output the
// vector is [1-p, p] so the result is a distribution in both modes.
std::vector<double> model_forward(const ModelSpec& spec, const ModelParams& params,
                                  const std::vector<double>& x, ForwardCache* cache = nullptr);

// -ln(probs[label]), with the probability clamped to at least 1e-12.
// Works for both output modes given the [1-p, p] convention above.
double cross_entropy_loss(const std::vector<double>& probs, std::size_t label);

inline constexpr double kProbFloor = 1e-12;

struct BackwardResult {
    double loss = 0.0;
    ModelGrads grads;
};

// Loss and full parameter gradients for one sample.
BackwardResult model_backward(const ModelSpec& spec, const ModelParams& params,
                              const std::vector<double>& x, std::size_t label);

// Mean loss and mean gradients over a batch. Per-sample gradients are
// evaluated in parallel, then reduced serially in sample order, so the
// result does not depend on the number of threads.
BackwardResult batch_backward(const ModelSpec& spec, const ModelParams& params,
                              const std::vector<std::vector<double>>& xs,
                              const std::vector<std::size_t>& labels);

// In-place helpers over the parameter tensor set.
void params_add(ModelParams& acc, const ModelParams& delta);
void params_scale(ModelParams& p, double s);
// Round every value to the nearest single-precision float. Parameters are
// kept f32-exact at all times so the model file round-trips bit-for-bit.
void params_quantize(ModelParams& p);
double params_max_abs_diff(const ModelParams& a, const ModelParams& b);

}  // namespace flowgru
