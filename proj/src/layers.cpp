#include "flowgru/layers.hpp"

#include <stdexcept>
#include <string>

namespace flowgru {

namespace {

// Accepts [len] or [len, 1] and returns len.
std::size_t conv_input_len(const Tensor& input) {
    if (input.ndim() == 1) return input.dim(0);
    if (input.ndim() == 2 && input.dim(1) == 1) return input.dim(0);
    throw std::invalid_argument("conv1d input must be [len] or [len, 1]");
}

// Serial elementwise activation pass. Kept outside the parallel loops so a
// domain problem surfaces as an exception, never inside an OpenMP region.
Tensor apply_activation(const Tensor& pre, const ActivationKind& act) {
    Tensor out = Tensor::zeros(pre.shape);
    for (std::size_t i = 0; i < pre.numel(); ++i) {
        out[i] = detail::activate_unchecked(act, pre[i]);
    }
    return out;
}

}  // namespace

Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias,
                      const ActivationKind& act, Tensor* pre_out) {
    const std::size_t len = conv_input_len(input);
    if (kernels.ndim() != 2) {
        throw std::invalid_argument("conv1d kernels must be [filters, kernel]");
    }
    const std::size_t filters = kernels.dim(0);
    const std::size_t ksize = kernels.dim(1);
    if (ksize == 0 || filters == 0) {
        throw std::invalid_argument("conv1d needs at least one filter and a nonzero kernel");
    }
    if (bias.numel() != filters) {
        throw std::invalid_argument("conv1d bias length must equal filter count");
    }
    if (len < ksize) {
        throw std::invalid_argument("conv1d input length " + std::to_string(len) +
                                    " is shorter than the kernel " + std::to_string(ksize));
    }
    const std::size_t out_len = len - ksize + 1;

    Tensor pre = Tensor::zeros({out_len, filters});
#pragma omp parallel for schedule(static)
    for (std::size_t p = 0; p < out_len; ++p) {
        for (std::size_t f = 0; f < filters; ++f) {
            double acc = bias[f];
            for (std::size_t k = 0; k < ksize; ++k) {
                acc += kernels.at(f, k) * input[p + k];
            }
            pre.at(p, f) = acc;
        }
    }

    Tensor out = apply_activation(pre, act);
    if (pre_out) *pre_out = std::move(pre);
    return out;
}

Tensor maxpool1d_forward(const Tensor& input, std::size_t pool,
                         std::vector<std::size_t>* argmax) {
    if (pool == 0) throw std::domain_error("pool size must be positive");
    if (input.ndim() != 2) {
        throw std::invalid_argument("maxpool input must be [len, channels]");
    }
    const std::size_t len = input.dim(0);
    const std::size_t channels = input.dim(1);
    if (len < pool) {
        throw std::invalid_argument("maxpool input length " + std::to_string(len) +
                                    " is shorter than the pool " + std::to_string(pool));
    }
    const std::size_t out_len = len / pool;

    Tensor out = Tensor::zeros({out_len, channels});
    if (argmax) argmax->assign(out_len * channels, 0);
    for (std::size_t t = 0; t < out_len; ++t) {
        for (std::size_t c = 0; c < channels; ++c) {
            std::size_t best = t * pool;
            double best_v = input.at(best, c);
            for (std::size_t k = 1; k < pool; ++k) {
                const double v = input.at(t * pool + k, c);
                if (v > best_v) {  // strict: ties keep the earliest position
                    best_v = v;
                    best = t * pool + k;
                }
            }
            out.at(t, c) = best_v;
            if (argmax) (*argmax)[t * channels + c] = best;
        }
    }
    return out;
}

Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                     const ActivationKind& act, Tensor* pre_out) {
    if (w.ndim() != 2) throw std::invalid_argument("dense weights must be [out, in]");
    const std::size_t out_n = w.dim(0);
    const std::size_t in_n = w.dim(1);
    if (x.numel() != in_n) {
        throw std::invalid_argument("dense input length " + std::to_string(x.numel()) +
                                    " does not match weight columns " + std::to_string(in_n));
    }
    if (b.numel() != out_n) {
        throw std::invalid_argument("dense bias length must equal output size");
    }

    Tensor pre = Tensor::zeros({out_n});
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < out_n; ++i) {
        double acc = b[i];
        for (std::size_t j = 0; j < in_n; ++j) {
            acc += w.at(i, j) * x[j];
        }
        pre[i] = acc;
    }

    Tensor out = apply_activation(pre, act);
    if (pre_out) *pre_out = std::move(pre);
    return out;
}

Tensor global_average_pool(const Tensor& seq) {
    if (seq.ndim() != 2) throw std::invalid_argument("gap input must be [steps, channels]");
    const std::size_t steps = seq.dim(0);
    const std::size_t channels = seq.dim(1);
    if (steps == 0) throw std::invalid_argument("gap over an empty sequence");

    Tensor out = Tensor::zeros({channels});
    for (std::size_t c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (std::size_t t = 0; t < steps; ++t) {
            acc += seq.at(t, c);
        }
        out[c] = acc / static_cast<double>(steps);
    }
    return out;
}

}  // namespace flowgru
