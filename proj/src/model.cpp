#include "flowgru/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "flowgru/errors.hpp"
#include "flowgru/rng.hpp"

namespace flowgru {

void ModelSpec::validate() const {
    if (input_len == 0) throw DataError("model input length is zero");
    if (conv_filters == 0 || conv_kernel == 0 || pool_size == 0 || gru_units == 0) {
        throw DataError("model dimensions must be positive");
    }
    if (head == HeadKind::Dense && dense_units == 0) {
        throw DataError("dense head needs at least one unit");
    }
    if (input_len < conv_kernel) {
        throw DataError("input length " + std::to_string(input_len) +
                        " is shorter than the conv kernel " + std::to_string(conv_kernel) +
                        "; select more features or shrink the kernel");
    }
    if (conv_out_len() < pool_size) {
        throw DataError("conv output length " + std::to_string(conv_out_len()) +
                        " is shorter than the pool size " + std::to_string(pool_size));
    }
    if (n_classes < 2) throw DataError("need at least two classes");
    if (output == OutputKind::Sigmoid && n_classes != 2) {
        throw DataError("sigmoid output requires exactly two classes");
    }
}

static std::size_t prelu_sites(const ModelSpec& spec) {
    return spec.head == HeadKind::Dense ? 3 : 2;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::tensors() {
    std::vector<std::pair<std::string, Tensor*>> v;
    v.reserve(24);
    v.emplace_back("conv_kernels", &conv_kernels);
    v.emplace_back("conv_bias", &conv_bias);
    auto add_dir = [&](const char* prefix, GruParams& d) {
        const std::string p = prefix;
        v.emplace_back(p + ".w_z", &d.w_z);
        v.emplace_back(p + ".w_r", &d.w_r);
        v.emplace_back(p + ".w_h", &d.w_h);
        v.emplace_back(p + ".u_z", &d.u_z);
        v.emplace_back(p + ".u_r", &d.u_r);
        v.emplace_back(p + ".u_h", &d.u_h);
        v.emplace_back(p + ".b_z", &d.b_z);
        v.emplace_back(p + ".b_r", &d.b_r);
        v.emplace_back(p + ".b_h", &d.b_h);
    };
    add_dir("gru_fwd", gru.fwd);
    add_dir("gru_bwd", gru.bwd);
    if (!dense_w.empty()) {
        v.emplace_back("dense_w", &dense_w);
        v.emplace_back("dense_b", &dense_b);
    }
    v.emplace_back("out_w", &out_w);
    v.emplace_back("out_b", &out_b);
    if (!prelu_alpha.empty()) {
        v.emplace_back("prelu_alpha", &prelu_alpha);
    }
    return v;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::tensors() const {
    auto mut = const_cast<ModelParams*>(this)->tensors();
    std::vector<std::pair<std::string, const Tensor*>> v;
    v.reserve(mut.size());
    for (auto& [name, t] : mut) v.emplace_back(name, t);
    return v;
}

ModelParams ModelParams::zeros(const ModelSpec& spec) {
    spec.validate();
    ModelParams p;
    p.conv_kernels = Tensor::zeros({spec.conv_filters, spec.conv_kernel});
    p.conv_bias = Tensor::zeros({spec.conv_filters});
    p.gru.fwd = GruParams::zeros(spec.gru_units, spec.conv_filters);
    p.gru.bwd = GruParams::zeros(spec.gru_units, spec.conv_filters);
    if (spec.head == HeadKind::Dense) {
        p.dense_w = Tensor::zeros({spec.dense_units, 2 * spec.gru_units});
        p.dense_b = Tensor::zeros({spec.dense_units});
    }
    p.out_w = Tensor::zeros({spec.logit_count(), spec.head_width()});
    p.out_b = Tensor::zeros({spec.logit_count()});
    if (spec.hidden_activation.kind == Act::PReLU) {
        // All-zero like everything else: this struct doubles as the gradient
        // container. init() stamps the starting slope.
        p.prelu_alpha = Tensor::zeros({prelu_sites(spec)});
    }
    return p;
}

ModelParams ModelParams::init(const ModelSpec& spec, std::uint64_t seed) {
    ModelParams p = zeros(spec);
    if (!p.prelu_alpha.empty()) p.prelu_alpha.fill(spec.hidden_activation.alpha);
    SeededRng rng(seed);
    // Glorot-uniform on every 2-D weight; biases stay zero. For the conv
    // kernels the fans are (kernel, filters).
    for (auto& [name, t] : p.tensors()) {
        if (t->ndim() != 2) continue;
        const double fan_out = static_cast<double>(t->dim(0));
        const double fan_in = static_cast<double>(t->dim(1));
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& v : t->data) v = rng.uniform(-limit, limit);
    }
    params_quantize(p);
    return p;
}

void params_add(ModelParams& acc, const ModelParams& delta) {
    auto a = acc.tensors();
    auto d = delta.tensors();
    if (a.size() != d.size()) throw std::invalid_argument("parameter sets do not match");
    for (std::size_t i = 0; i < a.size(); ++i) {
        Tensor& ta = *a[i].second;
        const Tensor& td = *d[i].second;
        if (!ta.same_shape(td)) throw std::invalid_argument("parameter shapes do not match");
        for (std::size_t j = 0; j < ta.numel(); ++j) ta[j] += td[j];
    }
}

void params_scale(ModelParams& p, double s) {
    for (auto& [name, t] : p.tensors()) {
        for (double& v : t->data) v *= s;
    }
}

void params_quantize(ModelParams& p) {
    for (auto& [name, t] : p.tensors()) {
        for (double& v : t->data) v = static_cast<double>(static_cast<float>(v));
    }
}

double params_max_abs_diff(const ModelParams& a, const ModelParams& b) {
    auto ta = a.tensors();
    auto tb = b.tensors();
    if (ta.size() != tb.size()) throw std::invalid_argument("parameter sets do not match");
    double mx = 0.0;
    for (std::size_t i = 0; i < ta.size(); ++i) {
        const Tensor& x = *ta[i].second;
        const Tensor& y = *tb[i].second;
        if (!x.same_shape(y)) throw std::invalid_argument("parameter shapes do not match");
        for (std::size_t j = 0; j < x.numel(); ++j) {
            mx = std::max(mx, std::abs(x[j] - y[j]));
        }
    }
    return mx;
}

namespace {

// The hidden activation with the live prelu slope for a given site patched
// in. For every other kind this is just the spec's activation.
ActivationKind site_activation(const ModelSpec& spec, const ModelParams& params,
                               std::size_t site) {
    ActivationKind a = spec.hidden_activation;
    if (a.kind == Act::PReLU) a.alpha = params.prelu_alpha[site];
    return a;
}

std::vector<double> forward_impl(const ModelSpec& spec, const ModelParams& params,
                                 const std::vector<double>& x, ForwardCache& c) {
    const Tensor input({x.size()}, x);

    c.conv_out = conv1d_forward(input, params.conv_kernels, params.conv_bias,
                                site_activation(spec, params, prelu_site::conv), &c.conv_pre);
    c.pooled = maxpool1d_forward(c.conv_out, spec.pool_size, &c.pool_argmax);
    c.bigru_out = bigru_forward(c.pooled, params.gru,
                                site_activation(spec, params, prelu_site::gru), &c.gru_fwd,
                                &c.gru_bwd);

    const std::size_t steps = c.pooled.dim(0);
    const std::size_t units = spec.gru_units;
    if (spec.head == HeadKind::Dense) {
        // Concatenated final hidden states: forward direction at the last
        // step, backward direction at its own last step (input position 0).
        c.head_in = Tensor::zeros({2 * units});
        for (std::size_t u = 0; u < units; ++u) {
            c.head_in[u] = c.gru_fwd.h.at(steps - 1, u);
            c.head_in[units + u] = c.gru_bwd.h.at(steps - 1, u);
        }
        c.dense_out = dense_forward(c.head_in, params.dense_w, params.dense_b,
                                    site_activation(spec, params, prelu_site::dense),
                                    &c.dense_pre);
    } else {
        c.head_in = global_average_pool(c.bigru_out);
    }
    const Tensor& head_vec = spec.head == HeadKind::Dense ? c.dense_out : c.head_in;

    Tensor logits_t =
        dense_forward(head_vec, params.out_w, params.out_b, ActivationKind::linear());
    c.logits.assign(logits_t.data.begin(), logits_t.data.end());

    if (spec.output == OutputKind::Sigmoid) {
        const double p = detail::sigmoid_stable(c.logits[0]);
        c.probs = {1.0 - p, p};
    } else {
        c.probs = detail::softmax_unchecked(c.logits);
    }
    return c.probs;
}

}  // namespace

std::vector<double> model_forward(const ModelSpec& spec, const ModelParams& params,
                                  const std::vector<double>& x, ForwardCache* cache) {
    spec.validate();
    if (x.size() != spec.input_len) {
        throw std::invalid_argument("input length " + std::to_string(x.size()) +
                                    " does not match the model's " +
                                    std::to_string(spec.input_len));
    }
    ForwardCache local;
    return forward_impl(spec, params, x, cache ? *cache : local);
}

double cross_entropy_loss(const std::vector<double>& probs, std::size_t label) {
    if (label >= probs.size()) {
        throw std::invalid_argument("label " + std::to_string(label) +
                                    " out of range for " + std::to_string(probs.size()) +
                                    " classes");
    }
    return -std::log(std::max(probs[label], kProbFloor));
}

namespace {

BackwardResult backward_impl(const ModelSpec& spec, const ModelParams& params,
                             const std::vector<double>& x, std::size_t label,
                             ForwardCache& c) {
    forward_impl(spec, params, x, c);

    BackwardResult res;
    res.loss = cross_entropy_loss(c.probs, label);
    res.grads = ModelGrads::zeros(spec);
    ModelGrads& g = res.grads;

    // Gradient with respect to the logits. When the picked probability sits
    // at the clamp floor the loss is locally flat, so the gradient is zero.
    std::vector<double> dlogits(c.logits.size(), 0.0);
    if (spec.output == OutputKind::Sigmoid) {
        const double p = c.probs[1];
        const double y = label == 1 ? 1.0 : 0.0;
        if (c.probs[label] > kProbFloor) {
            dlogits[0] = y > 0.5 ? -(1.0 - p) : p;
        }
    } else {
        if (c.probs[label] > kProbFloor) {
            for (std::size_t i = 0; i < dlogits.size(); ++i) {
                dlogits[i] = c.probs[i] - (i == label ? 1.0 : 0.0);
            }
        }
    }

    // Output layer (linear).
    const Tensor& head_vec = spec.head == HeadKind::Dense ? c.dense_out : c.head_in;
    Tensor dhead_vec = Tensor::zeros({head_vec.numel()});
    for (std::size_t i = 0; i < dlogits.size(); ++i) {
        for (std::size_t j = 0; j < head_vec.numel(); ++j) {
            g.out_w.at(i, j) += dlogits[i] * head_vec[j];
            dhead_vec[j] += params.out_w.at(i, j) * dlogits[i];
        }
        g.out_b[i] += dlogits[i];
    }

    // Head.
    const std::size_t units = spec.gru_units;
    const std::size_t steps = c.pooled.dim(0);
    Tensor dbigru = Tensor::zeros({steps, 2 * units});
    if (spec.head == HeadKind::Dense) {
        const ActivationKind act = site_activation(spec, params, prelu_site::dense);
        Tensor da = Tensor::zeros({spec.dense_units});
        for (std::size_t i = 0; i < spec.dense_units; ++i) {
            da[i] = dhead_vec[i] * detail::activate_grad_unchecked(act, c.dense_pre[i]);
            if (act.kind == Act::PReLU) {
                g.prelu_alpha[prelu_site::dense] +=
                    dhead_vec[i] * detail::activate_alpha_grad_unchecked(act, c.dense_pre[i]);
            }
        }
        Tensor dhead_in = Tensor::zeros({2 * units});
        for (std::size_t i = 0; i < spec.dense_units; ++i) {
            for (std::size_t j = 0; j < 2 * units; ++j) {
                g.dense_w.at(i, j) += da[i] * c.head_in[j];
                dhead_in[j] += params.dense_w.at(i, j) * da[i];
            }
            g.dense_b[i] += da[i];
        }
        // The dense head reads the forward state at the last input position
        // and the backward state at the first, i.e. bigru rows steps-1 and 0.
        for (std::size_t u = 0; u < units; ++u) {
            dbigru.at(steps - 1, u) = dhead_in[u];
            dbigru.at(0, units + u) = dhead_in[units + u];
        }
    } else {
        // Mean over time spreads the gradient uniformly.
        for (std::size_t t = 0; t < steps; ++t) {
            for (std::size_t j = 0; j < 2 * units; ++j) {
                dbigru.at(t, j) = dhead_vec[j] / static_cast<double>(steps);
            }
        }
    }

    // Recurrent block.
    const ActivationKind gru_act = site_activation(spec, params, prelu_site::gru);
    BiGruBackward bg =
        bigru_backward(c.pooled, params.gru, gru_act, c.gru_fwd, c.gru_bwd, dbigru);
    g.gru = std::move(bg.grads);
    if (gru_act.kind == Act::PReLU) g.prelu_alpha[prelu_site::gru] += bg.alpha_grad;

    // Pooling: route each pooled gradient back to the winning position.
    Tensor dconv = Tensor::zeros(c.conv_out.shape);
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t f = 0; f < spec.conv_filters; ++f) {
            dconv.at(c.pool_argmax[t * spec.conv_filters + f], f) += bg.dseq.at(t, f);
        }
    }

    // Convolution.
    const ActivationKind conv_act = site_activation(spec, params, prelu_site::conv);
    const std::size_t out_len = spec.conv_out_len();
    for (std::size_t p = 0; p < out_len; ++p) {
        for (std::size_t f = 0; f < spec.conv_filters; ++f) {
            const double dpre =
                dconv.at(p, f) * detail::activate_grad_unchecked(conv_act, c.conv_pre.at(p, f));
            if (conv_act.kind == Act::PReLU) {
                g.prelu_alpha[prelu_site::conv] +=
                    dconv.at(p, f) *
                    detail::activate_alpha_grad_unchecked(conv_act, c.conv_pre.at(p, f));
            }
            for (std::size_t k = 0; k < spec.conv_kernel; ++k) {
                g.conv_kernels.at(f, k) += dpre * x[p + k];
            }
            g.conv_bias[f] += dpre;
        }
    }
    return res;
}

}  // namespace

BackwardResult model_backward(const ModelSpec& spec, const ModelParams& params,
                              const std::vector<double>& x, std::size_t label) {
    spec.validate();
    if (x.size() != spec.input_len) {
        throw std::invalid_argument("input length does not match the model");
    }
    if (label >= spec.n_classes) {
        throw std::invalid_argument("label out of range");
    }
    ForwardCache c;
    return backward_impl(spec, params, x, label, c);
}

BackwardResult batch_backward(const ModelSpec& spec, const ModelParams& params,
                              const std::vector<std::vector<double>>& xs,
                              const std::vector<std::size_t>& labels) {
    spec.validate();
    if (xs.empty()) throw std::invalid_argument("empty batch");
    if (xs.size() != labels.size()) {
        throw std::invalid_argument("batch features and labels differ in length");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i].size() != spec.input_len) {
            throw std::invalid_argument("batch row " + std::to_string(i) +
                                        " has the wrong length");
        }
        if (labels[i] >= spec.n_classes) {
            throw std::invalid_argument("batch row " + std::to_string(i) +
                                        " has an out-of-range label");
        }
    }

    // Evaluate per-sample gradients in parallel, then reduce in sample order
    // so the sum is identical no matter how many threads ran.
    std::vector<BackwardResult> per(xs.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ForwardCache c;
        per[i] = backward_impl(spec, params, xs[i], labels[i], c);
    }

    BackwardResult total;
    total.grads = ModelGrads::zeros(spec);
    for (std::size_t i = 0; i < per.size(); ++i) {
        total.loss += per[i].loss;
        params_add(total.grads, per[i].grads);
    }
    const double inv = 1.0 / static_cast<double>(xs.size());
    total.loss *= inv;
    params_scale(total.grads, inv);
    return total;
}

}  // namespace flowgru
