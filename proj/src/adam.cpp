#include "flowgru/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace flowgru {

AdamState AdamState::zeros(const ModelSpec& spec) {
    AdamState s;
    s.m = ModelParams::zeros(spec);
    s.v = ModelParams::zeros(spec);
    return s;
}

void adam_step(AdamState& state, ModelParams& params, const ModelGrads& grads,
               const AdamConfig& cfg) {
    state.t += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));

    auto pt = params.tensors();
    auto gt = grads.tensors();
    auto mt = state.m.tensors();
    auto vt = state.v.tensors();
    if (pt.size() != gt.size()) {
        throw std::invalid_argument("adam: gradient set does not match parameters");
    }
    for (std::size_t i = 0; i < pt.size(); ++i) {
        Tensor& p = *pt[i].second;
        const Tensor& g = *gt[i].second;
        Tensor& m = *mt[i].second;
        Tensor& v = *vt[i].second;
        if (!p.same_shape(g)) {
            throw std::invalid_argument("adam: gradient shape does not match parameters");
        }
        for (std::size_t j = 0; j < p.numel(); ++j) {
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
            const double mhat = m[j] / c1;
            const double vhat = v[j] / c2;
            p[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
    }
    params_quantize(params);
}

}  // namespace flowgru
