#pragma once

#include <cstddef>

#include "flowgru/activations.hpp"
#include "flowgru/tensor.hpp"

namespace flowgru {

// One GRU direction. w_* are [units, in], u_* are [units, units],
// b_* are [units]. Gate order everywhere is z (update), r (reset),
// h (candidate).
struct GruParams {
    Tensor w_z, w_r, w_h;
    Tensor u_z, u_r, u_h;
    Tensor b_z, b_r, b_h;

    static GruParams zeros(std::size_t units, std::size_t in);
    std::size_t units() const { return b_z.numel(); }
};

// Everything the backward pass needs, all [steps, units]:
//   z, r      gate values
//   a_h       candidate pre-activation
//   hhat      candidate value phi(a_h)
//   rh        r (.) h_prev, the recurrent input of the candidate
//   h         hidden state after each step
struct GruCache {
    Tensor z, r, a_h, hhat, rh, h;
};

// Single direction over seq [steps, in]; h starts at zero. The update
// follows the usual gated recurrence:
//   z_t = sigmoid(w_z x_t + u_z h_prev + b_z)
//   r_t = sigmoid(w_r x_t + u_r h_prev + b_r)
//   hhat_t = phi(w_h x_t + u_h (r_t (.) h_prev) + b_h)
//   h_t = (1 - z_t) (.) h_prev + z_t (.) hhat_t
// where phi is the candidate activation. Returns h for all steps.
Tensor gru_forward(const Tensor& seq, const GruParams& p, const ActivationKind& candidate,
                   GruCache* cache = nullptr);

struct GruBackward {
    GruParams grads;
    double alpha_grad = 0.0;  // candidate-slope gradient when phi is prelu
    Tensor dseq;              // [steps, in]
};

// Backprop through time for one direction. dout is [steps, units], the loss
// gradient with respect to every hidden state.
GruBackward gru_backward(const Tensor& seq, const GruParams& p, const ActivationKind& candidate,
                         const GruCache& cache, const Tensor& dout);

struct BiGruParams {
    GruParams fwd, bwd;
};

// Bidirectional wrapper. Output [steps, 2*units]: row t holds the forward
// state for step t followed by the backward state for step t (the backward
// direction reads the sequence reversed; its outputs are reversed back to
// input order before concatenation). Both directions share the candidate
// activation. Caches are per-direction, in each direction's own time.
Tensor bigru_forward(const Tensor& seq, const BiGruParams& p, const ActivationKind& candidate,
                     GruCache* cache_fwd = nullptr, GruCache* cache_bwd = nullptr);

struct BiGruBackward {
    BiGruParams grads;
    double alpha_grad = 0.0;
    Tensor dseq;
};

BiGruBackward bigru_backward(const Tensor& seq, const BiGruParams& p,
                             const ActivationKind& candidate, const GruCache& cache_fwd,
                             const GruCache& cache_bwd, const Tensor& dout);

// Reverses row order: [steps, ch] -> [steps, ch].
Tensor reverse_rows(const Tensor& seq);

}  // namespace flowgru
