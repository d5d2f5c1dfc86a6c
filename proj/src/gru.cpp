#include "flowgru/gru.hpp"

#include <stdexcept>
#include <vector>

namespace flowgru {

GruParams GruParams::zeros(std::size_t units, std::size_t in) {
    GruParams p;
    p.w_z = Tensor::zeros({units, in});
    p.w_r = Tensor::zeros({units, in});
    p.w_h = Tensor::zeros({units, in});
    p.u_z = Tensor::zeros({units, units});
    p.u_r = Tensor::zeros({units, units});
    p.u_h = Tensor::zeros({units, units});
    p.b_z = Tensor::zeros({units});
    p.b_r = Tensor::zeros({units});
    p.b_h = Tensor::zeros({units});
    return p;
}

Tensor reverse_rows(const Tensor& seq) {
    if (seq.ndim() != 2) throw std::invalid_argument("reverse_rows expects [steps, ch]");
    const std::size_t steps = seq.dim(0);
    const std::size_t ch = seq.dim(1);
    Tensor out = Tensor::zeros({steps, ch});
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t c = 0; c < ch; ++c) {
            out.at(t, c) = seq.at(steps - 1 - t, c);
        }
    }
    return out;
}

namespace {

void check_gru_shapes(const Tensor& seq, const GruParams& p) {
    if (seq.ndim() != 2) throw std::invalid_argument("gru input must be [steps, in]");
    if (seq.dim(0) == 0) throw std::invalid_argument("gru over an empty sequence");
    const std::size_t in = seq.dim(1);
    const std::size_t units = p.units();
    auto want = [](const Tensor& t, std::size_t r, std::size_t c, const char* name) {
        if (t.ndim() != 2 || t.dim(0) != r || t.dim(1) != c) {
            throw std::invalid_argument(std::string("gru parameter ") + name +
                                        " has the wrong shape");
        }
    };
    want(p.w_z, units, in, "w_z");
    want(p.w_r, units, in, "w_r");
    want(p.w_h, units, in, "w_h");
    want(p.u_z, units, units, "u_z");
    want(p.u_r, units, units, "u_r");
    want(p.u_h, units, units, "u_h");
    if (p.b_r.numel() != units || p.b_h.numel() != units) {
        throw std::invalid_argument("gru bias lengths must equal units");
    }
}

// y = w x_t + u h + b, one row at a time. h may be null for the first step.
inline double cell_preact(const Tensor& w, const Tensor& u, const Tensor& b,
                          const double* x, const double* h, std::size_t in,
                          std::size_t units, std::size_t row) {
    double acc = b[row];
    for (std::size_t j = 0; j < in; ++j) acc += w.at(row, j) * x[j];
    if (h) {
        for (std::size_t j = 0; j < units; ++j) acc += u.at(row, j) * h[j];
    }
    return acc;
}

// Shape-checked by the callers; must not throw (runs inside OpenMP sections).
Tensor forward_core(const Tensor& seq, const GruParams& p, const ActivationKind& candidate,
                    GruCache& c) {
    const std::size_t steps = seq.dim(0);
    const std::size_t in = seq.dim(1);
    const std::size_t units = p.units();

    c.z = Tensor::zeros({steps, units});
    c.r = Tensor::zeros({steps, units});
    c.a_h = Tensor::zeros({steps, units});
    c.hhat = Tensor::zeros({steps, units});
    c.rh = Tensor::zeros({steps, units});
    c.h = Tensor::zeros({steps, units});

    std::vector<double> h_prev(units, 0.0);
    const auto sig = ActivationKind::sigmoid();
    for (std::size_t t = 0; t < steps; ++t) {
        const double* x = &seq.data[t * in];
        const double* hp = t == 0 ? nullptr : h_prev.data();
        for (std::size_t u = 0; u < units; ++u) {
            c.z.at(t, u) = detail::activate_unchecked(
                sig, cell_preact(p.w_z, p.u_z, p.b_z, x, hp, in, units, u));
            c.r.at(t, u) = detail::activate_unchecked(
                sig, cell_preact(p.w_r, p.u_r, p.b_r, x, hp, in, units, u));
        }
        for (std::size_t u = 0; u < units; ++u) {
            c.rh.at(t, u) = c.r.at(t, u) * (hp ? hp[u] : 0.0);
        }
        for (std::size_t u = 0; u < units; ++u) {
            const double a =
                cell_preact(p.w_h, p.u_h, p.b_h, x, &c.rh.data[t * units], in, units, u);
            c.a_h.at(t, u) = a;
            c.hhat.at(t, u) = detail::activate_unchecked(candidate, a);
        }
        for (std::size_t u = 0; u < units; ++u) {
            const double prev = hp ? hp[u] : 0.0;
            c.h.at(t, u) = (1.0 - c.z.at(t, u)) * prev + c.z.at(t, u) * c.hhat.at(t, u);
        }
        for (std::size_t u = 0; u < units; ++u) h_prev[u] = c.h.at(t, u);
    }
    return c.h;
}

GruBackward backward_core(const Tensor& seq, const GruParams& p, const ActivationKind& candidate,
                          const GruCache& cache, const Tensor& dout) {
    const std::size_t steps = seq.dim(0);
    const std::size_t in = seq.dim(1);
    const std::size_t units = p.units();

    GruBackward out;
    out.grads = GruParams::zeros(units, in);
    out.dseq = Tensor::zeros({steps, in});
    GruParams& g = out.grads;

    std::vector<double> carry(units, 0.0);  // dL/dh_t flowing from step t+1
    std::vector<double> da_z(units), da_r(units), da_h(units);
    std::vector<double> drh(units);

    for (std::size_t ti = steps; ti-- > 0;) {
        const std::size_t t = ti;
        const double* x = &seq.data[t * in];
        const double* h_prev = t == 0 ? nullptr : &cache.h.data[(t - 1) * units];

        for (std::size_t u = 0; u < units; ++u) {
            const double dh = dout.at(t, u) + carry[u];
            const double z = cache.z.at(t, u);
            const double hp = h_prev ? h_prev[u] : 0.0;

            const double dhhat = dh * z;
            da_h[u] = dhhat * detail::activate_grad_unchecked(candidate, cache.a_h.at(t, u));
            out.alpha_grad +=
                dhhat * detail::activate_alpha_grad_unchecked(candidate, cache.a_h.at(t, u));

            const double dz = dh * (cache.hhat.at(t, u) - hp);
            da_z[u] = dz * z * (1.0 - z);

            carry[u] = dh * (1.0 - z);  // direct path; gate paths added below
        }

        // drh = u_h^T da_h, then split into the reset gate and h_prev paths.
        for (std::size_t j = 0; j < units; ++j) {
            double acc = 0.0;
            for (std::size_t u = 0; u < units; ++u) acc += p.u_h.at(u, j) * da_h[u];
            drh[j] = acc;
        }
        for (std::size_t u = 0; u < units; ++u) {
            const double hp = h_prev ? h_prev[u] : 0.0;
            const double r = cache.r.at(t, u);
            const double dr = drh[u] * hp;
            da_r[u] = dr * r * (1.0 - r);
            carry[u] += drh[u] * r;
        }

        // Parameter gradients for this step.
        for (std::size_t u = 0; u < units; ++u) {
            for (std::size_t j = 0; j < in; ++j) {
                g.w_z.at(u, j) += da_z[u] * x[j];
                g.w_r.at(u, j) += da_r[u] * x[j];
                g.w_h.at(u, j) += da_h[u] * x[j];
            }
            if (h_prev) {
                for (std::size_t j = 0; j < units; ++j) {
                    g.u_z.at(u, j) += da_z[u] * h_prev[j];
                    g.u_r.at(u, j) += da_r[u] * h_prev[j];
                }
            }
            for (std::size_t j = 0; j < units; ++j) {
                g.u_h.at(u, j) += da_h[u] * cache.rh.at(t, j);
            }
            g.b_z[u] += da_z[u];
            g.b_r[u] += da_r[u];
            g.b_h[u] += da_h[u];
        }

        // Remaining h_prev paths through the z and r pre-activations.
        if (h_prev) {
            for (std::size_t j = 0; j < units; ++j) {
                double acc = 0.0;
                for (std::size_t u = 0; u < units; ++u) {
                    acc += p.u_z.at(u, j) * da_z[u] + p.u_r.at(u, j) * da_r[u];
                }
                carry[j] += acc;
            }
        }

        // Input gradient.
        for (std::size_t j = 0; j < in; ++j) {
            double acc = 0.0;
            for (std::size_t u = 0; u < units; ++u) {
                acc += p.w_z.at(u, j) * da_z[u] + p.w_r.at(u, j) * da_r[u] +
                       p.w_h.at(u, j) * da_h[u];
            }
            out.dseq.at(t, j) = acc;
        }
    }
    return out;
}

}  // namespace

Tensor gru_forward(const Tensor& seq, const GruParams& p, const ActivationKind& candidate,
                   GruCache* cache) {
    check_gru_shapes(seq, p);
    GruCache local;
    return forward_core(seq, p, candidate, cache ? *cache : local);
}

GruBackward gru_backward(const Tensor& seq, const GruParams& p, const ActivationKind& candidate,
                         const GruCache& cache, const Tensor& dout) {
    check_gru_shapes(seq, p);
    if (dout.ndim() != 2 || dout.dim(0) != seq.dim(0) || dout.dim(1) != p.units()) {
        throw std::invalid_argument("gru dout must be [steps, units]");
    }
    return backward_core(seq, p, candidate, cache, dout);
}

Tensor bigru_forward(const Tensor& seq, const BiGruParams& p, const ActivationKind& candidate,
                     GruCache* cache_fwd, GruCache* cache_bwd) {
    if (p.fwd.units() != p.bwd.units()) {
        throw std::invalid_argument("bigru directions must have the same unit count");
    }
    check_gru_shapes(seq, p.fwd);
    check_gru_shapes(seq, p.bwd);
    const std::size_t units = p.fwd.units();
    const Tensor rev = reverse_rows(seq);

    GruCache local_f, local_b;
    GruCache& cf = cache_fwd ? *cache_fwd : local_f;
    GruCache& cb = cache_bwd ? *cache_bwd : local_b;

    // The two directions are independent until the concatenation.
#pragma omp parallel sections
    {
#pragma omp section
        { forward_core(seq, p.fwd, candidate, cf); }
#pragma omp section
        { forward_core(rev, p.bwd, candidate, cb); }
    }

    const std::size_t steps = seq.dim(0);
    Tensor out = Tensor::zeros({steps, 2 * units});
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t u = 0; u < units; ++u) {
            out.at(t, u) = cf.h.at(t, u);
            out.at(t, units + u) = cb.h.at(steps - 1 - t, u);
        }
    }
    return out;
}

BiGruBackward bigru_backward(const Tensor& seq, const BiGruParams& p,
                             const ActivationKind& candidate, const GruCache& cache_fwd,
                             const GruCache& cache_bwd, const Tensor& dout) {
    if (p.fwd.units() != p.bwd.units()) {
        throw std::invalid_argument("bigru directions must have the same unit count");
    }
    check_gru_shapes(seq, p.fwd);
    check_gru_shapes(seq, p.bwd);
    const std::size_t steps = seq.dim(0);
    const std::size_t units = p.fwd.units();
    if (dout.ndim() != 2 || dout.dim(0) != steps || dout.dim(1) != 2 * units) {
        throw std::invalid_argument("bigru dout must be [steps, 2*units]");
    }

    Tensor dout_f = Tensor::zeros({steps, units});
    Tensor dout_b = Tensor::zeros({steps, units});  // in the backward direction's own time
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t u = 0; u < units; ++u) {
            dout_f.at(t, u) = dout.at(t, u);
            dout_b.at(steps - 1 - t, u) = dout.at(t, units + u);
        }
    }

    const Tensor rev = reverse_rows(seq);
    GruBackward bf, bb;
#pragma omp parallel sections
    {
#pragma omp section
        { bf = backward_core(seq, p.fwd, candidate, cache_fwd, dout_f); }
#pragma omp section
        { bb = backward_core(rev, p.bwd, candidate, cache_bwd, dout_b); }
    }

    BiGruBackward out;
    out.grads.fwd = std::move(bf.grads);
    out.grads.bwd = std::move(bb.grads);
    out.alpha_grad = bf.alpha_grad + bb.alpha_grad;
    const Tensor dseq_b = reverse_rows(bb.dseq);
    out.dseq = std::move(bf.dseq);
    for (std::size_t i = 0; i < out.dseq.numel(); ++i) out.dseq[i] += dseq_b[i];
    return out;
}

}  // namespace flowgru
