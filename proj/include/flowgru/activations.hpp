#pragma once

#include <string>
#include <vector>

namespace flowgru {

enum class Act { Sigmoid, TanH, ReLU, LReLU, PReLU, ELU, Softplus, Mish, Linear };

// A scalar nonlinearity plus its parameter. LReLU and ELU carry a fixed
// positive slope; PReLU's slope is trainable, so the value stored here is
// only its initial value (the live value sits in the model parameters).
struct ActivationKind {
    Act kind = Act::Linear;
    double alpha = 0.0;

    static ActivationKind sigmoid() { return {Act::Sigmoid, 0.0}; }
    static ActivationKind tanh() { return {Act::TanH, 0.0}; }
    static ActivationKind relu() { return {Act::ReLU, 0.0}; }
    static ActivationKind lrelu(double alpha = 0.01);
    static ActivationKind prelu(double alpha = 0.25);
    static ActivationKind elu(double alpha = 1.0);
    static ActivationKind softplus() { return {Act::Softplus, 0.0}; }
    static ActivationKind mish() { return {Act::Mish, 0.0}; }
    static ActivationKind linear() { return {Act::Linear, 0.0}; }

    bool has_alpha() const {
        return kind == Act::LReLU || kind == Act::PReLU || kind == Act::ELU;
    }
    bool learnable_alpha() const { return kind == Act::PReLU; }
};

// f(x). Throws std::domain_error on non-finite input. Stable out to at
// least |x| = 1e3: the exp-based forms are rearranged so nothing overflows.
double activate(const ActivationKind& act, double x);

// f'(x). Kink convention: the ReLU family reports the right-hand
// derivative at 0, i.e. f'(0) = 1.
double activate_grad(const ActivationKind& act, double x);

// d f / d alpha, for training PReLU's slope. Zero for every other kind,
// and zero on PReLU's identity branch.
double activate_alpha_grad(const ActivationKind& act, double x);

// Numerically-stable softmax (max subtraction). Entries are finite, in
// (0, 1], and sum to 1. Throws std::domain_error on an empty vector or
// non-finite logits.
std::vector<double> softmax(const std::vector<double>& logits);

// Canonical lowercase names used by config files, the CLI and model files.
std::string activation_name(const ActivationKind& act);
// Parses a canonical name into a kind with default parameters.
// Throws DataError on an unknown name.
ActivationKind activation_from_name(const std::string& name);

namespace detail {
// No-throw cores for use inside compute kernels (OpenMP regions must not
// throw). Non-finite inputs propagate as NaN instead of raising.
double activate_unchecked(const ActivationKind& act, double x) noexcept;
double activate_grad_unchecked(const ActivationKind& act, double x) noexcept;
double activate_alpha_grad_unchecked(const ActivationKind& act, double x) noexcept;
std::vector<double> softmax_unchecked(const std::vector<double>& logits);
double sigmoid_stable(double x) noexcept;
double softplus_stable(double x) noexcept;
}  // namespace detail

}  // namespace flowgru
