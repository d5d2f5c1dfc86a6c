#include "flowgru/activations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowgru/errors.hpp"

namespace flowgru {

ActivationKind ActivationKind::lrelu(double alpha) {
    if (!std::isfinite(alpha) || alpha <= 0.0) {
        throw std::domain_error("lrelu slope must be finite and > 0");
    }
    return {Act::LReLU, alpha};
}

ActivationKind ActivationKind::prelu(double alpha) {
    if (!std::isfinite(alpha)) {
        throw std::domain_error("prelu initial slope must be finite");
    }
    return {Act::PReLU, alpha};
}

ActivationKind ActivationKind::elu(double alpha) {
    if (!std::isfinite(alpha) || alpha <= 0.0) {
        throw std::domain_error("elu alpha must be finite and > 0");
    }
    return {Act::ELU, alpha};
}

namespace detail {

double sigmoid_stable(double x) noexcept {
    // Split on sign so exp never sees a large positive argument.
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus_stable(double x) noexcept {
    // ln(1 + e^x) = x + ln(1 + e^-x) for x > 0, which never overflows.
    if (x > 0.0) {
        return x + std::log1p(std::exp(-x));
    }
    return std::log1p(std::exp(x));
}

double activate_unchecked(const ActivationKind& act, double x) noexcept {
    switch (act.kind) {
        case Act::Sigmoid:
            return sigmoid_stable(x);
        case Act::TanH:
            return std::tanh(x);
        case Act::ReLU:
            return x > 0.0 ? x : 0.0;
        case Act::LReLU:
        case Act::PReLU:
            return std::max(act.alpha * x, x);
        case Act::ELU:
            return x > 0.0 ? x : act.alpha * std::expm1(x);
        case Act::Softplus:
            return softplus_stable(x);
        case Act::Mish:
            return x * std::tanh(softplus_stable(x));
        case Act::Linear:
            return x;
    }
    return x;
}

double activate_grad_unchecked(const ActivationKind& act, double x) noexcept {
    switch (act.kind) {
        case Act::Sigmoid: {
            const double s = sigmoid_stable(x);
            return s * (1.0 - s);
        }
        case Act::TanH: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Act::ReLU:
            return x >= 0.0 ? 1.0 : 0.0;
        case Act::LReLU:
        case Act::PReLU:
            // Matches the max(alpha*x, x) form: slope of whichever branch
            // wins; ties (x = 0) take the identity branch.
            return act.alpha * x > x ? act.alpha : 1.0;
        case Act::ELU:
            return x >= 0.0 ? 1.0 : act.alpha * std::exp(x);
        case Act::Softplus:
            return sigmoid_stable(x);
        case Act::Mish: {
            // d/dx [x tanh(softplus(x))] = tanh(sp) + x (1 - tanh^2(sp)) sigmoid(x)
            const double t = std::tanh(softplus_stable(x));
            return t + x * (1.0 - t * t) * sigmoid_stable(x);
        }
        case Act::Linear:
            return 1.0;
    }
    return 1.0;
}

double activate_alpha_grad_unchecked(const ActivationKind& act, double x) noexcept {
    if (act.kind != Act::PReLU) return 0.0;
    return act.alpha * x > x ? x : 0.0;
}

std::vector<double> softmax_unchecked(const std::vector<double>& logits) {
    std::vector<double> out(logits.size());
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

}  // namespace detail

static void check_finite_input(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("activation input must be finite");
    }
}

double activate(const ActivationKind& act, double x) {
    check_finite_input(x);
    return detail::activate_unchecked(act, x);
}

double activate_grad(const ActivationKind& act, double x) {
    check_finite_input(x);
    return detail::activate_grad_unchecked(act, x);
}

double activate_alpha_grad(const ActivationKind& act, double x) {
    check_finite_input(x);
    // f = max(alpha*x, x); alpha only matters where its branch strictly wins.
    return detail::activate_alpha_grad_unchecked(act, x);
}

std::vector<double> softmax(const std::vector<double>& logits) {
    if (logits.empty()) {
        throw std::domain_error("softmax of an empty vector");
    }
    for (double v : logits) check_finite_input(v);
    return detail::softmax_unchecked(logits);
}

std::string activation_name(const ActivationKind& act) {
    switch (act.kind) {
        case Act::Sigmoid: return "sigmoid";
        case Act::TanH: return "tanh";
        case Act::ReLU: return "relu";
        case Act::LReLU: return "lrelu";
        case Act::PReLU: return "prelu";
        case Act::ELU: return "elu";
        case Act::Softplus: return "softplus";
        case Act::Mish: return "mish";
        case Act::Linear: return "linear";
    }
    return "linear";
}

ActivationKind activation_from_name(const std::string& name) {
    if (name == "sigmoid") return ActivationKind::sigmoid();
    if (name == "tanh") return ActivationKind::tanh();
    if (name == "relu") return ActivationKind::relu();
    if (name == "lrelu") return ActivationKind::lrelu();
    if (name == "prelu") return ActivationKind::prelu();
    if (name == "elu") return ActivationKind::elu();
    if (name == "softplus") return ActivationKind::softplus();
    if (name == "mish") return ActivationKind::mish();
    if (name == "linear") return ActivationKind::linear();
    throw DataError("unknown activation '" + name +
                    "' (expected one of: sigmoid tanh relu lrelu prelu elu "
                    "softplus mish linear)");
}

}  // namespace flowgru
