#include "flowgru/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowgru/errors.hpp"

namespace flowgru::ref {

Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias,
                      const ActivationKind& act) {
    const std::size_t len = input.ndim() == 1 ? input.dim(0) : input.dim(0);
    if (input.ndim() == 2 && input.dim(1) != 1) {
        throw std::invalid_argument("conv1d input must be [len] or [len, 1]");
    }
    const std::size_t filters = kernels.dim(0);
    const std::size_t ksize = kernels.dim(1);
    if (len < ksize) throw std::invalid_argument("conv1d input shorter than the kernel");
    const std::size_t out_len = len - ksize + 1;

    Tensor out = Tensor::zeros({out_len, filters});
    for (std::size_t p = 0; p < out_len; ++p) {
        for (std::size_t f = 0; f < filters; ++f) {
            double acc = bias[f];
            for (std::size_t k = 0; k < ksize; ++k) {
                acc += kernels.at(f, k) * input[p + k];
            }
            out.at(p, f) = detail::activate_unchecked(act, acc);
        }
    }
    return out;
}

Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                     const ActivationKind& act) {
    const std::size_t out_n = w.dim(0);
    const std::size_t in_n = w.dim(1);
    if (x.numel() != in_n) throw std::invalid_argument("dense input length mismatch");
    Tensor out = Tensor::zeros({out_n});
    for (std::size_t i = 0; i < out_n; ++i) {
        double acc = b[i];
        for (std::size_t j = 0; j < in_n; ++j) acc += w.at(i, j) * x[j];
        out[i] = detail::activate_unchecked(act, acc);
    }
    return out;
}

BackwardResult batch_backward(const ModelSpec& spec, const ModelParams& params,
                              const std::vector<std::vector<double>>& xs,
                              const std::vector<std::size_t>& labels) {
    if (xs.empty() || xs.size() != labels.size()) {
        throw std::invalid_argument("bad batch");
    }
    BackwardResult total;
    total.grads = ModelGrads::zeros(spec);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        BackwardResult one = model_backward(spec, params, xs[i], labels[i]);
        total.loss += one.loss;
        params_add(total.grads, one.grads);
    }
    const double inv = 1.0 / static_cast<double>(xs.size());
    total.loss *= inv;
    params_scale(total.grads, inv);
    return total;
}

std::vector<int> predict_labels(const ModelSpec& spec, const ModelParams& params,
                                const LabeledDataset& ds) {
    std::vector<int> pred(ds.rows(), 0);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const std::vector<double> p = model_forward(spec, params, ds.row_vec(i));
        std::size_t best = 0;
        for (std::size_t k = 1; k < p.size(); ++k) {
            if (p[k] > p[best]) best = k;
        }
        pred[i] = static_cast<int>(best);
    }
    return pred;
}

ScalerParams standard_scale(LabeledDataset& ds) {
    const std::size_t n = ds.rows();
    const std::size_t cols = ds.n_features;
    if (n < 2) throw DataError("standard scaling needs at least 2 rows");
    ScalerParams out;
    out.mean.assign(cols, 0.0);
    out.stddev.assign(cols, 0.0);
    out.degenerate.assign(cols, false);
    for (std::size_t j = 0; j < cols; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += ds.features[i * cols + j];
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = ds.features[i * cols + j] - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        out.mean[j] = mean;
        out.stddev[j] = sd;
        if (sd < 1e-12) {
            out.degenerate[j] = true;
            for (std::size_t i = 0; i < n; ++i) ds.features[i * cols + j] = 0.0;
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                ds.features[i * cols + j] = (ds.features[i * cols + j] - mean) / sd;
            }
        }
    }
    return out;
}

std::vector<double> pearson_with_label(const LabeledDataset& ds) {
    const std::size_t n = ds.rows();
    const std::size_t cols = ds.n_features;
    if (n == 0) throw DataError("correlation over an empty dataset");
    double ymean = 0.0;
    for (int l : ds.labels) ymean += static_cast<double>(l);
    ymean /= static_cast<double>(n);
    double yss = 0.0;
    for (int l : ds.labels) {
        const double d = static_cast<double>(l) - ymean;
        yss += d * d;
    }
    const double ysd = std::sqrt(yss / static_cast<double>(n));

    std::vector<double> r(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
        double xmean = 0.0;
        for (std::size_t i = 0; i < n; ++i) xmean += ds.features[i * cols + j];
        xmean /= static_cast<double>(n);
        double xss = 0.0, cross = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = ds.features[i * cols + j] - xmean;
            xss += dx * dx;
            cross += dx * (static_cast<double>(ds.labels[i]) - ymean);
        }
        const double xsd = std::sqrt(xss / static_cast<double>(n));
        r[j] = (xsd < 1e-12 || ysd < 1e-12)
                   ? 0.0
                   : cross / (static_cast<double>(n) * xsd * ysd);
    }
    return r;
}

std::vector<std::size_t> knn_same_class(const LabeledDataset& ds, std::size_t query,
                                        std::size_t k) {
    if (query >= ds.rows()) throw std::invalid_argument("knn query row out of range");
    const int cls = ds.labels[query];
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (i == query || ds.labels[i] != cls) continue;
        double acc = 0.0;
        const auto a = ds.row(query);
        const auto b = ds.row(i);
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double d = a[j] - b[j];
            acc += d * d;
        }
        dist.emplace_back(acc, i);
    }
    if (dist.empty()) {
        throw DataError("class '" + ds.class_names[static_cast<std::size_t>(cls)] +
                        "' has a single instance; cannot find neighbors");
    }
    std::sort(dist.begin(), dist.end());
    const std::size_t kk = std::min(k, dist.size());
    std::vector<std::size_t> out(kk);
    for (std::size_t i = 0; i < kk; ++i) out[i] = dist[i].second;
    return out;
}

}  // namespace flowgru::ref
