#pragma once

#include <cstddef>
#include <vector>

#include "flowgru/dataset.hpp"
#include "flowgru/model.hpp"

// Plain serial implementations of every kernel that runs under OpenMP in
// production. They use the same per-element accumulation order, so the two
// paths must agree bit for bit; the tests and the benchmark lean on that.
namespace flowgru::ref {

Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias,
                      const ActivationKind& act);

Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                     const ActivationKind& act);

BackwardResult batch_backward(const ModelSpec& spec, const ModelParams& params,
                              const std::vector<std::vector<double>>& xs,
                              const std::vector<std::size_t>& labels);

std::vector<int> predict_labels(const ModelSpec& spec, const ModelParams& params,
                                const LabeledDataset& ds);

ScalerParams standard_scale(LabeledDataset& ds);

std::vector<double> pearson_with_label(const LabeledDataset& ds);

// Brute-force k-nearest neighbors among rows of ds sharing the query's
// class (global row indices, ties to the lower index).
std::vector<std::size_t> knn_same_class(const LabeledDataset& ds, std::size_t query,
                                        std::size_t k);

}  // namespace flowgru::ref
