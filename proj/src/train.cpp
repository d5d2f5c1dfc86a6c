#include "flowgru/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "flowgru/errors.hpp"
#include "flowgru/rng.hpp"

namespace flowgru {

TrainResult train_model(const ModelSpec& spec, const LabeledDataset& train,
                        const TrainOptions& opts) {
    spec.validate();
    train.validate();
    if (train.rows() == 0) throw DataError("cannot train on an empty dataset");
    if (train.n_features != spec.input_len) {
        throw DataError("training data has " + std::to_string(train.n_features) +
                        " features but the model expects " + std::to_string(spec.input_len));
    }
    if (opts.epochs == 0 || opts.batch_size == 0) {
        throw DataError("epochs and batch size must be positive");
    }

    SeededRng base(opts.seed);
    TrainResult res;
    res.params = ModelParams::init(spec, base.fork(rng_role::init).seed());
    AdamState adam = AdamState::zeros(spec);
    SeededRng order_rng = base.fork(rng_role::batch_order);

    std::vector<std::size_t> order(train.rows());
    std::iota(order.begin(), order.end(), 0);

    std::vector<std::vector<double>> xs;
    std::vector<std::size_t> ys;
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        order_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
            const std::size_t stop = std::min(order.size(), start + opts.batch_size);
            xs.clear();
            ys.clear();
            for (std::size_t i = start; i < stop; ++i) {
                xs.push_back(train.row_vec(order[i]));
                ys.push_back(static_cast<std::size_t>(train.labels[order[i]]));
            }
            BackwardResult step = batch_backward(spec, res.params, xs, ys);
            if (!std::isfinite(step.loss)) {
                throw TrainingDiverged(epoch + 1, "training diverged at epoch " +
                                                      std::to_string(epoch + 1) + ", step " +
                                                      std::to_string(res.loss_trace.size() + 1) +
                                                      ": loss is not finite");
            }
            adam_step(adam, res.params, step.grads, opts.adam);
            res.loss_trace.push_back(step.loss);
        }
    }
    return res;
}

std::vector<int> predict_labels(const ModelSpec& spec, const ModelParams& params,
                                const LabeledDataset& ds) {
    spec.validate();
    if (ds.n_features != spec.input_len) {
        throw DataError("evaluation data has " + std::to_string(ds.n_features) +
                        " features but the model expects " + std::to_string(spec.input_len));
    }
    std::vector<int> pred(ds.rows(), 0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        ForwardCache c;
        const std::vector<double> x = ds.row_vec(i);
        const std::vector<double> p = model_forward(spec, params, x, &c);
        std::size_t best = 0;
        for (std::size_t k = 1; k < p.size(); ++k) {
            if (p[k] > p[best]) best = k;  // ties keep the lower class id
        }
        pred[i] = static_cast<int>(best);
    }
    return pred;
}

}  // namespace flowgru
