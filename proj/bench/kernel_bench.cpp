// Times the OpenMP production kernels against their serial reference twins
// and checks that the two paths agree bit for bit while it is at it.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "flowgru/layers.hpp"
#include "flowgru/model.hpp"
#include "flowgru/reference.hpp"
#include "flowgru/rng.hpp"
#include "flowgru/smote.hpp"

using namespace flowgru;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_ms(F&& fn, int reps) {
    fn();  // warm up
    const double t0 = now_ms();
    for (int i = 0; i < reps; ++i) fn();
    return (now_ms() - t0) / reps;
}

Tensor random_tensor(std::vector<std::size_t> shape, SeededRng& rng, double scale = 1.0) {
    Tensor t = Tensor::zeros(std::move(shape));
    for (double& v : t.data) v = rng.uniform(-scale, scale);
    return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    double mx = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) mx = std::max(mx, std::abs(a[i] - b[i]));
    return mx;
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-18s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   max|diff| %g\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms, diff);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serial code\n\n");
#endif

    SeededRng rng(7);

    {
        const Tensor input = random_tensor({4096}, rng);
        const Tensor kernels = random_tensor({64, 3}, rng);
        const Tensor bias = random_tensor({64}, rng);
        const auto act = ActivationKind::mish();
        Tensor a, b;
        const double ts = time_ms([&] { a = ref::conv1d_forward(input, kernels, bias, act); }, 20);
        const double tp = time_ms([&] { b = conv1d_forward(input, kernels, bias, act); }, 20);
        report("conv1d", ts, tp, max_abs_diff(a, b));
    }

    {
        const Tensor x = random_tensor({1024}, rng);
        const Tensor w = random_tensor({1024, 1024}, rng, 0.05);
        const Tensor b = random_tensor({1024}, rng);
        const auto act = ActivationKind::relu();
        Tensor r1, r2;
        const double ts = time_ms([&] { r1 = ref::dense_forward(x, w, b, act); }, 20);
        const double tp = time_ms([&] { r2 = dense_forward(x, w, b, act); }, 20);
        report("dense", ts, tp, max_abs_diff(r1, r2));
    }

    {
        ModelSpec spec;
        spec.input_len = 20;
        spec.conv_filters = 32;
        spec.gru_units = 64;
        spec.dense_units = 128;
        spec.n_classes = 3;
        spec.hidden_activation = ActivationKind::mish();
        const ModelParams params = ModelParams::init(spec, 11);
        std::vector<std::vector<double>> xs;
        std::vector<std::size_t> labels;
        for (std::size_t i = 0; i < 64; ++i) {
            std::vector<double> x(spec.input_len);
            for (double& v : x) v = rng.uniform(-2.0, 2.0);
            xs.push_back(std::move(x));
            labels.push_back(i % spec.n_classes);
        }
        BackwardResult r1, r2;
        const double ts = time_ms([&] { r1 = ref::batch_backward(spec, params, xs, labels); }, 3);
        const double tp = time_ms([&] { r2 = batch_backward(spec, params, xs, labels); }, 3);
        report("batch_backward", ts, tp, params_max_abs_diff(r1.grads, r2.grads));
    }

    {
        LabeledDataset ds;
        ds.n_features = 32;
        ds.class_names = {"a", "b"};
        for (std::size_t j = 0; j < ds.n_features; ++j) {
            ds.feature_names.push_back("f" + std::to_string(j));
        }
        std::vector<double> row(ds.n_features);
        for (std::size_t i = 0; i < 2000; ++i) {
            for (double& v : row) v = rng.uniform(-1.0, 1.0);
            ds.push_row(row, static_cast<int>(i % 2));
        }
        std::vector<std::size_t> r1, r2;
        const double ts = time_ms([&] { r1 = ref::knn_same_class(ds, 17, 5); }, 50);
        const double tp = time_ms([&] { r2 = knn_same_class(ds, 17, 5); }, 50);
        report("knn", ts, tp, r1 == r2 ? 0.0 : 1.0);

        auto ds1 = ds;
        auto ds2 = ds;
        ScalerParams s1, s2;
        const double ss = time_ms([&] { auto t = ds; s1 = ref::standard_scale(t); }, 20);
        const double sp = time_ms([&] { auto t = ds; s2 = standard_scale(t); }, 20);
        ref::standard_scale(ds1);
        standard_scale(ds2);
        double dmax = 0.0;
        for (std::size_t i = 0; i < ds1.features.size(); ++i) {
            dmax = std::max(dmax, std::abs(ds1.features[i] - ds2.features[i]));
        }
        report("standard_scale", ss, sp, dmax);

        std::vector<double> p1, p2;
        const double cs = time_ms([&] { p1 = ref::pearson_with_label(ds); }, 20);
        const double cp = time_ms([&] { p2 = pearson_with_label(ds); }, 20);
        double pmax = 0.0;
        for (std::size_t i = 0; i < p1.size(); ++i) {
            pmax = std::max(pmax, std::abs(p1[i] - p2[i]));
        }
        report("pearson", cs, cp, pmax);
    }

    return 0;
}
