#include "flowgru/smote.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowgru/errors.hpp"
#include "flowgru/rng.hpp"

namespace flowgru {

std::vector<double> synthesize(std::span<const double> x, std::span<const double> neighbor,
                               double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::domain_error("interpolation factor must be in [0, 1]");
    }
    if (x.size() != neighbor.size()) {
        throw std::invalid_argument("interpolation endpoints differ in length");
    }
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        out[j] = x[j] + lambda * (neighbor[j] - x[j]);
    }
    return out;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        acc += d * d;
    }
    return acc;
}

// Positions (into members) of the k nearest members to members[query_pos],
// excluding itself; ties break toward the lower row index. members must be
// in ascending row order for the tie rule to mean anything.
std::vector<std::size_t> knn_positions(const LabeledDataset& ds,
                                       const std::vector<std::size_t>& members,
                                       std::size_t query_pos, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(members.size() - 1);
    const auto q = ds.row(members[query_pos]);
    for (std::size_t p = 0; p < members.size(); ++p) {
        if (p == query_pos) continue;
        dist.emplace_back(sq_dist(q, ds.row(members[p])), p);
    }
    const std::size_t kk = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    std::vector<std::size_t> out(kk);
    for (std::size_t i = 0; i < kk; ++i) out[i] = dist[i].second;
    return out;
}

}  // namespace

std::vector<std::size_t> knn_same_class(const LabeledDataset& ds, std::size_t query,
                                        std::size_t k) {
    if (query >= ds.rows()) throw std::invalid_argument("knn query row out of range");
    if (k == 0) throw std::domain_error("knn needs k >= 1");
    const int cls = ds.labels[query];
    std::vector<std::size_t> members;
    std::size_t query_pos = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (ds.labels[i] != cls) continue;
        if (i == query) query_pos = members.size();
        members.push_back(i);
    }
    if (members.size() < 2) {
        throw DataError("class '" + ds.class_names[static_cast<std::size_t>(cls)] +
                        "' has a single instance; cannot find neighbors");
    }
    std::vector<std::size_t> out;
    for (std::size_t p : knn_positions(ds, members, query_pos, k)) {
        out.push_back(members[p]);
    }
    return out;
}

ResampleResult resample(const LabeledDataset& ds, const SmoteConfig& cfg) {
    ds.validate();
    if (cfg.k == 0) throw std::domain_error("smote needs k >= 1");

    const auto hist = ds.class_histogram();
    std::vector<std::size_t> target(hist.size(), 0);
    if (cfg.targets.empty()) {
        const std::size_t majority = hist.empty() ? 0 : *std::max_element(hist.begin(), hist.end());
        target.assign(hist.size(), majority);
    } else {
        for (std::size_t c = 0; c < hist.size(); ++c) target[c] = hist[c];
        for (const auto& [name, count] : cfg.targets) {
            const auto it = std::find(ds.class_names.begin(), ds.class_names.end(), name);
            if (it == ds.class_names.end()) {
                throw DataError("resample target names unknown class '" + name + "'");
            }
            const std::size_t c = static_cast<std::size_t>(it - ds.class_names.begin());
            if (count < hist[c]) {
                throw DataError("resample target for class '" + name + "' (" +
                                std::to_string(count) + ") is below its current count (" +
                                std::to_string(hist[c]) + ")");
            }
            target[c] = count;
        }
    }

    ResampleResult res;
    res.data = ds;  // originals verbatim, first
    SeededRng rng(cfg.seed);

    for (std::size_t c = 0; c < hist.size(); ++c) {
        const std::size_t need = target[c] - hist[c];
        if (need == 0) continue;
        if (hist[c] < 2) {
            throw DataError("class '" + ds.class_names[c] +
                            "' has a single instance; cannot oversample it");
        }
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (ds.labels[i] == static_cast<int>(c)) members.push_back(i);
        }
        const std::size_t k_eff = std::min(cfg.k, members.size() - 1);

        // Neighbor lists are independent per member; compute them up front.
        std::vector<std::vector<std::size_t>> nn(members.size());
#pragma omp parallel for schedule(static)
        for (std::size_t p = 0; p < members.size(); ++p) {
            nn[p] = knn_positions(ds, members, p, k_eff);
        }

        for (std::size_t j = 0; j < need; ++j) {
            const std::size_t src_pos = j % members.size();
            const std::size_t nb_pos = nn[src_pos][rng.below(k_eff)];
            const double lambda = rng.uniform();
            SyntheticSample s;
            s.source_index = members[src_pos];
            s.neighbor_index = members[nb_pos];
            s.lambda = lambda;
            s.label = static_cast<int>(c);
            s.features = synthesize(ds.row(s.source_index), ds.row(s.neighbor_index), lambda);
            res.data.push_row(s.features, s.label);
            res.synthetics.push_back(std::move(s));
        }
    }
    return res;
}

}  // namespace flowgru
