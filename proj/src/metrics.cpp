#include "flowgru/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace flowgru {

std::size_t ConfusionMatrix::total() const {
    std::size_t n = 0;
    for (std::size_t c : counts) n += c;
    return n;
}

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& pred,
                          std::size_t k) {
    if (truth.size() != pred.size()) {
        throw std::invalid_argument("truth and prediction lengths differ");
    }
    if (k == 0) throw std::invalid_argument("confusion matrix needs k >= 1");
    ConfusionMatrix cm(k);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i], p = pred[i];
        if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= k ||
            static_cast<std::size_t>(p) >= k) {
            throw std::invalid_argument("label out of range at row " + std::to_string(i));
        }
        cm.at(static_cast<std::size_t>(t), static_cast<std::size_t>(p)) += 1;
    }
    return cm;
}

namespace {
// 0 when the denominator is 0, per the usual convention.
double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
}  // namespace

EvalReport evaluate(const ConfusionMatrix& cm) {
    if (cm.k == 0) throw std::invalid_argument("empty confusion matrix");
    EvalReport rep;
    rep.per_class.resize(cm.k);

    std::size_t correct = 0;
    for (std::size_t c = 0; c < cm.k; ++c) {
        const double tp = static_cast<double>(cm.at(c, c));
        double fp = 0.0, fn = 0.0;
        for (std::size_t o = 0; o < cm.k; ++o) {
            if (o == c) continue;
            fp += static_cast<double>(cm.at(o, c));
            fn += static_cast<double>(cm.at(c, o));
        }
        ClassMetrics& m = rep.per_class[c];
        m.precision = ratio(tp, tp + fp);
        m.recall = ratio(tp, tp + fn);
        m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
        correct += cm.at(c, c);

        rep.macro_precision += m.precision;
        rep.macro_recall += m.recall;
        rep.macro_f1 += m.f1;
    }
    const double k = static_cast<double>(cm.k);
    rep.macro_precision /= k;
    rep.macro_recall /= k;
    rep.macro_f1 /= k;
    rep.accuracy = ratio(static_cast<double>(correct), static_cast<double>(cm.total()));
    return rep;
}

std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
    return buf;
}

std::string format_signed_pp(double fraction_diff) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.2f", fraction_diff * 100.0);
    return buf;
}

}  // namespace flowgru
