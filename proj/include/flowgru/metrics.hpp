#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace flowgru {

// k x k confusion counts, rows = true class, columns = predicted class.
struct ConfusionMatrix {
    std::size_t k = 0;
    std::vector<std::size_t> counts;  // row-major

    explicit ConfusionMatrix(std::size_t k_ = 0) : k(k_), counts(k_ * k_, 0) {}

    std::size_t& at(std::size_t truth, std::size_t pred) { return counts[truth * k + pred]; }
    std::size_t at(std::size_t truth, std::size_t pred) const { return counts[truth * k + pred]; }
    std::size_t total() const;
};

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& pred,
                          std::size_t k);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// One-vs-rest precision/recall/F1 per class plus the macro averages
// (unweighted means of the per-class values; macro F1 in particular is the
// mean of per-class F1 scores, not a harmonic combination of the macro
// precision and recall) and overall accuracy. Any 0/0 is reported as 0.
// Values are fractions in [0, 1]; rounding happens only when printing.
struct EvalReport {
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
};

EvalReport evaluate(const ConfusionMatrix& cm);

// "98.44%": fraction scaled to percent, two decimals.
std::string format_percent(double fraction);
// "+5.46" / "-0.12": difference of two fractions, in percentage points.
std::string format_signed_pp(double fraction_diff);

}  // namespace flowgru
