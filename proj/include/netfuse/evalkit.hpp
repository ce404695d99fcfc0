#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "netfuse/dataset.hpp"

namespace netfuse {

// Cell convention follows the source material for this task: with the default
// positive class "normal", tp counts truth-normal/predicted-normal, tn
// truth-attack/predicted-attack, fp truth-normal/predicted-attack, fn
// truth-attack/predicted-normal. Pass positive=attack for the conventional
// IDS orientation, which swaps (tp,tn) and (fp,fn).
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
    ConfusionMatrix swapped() const { return {tn, tp, fn, fp}; }

    bool operator==(const ConfusionMatrix&) const = default;
};

struct Metrics {
    double pcc = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
};

ConfusionMatrix tally(const std::vector<ClassLabel>& predictions,
                      const std::vector<ClassLabel>& truths,
                      ClassLabel positive = ClassLabel::normal);

// (tp+tn) / total; throws on an empty matrix
double pcc(const ConfusionMatrix& cm);

// tpr = tp/(tp+fn), fpr = fp/(fp+tn); throws naming the empty population
Metrics rates(const ConfusionMatrix& cm);

// "name,tpr,fpr,pcc" with two-decimal percentages
std::string metrics_csv_row(std::string_view name, const Metrics& m);
std::string metrics_csv_header();

// fraction rendered as a two-decimal percentage, e.g. 0.7956 -> "79.56"
std::string percent(double fraction);

}  // namespace netfuse
