#include "netfuse/evalkit.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace netfuse {

ConfusionMatrix tally(const std::vector<ClassLabel>& predictions,
                      const std::vector<ClassLabel>& truths, ClassLabel positive) {
    if (predictions.size() != truths.size()) {
        throw std::invalid_argument("tally: " + std::to_string(predictions.size()) +
                                    " predictions vs " + std::to_string(truths.size()) +
                                    " truths");
    }
    if (predictions.empty()) {
        throw std::invalid_argument("tally: empty input");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const bool truth_pos = truths[i] == positive;
        const bool pred_pos = predictions[i] == positive;
        if (truth_pos && pred_pos) ++cm.tp;
        else if (!truth_pos && !pred_pos) ++cm.tn;
        else if (truth_pos && !pred_pos) ++cm.fp;
        else ++cm.fn;
    }
    return cm;
}

double pcc(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) throw std::domain_error("pcc: empty confusion matrix");
    return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
}

Metrics rates(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fn == 0) {
        throw std::domain_error("rates: tp+fn is zero (no records predicted as the positive class)");
    }
    if (cm.fp + cm.tn == 0) {
        throw std::domain_error("rates: fp+tn is zero (no records predicted as the negative class)");
    }
    Metrics m;
    m.pcc = pcc(cm);
    m.tpr = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    m.fpr = static_cast<double>(cm.fp) / static_cast<double>(cm.fp + cm.tn);
    return m;
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
    return buf;
}

std::string metrics_csv_header() { return "classifier,tpr,fpr,pcc"; }

std::string metrics_csv_row(std::string_view name, const Metrics& m) {
    std::string row(name);
    row += ',';
    row += percent(m.tpr);
    row += ',';
    row += percent(m.fpr);
    row += ',';
    row += percent(m.pcc);
    return row;
}

}  // namespace netfuse
