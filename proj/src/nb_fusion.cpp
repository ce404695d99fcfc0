#include "netfuse/nb_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace netfuse::nb {

namespace {

constexpr std::size_t index_of(ClassLabel cl) { return static_cast<std::size_t>(cl); }

int packet_feature_index(FusionFeature f) {
    switch (f) {
        case FusionFeature::protocol: return 1;
        case FusionFeature::service: return 2;
        case FusionFeature::flag: return 3;
        default: return -1;
    }
}

}  // namespace

std::string_view feature_name(FusionFeature f) {
    switch (f) {
        case FusionFeature::ann_decision: return "ann_decision";
        case FusionFeature::svm_decision: return "svm_decision";
        case FusionFeature::protocol: return "protocol";
        case FusionFeature::service: return "service";
        case FusionFeature::flag: return "flag";
    }
    throw std::invalid_argument("unknown fusion feature");
}

FusionFeature feature_from_name(std::string_view name) {
    if (name == "ann_decision") return FusionFeature::ann_decision;
    if (name == "svm_decision") return FusionFeature::svm_decision;
    if (name == "protocol" || name == "protocol_type") return FusionFeature::protocol;
    if (name == "service") return FusionFeature::service;
    if (name == "flag") return FusionFeature::flag;
    throw std::invalid_argument("unknown fusion feature: " + std::string(name));
}

std::vector<FusionFeature> FusionFeatureSet::active() const {
    std::vector<FusionFeature> out;
    if (use_ann) out.push_back(FusionFeature::ann_decision);
    if (use_svm) out.push_back(FusionFeature::svm_decision);
    if (use_protocol) out.push_back(FusionFeature::protocol);
    if (use_service) out.push_back(FusionFeature::service);
    if (use_flag) out.push_back(FusionFeature::flag);
    return out;
}

void FusionFeatureSet::validate() const {
    if (active().empty()) {
        throw std::invalid_argument("fusion feature set must enable at least one feature");
    }
}

FusionVector build_fusion_vector(const ConnectionRecord& rec, const MlpModel* ann,
                                 const SvmModel* svm_model, const FusionFeatureSet& fs,
                                 const EncodingPlan& plan) {
    fs.validate();
    if (fs.use_ann && ann == nullptr) {
        throw std::invalid_argument("fusion feature set enables ANN but no model was given");
    }
    if (fs.use_svm && svm_model == nullptr) {
        throw std::invalid_argument("fusion feature set enables SVM but no model was given");
    }

    Eigen::VectorXd x;
    if (fs.use_ann || fs.use_svm) x = plan.encode(rec);

    FusionVector v;
    for (FusionFeature f : fs.active()) {
        switch (f) {
            case FusionFeature::ann_decision:
                v.emplace_back(f, std::string(label_name(mlp::decide(*ann, x))));
                break;
            case FusionFeature::svm_decision:
                v.emplace_back(f, std::string(label_name(svm::decide(*svm_model, x))));
                break;
            default:
                v.emplace_back(f, rec.symbol(packet_feature_index(f)));
                break;
        }
    }
    return v;
}

double FeatureTable::probability(ClassLabel cl, const std::string& symbol) const {
    const auto& row = prob[index_of(cl)];
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        if (vocabulary[i] == symbol) return row[i];
    }
    return unseen_prob[index_of(cl)];
}

const FeatureTable& FusionModel::table(FusionFeature f) const {
    for (const auto& t : tables) {
        if (t.feature == f) return t;
    }
    throw std::invalid_argument("model has no table for feature " + std::string(feature_name(f)));
}

FusionModel fit(const std::vector<std::pair<FusionVector, ClassLabel>>& train, double alpha,
                const std::map<FusionFeature, double>& weights) {
    if (train.empty()) throw std::invalid_argument("nb::fit: empty training set");
    if (!(alpha > 0.0)) throw std::invalid_argument("nb::fit: alpha must be positive");

    const std::vector<FusionFeature> features = [&] {
        std::vector<FusionFeature> fs;
        for (const auto& [feature, symbol] : train.front().first) fs.push_back(feature);
        return fs;
    }();
    for (const auto& [vec, label] : train) {
        if (vec.size() != features.size()) {
            throw std::invalid_argument("nb::fit: inconsistent feature ids across training vectors");
        }
        for (std::size_t i = 0; i < features.size(); ++i) {
            if (vec[i].first != features[i]) {
                throw std::invalid_argument(
                    "nb::fit: inconsistent feature ids across training vectors");
            }
        }
    }
    for (const auto& [feature, weight] : weights) {
        if (weight < 0.0) throw std::invalid_argument("nb::fit: feature weights must be >= 0");
    }

    FusionModel model;
    model.alpha = alpha;

    std::array<std::size_t, 2> class_count = {0, 0};
    for (const auto& [vec, label] : train) ++class_count[index_of(label)];
    const double n = static_cast<double>(train.size());
    for (std::size_t c = 0; c < 2; ++c) {
        model.priors[c] = (static_cast<double>(class_count[c]) + alpha) / (n + 2.0 * alpha);
    }

    for (std::size_t f = 0; f < features.size(); ++f) {
        FeatureTable table;
        table.feature = features[f];
        const auto weight_it = weights.find(features[f]);
        table.weight = weight_it != weights.end() ? weight_it->second : 1.0;

        // sorted vocabulary, so a permutation of the training list fits the
        // identical model
        std::map<std::string, std::array<double, 2>> counts;
        for (const auto& [vec, label] : train) {
            counts[vec[f].second][index_of(label)] += 1.0;
        }
        table.vocabulary.reserve(counts.size());
        for (const auto& [symbol, per_class] : counts) table.vocabulary.push_back(symbol);

        const double vocab = static_cast<double>(table.vocabulary.size());
        for (std::size_t c = 0; c < 2; ++c) {
            const double denom = static_cast<double>(class_count[c]) + alpha * (vocab + 1.0);
            table.prob[c].resize(table.vocabulary.size());
            for (std::size_t s = 0; s < table.vocabulary.size(); ++s) {
                table.prob[c][s] = (counts[table.vocabulary[s]][c] + alpha) / denom;
            }
            table.unseen_prob[c] = alpha / denom;
        }
        model.tables.push_back(std::move(table));
    }
    return model;
}

std::array<double, 2> posterior(const FusionModel& model, const FusionVector& v) {
    if (v.size() != model.tables.size()) {
        throw std::invalid_argument("nb::posterior: fusion vector does not match the model");
    }
    std::array<double, 2> log_score = {std::log(model.priors[0]), std::log(model.priors[1])};
    for (std::size_t f = 0; f < v.size(); ++f) {
        const auto& [feature, symbol] = v[f];
        const FeatureTable& table = model.tables[f];
        if (feature != table.feature) {
            throw std::invalid_argument("nb::posterior: feature id mismatch at position " +
                                        std::to_string(f));
        }
        for (std::size_t c = 0; c < 2; ++c) {
            log_score[c] += table.weight * std::log(table.probability(static_cast<ClassLabel>(c), symbol));
        }
    }
    // normalize across the two classes; this is the Bayes denominator
    const double peak = std::max(log_score[0], log_score[1]);
    const double e0 = std::exp(log_score[0] - peak);
    const double e1 = std::exp(log_score[1] - peak);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

ClassLabel decide(const FusionModel& model, const FusionVector& v) {
    const auto p = posterior(model, v);
    // posteriors within 1e-12 count as an exact tie; round-off from weight
    // rescaling must not flip the verdict
    const double diff = p[index_of(ClassLabel::attack)] - p[index_of(ClassLabel::normal)];
    return diff >= -1e-12 ? ClassLabel::attack : ClassLabel::normal;
}

}  // namespace netfuse::nb
