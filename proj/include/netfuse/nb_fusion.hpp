#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netfuse/dataset.hpp"
#include "netfuse/mlp.hpp"
#include "netfuse/preprocess.hpp"
#include "netfuse/svm.hpp"

namespace netfuse::nb {

// Fusion features in canonical order: classifier decisions first, then the
// packet features in schema order.
enum class FusionFeature : int {
    ann_decision = 0,
    svm_decision = 1,
    protocol = 2,
    service = 3,
    flag = 4,
};

std::string_view feature_name(FusionFeature f);
FusionFeature feature_from_name(std::string_view name);

struct FusionFeatureSet {
    bool use_ann = false;
    bool use_svm = false;
    bool use_protocol = false;
    bool use_service = false;
    bool use_flag = false;

    std::vector<FusionFeature> active() const;
    void validate() const;  // at least one feature must be enabled
};

// the observed symbol of each active feature on one connection,
// in canonical order
using FusionVector = std::vector<std::pair<FusionFeature, std::string>>;

// Classifier decisions become binary symbols ("attack"/"normal"); packet
// features copy the raw categorical value. The record must carry the same
// normalization the classifiers were trained with.
FusionVector build_fusion_vector(const ConnectionRecord& rec, const MlpModel* ann,
                                 const SvmModel* svm_model, const FusionFeatureSet& fs,
                                 const EncodingPlan& plan);

// Laplace-smoothed symbol probabilities for one feature, per class. The
// vocabulary is what training saw; one extra smoothed slot is reserved for
// symbols first encountered at prediction time.
struct FeatureTable {
    FusionFeature feature = FusionFeature::ann_decision;
    std::vector<std::string> vocabulary;          // sorted, so fits are order-free
    std::array<std::vector<double>, 2> prob;      // [class][vocab slot]
    std::array<double, 2> unseen_prob = {0.0, 0.0};
    double weight = 1.0;  // exponent applied to this feature's likelihood

    double probability(ClassLabel cl, const std::string& symbol) const;

    bool operator==(const FeatureTable&) const = default;
};

struct FusionModel {
    std::array<double, 2> priors = {0.5, 0.5};  // indexed by ClassLabel
    std::vector<FeatureTable> tables;           // canonical feature order
    double alpha = 1.0;

    const FeatureTable& table(FusionFeature f) const;

    bool operator==(const FusionModel&) const = default;
};

// priors and conditional tables from smoothed counts:
//   P(s|cl) = (count(s,cl) + alpha) / (count(cl) + alpha*(V+1))
// with the +1 slot reserved for unseen symbols. weights maps a feature to its
// likelihood exponent (default 1.0 for every feature).
FusionModel fit(const std::vector<std::pair<FusionVector, ClassLabel>>& train, double alpha = 1.0,
                const std::map<FusionFeature, double>& weights = {});

// normalized class posterior, evaluated in log space
std::array<double, 2> posterior(const FusionModel& model, const FusionVector& v);

// argmax of the posterior; exact ties go to attack
ClassLabel decide(const FusionModel& model, const FusionVector& v);

}  // namespace netfuse::nb

namespace netfuse {
using FusionFeatureSet = nb::FusionFeatureSet;
using FusionVector = nb::FusionVector;
using NbFusionModel = nb::FusionModel;
}  // namespace netfuse
