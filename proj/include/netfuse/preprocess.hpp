#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "netfuse/dataset.hpp"

namespace netfuse {

struct SplitSpec {
    std::uint64_t seed = 0;
    double attack_ratio = 0.5;
    std::size_t eval_size = 1000;
    // split the balanced data into three equal-length parts instead of
    // eval_size/eval_size/remainder
    bool equal_thirds = false;

    void validate() const;
};

struct DataSplits {
    Dataset train;
    Dataset validation;
    Dataset test;
};

// Index lists into the dataset that was split, plus the spec that produced
// them; enough to re-run an experiment exactly.
struct SplitManifest {
    std::uint64_t seed = 0;
    double attack_ratio = 0.5;
    std::size_t eval_size = 1000;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> validation_indices;
    std::vector<std::size_t> test_indices;
};

// Downsample the majority class until the attack fraction hits
// spec.attack_ratio (+/- 1 record); the minority class is fully retained.
Dataset balance(const Dataset& ds, const SplitSpec& spec);

// Per attack family, keep at most caps[family] records (seeded draw without
// replacement); families without a cap and all normal records pass through.
Dataset thin_attack_categories(const Dataset& ds,
                               const std::map<std::string, std::size_t>& caps,
                               std::uint64_t seed);

// Stratified validation/test of exactly eval_size records each at
// attack_ratio; the remainder is train. Splits are pairwise disjoint and
// deterministic in (ds, spec). The optional manifest receives the index lists.
DataSplits split(const Dataset& ds, const SplitSpec& spec, SplitManifest* manifest = nullptr);

// Rebuild splits from a manifest's index lists.
DataSplits apply_manifest(const Dataset& ds, const SplitManifest& manifest);

std::string manifest_to_json(const SplitManifest& manifest);
SplitManifest manifest_from_json(const std::string& text);
void write_manifest(const SplitManifest& manifest, const std::string& path);
SplitManifest read_manifest(const std::string& path);

// Per-feature mean and population standard deviation over the numeric
// (continuous and binary) features; symbolic features carry no statistics.
// stddev is floored at kStddevFloor so constant columns stay divisible.
struct NormStats {
    static constexpr double kStddevFloor = 1e-9;

    Eigen::Array<double, kFeatureCount, 1> mean = Eigen::Array<double, kFeatureCount, 1>::Zero();
    Eigen::Array<double, kFeatureCount, 1> stddev = Eigen::Array<double, kFeatureCount, 1>::Ones();

    static bool has_stats(int feature_index) { return symbolic_slot(feature_index) < 0; }
};

// Fit on the training split only; applying these stats elsewhere is the
// caller's leakage guard.
NormStats fit_norm_stats(const Dataset& train);

// z-score every numeric feature; symbols and labels are untouched. Not
// idempotent: reapplying rescales again.
Dataset apply_norm(const Dataset& ds, const NormStats& stats);

// Maps records to fixed-length real vectors: numeric features keep one slot
// each in schema order, each symbolic feature expands to a one-hot group over
// its training vocabulary (first-seen order). Unknown symbols encode as an
// all-zero group.
class EncodingPlan {
public:
    static EncodingPlan fit(const Dataset& train);

    Eigen::VectorXd encode(const ConnectionRecord& rec) const;
    // one row per record
    Eigen::MatrixXd encode_dataset(const Dataset& ds) const;

    int dim() const { return dim_; }
    int slot_of(int feature_index) const;
    int width_of(int feature_index) const;
    const std::vector<std::string>& vocabulary(int feature_index) const;

private:
    std::array<std::vector<std::string>, kSymbolicCount> vocab_;
    std::array<std::unordered_map<std::string, int>, kSymbolicCount> symbol_slot_;
    std::array<int, kFeatureCount> slot_{};
    int dim_ = 0;
};

inline Eigen::VectorXd encode(const ConnectionRecord& rec, const EncodingPlan& plan) {
    return plan.encode(rec);
}

}  // namespace netfuse
