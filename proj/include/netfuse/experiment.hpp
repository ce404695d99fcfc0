#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netfuse/dataset.hpp"
#include "netfuse/evalkit.hpp"
#include "netfuse/mlp.hpp"
#include "netfuse/nb_fusion.hpp"
#include "netfuse/preprocess.hpp"
#include "netfuse/svm.hpp"

namespace netfuse {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

// default per-family cap for attack-category thinning
inline constexpr std::size_t kDefaultThinningCap = 11656;

struct ExperimentRow {
    enum class Kind { ann, svm, fusion };
    std::string name;
    Kind kind = Kind::fusion;
    FusionFeatureSet features;  // fusion rows only
};

struct ThinningConfig {
    bool enabled = true;
    // empty means every attack family capped at kDefaultThinningCap
    std::map<std::string, std::size_t> caps;
};

struct ExperimentConfig {
    std::string dataset_path;
    std::optional<std::size_t> subsample;  // seeded subsample drawn right after parsing
    ThinningConfig thinning;
    SplitSpec split;
    MlpConfig mlp;
    SvmConfig svm;
    double alpha = 1.0;
    bool pcc_weighting = false;  // classifier-decision exponents = validation PCC
    std::vector<ExperimentRow> rows;
    std::string output_dir = ".";
    std::vector<std::string> formats = {"csv", "json"};  // csv | json | plot-data

    void validate() const;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

// Everything derived from the dataset before any model training. Statistics
// and vocabularies come from the train split alone.
struct PreparedData {
    Dataset balanced;  // what the manifest indices refer to
    SplitManifest manifest;
    DataSplits splits;       // raw records
    DataSplits normalized;   // numerics z-scored with train statistics
    NormStats stats;
    EncodingPlan plan;
    Eigen::MatrixXd train_x, validation_x, test_x;
    std::vector<ClassLabel> train_y, validation_y, test_y;
};

PreparedData prepare_data(const ExperimentConfig& cfg, const Dataset& parsed);

struct RowResult {
    std::string name;
    ConfusionMatrix confusion;  // positive = normal
    Metrics paper;              // rates under the paper orientation
    Metrics attack_positive;    // rates with the matrix cells swapped
};

struct FusionDominance {
    std::string best_fusion_row;  // lowest paper-orientation FPR among fusion rows
    bool fpr_not_above_bases = false;
    bool tpr_within_half_point = false;  // >= max(base TPRs) - 0.5pp
    bool holds = false;
};

struct ExperimentReport {
    std::string version;
    ExperimentConfig config;
    SplitManifest manifest;
    double ann_validation_pcc = 0.0;
    double svm_validation_pcc = 0.0;
    std::vector<RowResult> rows;
    std::optional<FusionDominance> dominance;
};

// parse -> thin -> balance -> split -> fit stats/encoding on train -> train
// both base classifiers -> measure validation PCC -> fit one NB model per
// fusion row on train fusion vectors -> evaluate every row on the test split
ExperimentReport run_experiment(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& parsed);

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
std::string report_to_csv(const ExperimentReport& report);

// report.json / report.csv / plot_data.csv + plot_spec.json / split manifest,
// per cfg.formats; all content is rendered before the first byte is written
void write_report(const ExperimentReport& report, const std::string& output_dir);

// plot-ready CSV of (row, tpr, fpr, pcc) plus a self-contained scatter
// description in JSON
void emit_plot_data(const ExperimentReport& report, const std::string& csv_path,
                    const std::string& spec_path);
std::string plot_data_csv(const ExperimentReport& report);
std::string plot_spec_json(const ExperimentReport& report);

}  // namespace netfuse
