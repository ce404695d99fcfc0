#pragma once

#include <string>

#include "netfuse/mlp.hpp"
#include "netfuse/nb_fusion.hpp"
#include "netfuse/svm.hpp"

namespace netfuse {

// JSON model formats. Loading validates shapes (layer chaining for the MLP,
// table/vocabulary consistency for the fusion model) and rejects anything
// inconsistent.

std::string mlp_to_json(const MlpModel& model, const MlpConfig& cfg);
MlpModel mlp_from_json(const std::string& text, MlpConfig* cfg = nullptr);

std::string svm_to_json(const SvmModel& model, const SvmConfig& cfg);
SvmModel svm_from_json(const std::string& text, SvmConfig* cfg = nullptr);

std::string fusion_to_json(const NbFusionModel& model, const FusionFeatureSet& fs);
NbFusionModel fusion_from_json(const std::string& text, FusionFeatureSet* fs = nullptr);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace netfuse
