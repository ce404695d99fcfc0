#include "netfuse/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "netfuse/rng.hpp"

namespace netfuse {

namespace {

// selected indices in ascending order so record order stays stable
std::vector<std::size_t> sorted_sample(Rng& rng, std::size_t n, std::size_t k) {
    auto picked = rng.sample_indices(n, k);
    std::sort(picked.begin(), picked.end());
    return picked;
}

Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.records.reserve(indices.size());
    for (std::size_t idx : indices) out.records.push_back(ds.records[idx]);
    return out;
}

std::vector<std::size_t> indices_of_class(const Dataset& ds, ClassLabel label) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        if (ds.records[i].label == label) out.push_back(i);
    }
    return out;
}

}  // namespace

void SplitSpec::validate() const {
    if (!(attack_ratio > 0.0 && attack_ratio < 1.0)) {
        throw std::invalid_argument("SplitSpec: attack_ratio must lie strictly in (0,1)");
    }
    if (eval_size < 2) {
        throw std::invalid_argument("SplitSpec: eval_size must be at least 2");
    }
}

Dataset balance(const Dataset& ds, const SplitSpec& spec) {
    spec.validate();
    const ClassCounts counts = class_counts(ds);
    if (counts.normal == 0 || counts.attack == 0) {
        throw std::runtime_error("balance: dataset is missing a class (normal=" +
                                 std::to_string(counts.normal) +
                                 ", attack=" + std::to_string(counts.attack) + ")");
    }

    const double r = spec.attack_ratio;
    const double current = static_cast<double>(counts.attack) / static_cast<double>(ds.size());

    std::size_t keep_attack = counts.attack;
    std::size_t keep_normal = counts.normal;
    if (current > r) {
        // attacks over-represented: keep all normals, downsample attacks
        keep_attack = static_cast<std::size_t>(
            std::llround(static_cast<double>(counts.normal) * r / (1.0 - r)));
        keep_attack = std::min(keep_attack, counts.attack);
    } else if (current < r) {
        keep_normal = static_cast<std::size_t>(
            std::llround(static_cast<double>(counts.attack) * (1.0 - r) / r));
        keep_normal = std::min(keep_normal, counts.normal);
    } else {
        return ds;  // already at the requested ratio
    }

    Rng rng(spec.seed);
    const auto normal_idx = indices_of_class(ds, ClassLabel::normal);
    const auto attack_idx = indices_of_class(ds, ClassLabel::attack);

    std::vector<std::size_t> keep;
    keep.reserve(keep_normal + keep_attack);
    if (keep_normal == counts.normal) {
        keep.insert(keep.end(), normal_idx.begin(), normal_idx.end());
    } else {
        for (std::size_t i : sorted_sample(rng, normal_idx.size(), keep_normal)) {
            keep.push_back(normal_idx[i]);
        }
    }
    if (keep_attack == counts.attack) {
        keep.insert(keep.end(), attack_idx.begin(), attack_idx.end());
    } else {
        for (std::size_t i : sorted_sample(rng, attack_idx.size(), keep_attack)) {
            keep.push_back(attack_idx[i]);
        }
    }
    std::sort(keep.begin(), keep.end());
    return take_rows(ds, keep);
}

Dataset thin_attack_categories(const Dataset& ds,
                               const std::map<std::string, std::size_t>& caps,
                               std::uint64_t seed) {
    for (const auto& [family, cap] : caps) {
        if (cap == 0) {
            throw std::invalid_argument("thin_attack_categories: cap for '" + family +
                                        "' must be positive");
        }
    }

    // group attack record positions by family, in dataset order
    std::map<std::string, std::vector<std::size_t>> by_family;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const auto& rec = ds.records[i];
        if (rec.label == ClassLabel::attack) {
            by_family[std::string(attack_family(rec.raw_label))].push_back(i);
        }
    }

    Rng rng(seed);
    std::vector<bool> drop(ds.records.size(), false);
    for (const auto& [family, positions] : by_family) {
        const auto cap_it = caps.find(family);
        if (cap_it == caps.end() || positions.size() <= cap_it->second) continue;
        std::vector<bool> survive(positions.size(), false);
        for (std::size_t i : rng.sample_indices(positions.size(), cap_it->second)) {
            survive[i] = true;
        }
        for (std::size_t i = 0; i < positions.size(); ++i) {
            if (!survive[i]) drop[positions[i]] = true;
        }
    }

    Dataset out;
    out.records.reserve(ds.records.size());
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        if (!drop[i]) out.records.push_back(ds.records[i]);
    }
    return out;
}

DataSplits split(const Dataset& ds, const SplitSpec& spec, SplitManifest* manifest) {
    spec.validate();

    std::size_t val_size = spec.eval_size;
    std::size_t test_size = spec.eval_size;
    if (spec.equal_thirds) {
        val_size = ds.size() / 3;
        test_size = ds.size() / 3;
    }
    if (ds.size() < val_size + test_size + 1) {
        throw std::runtime_error("split: need at least " + std::to_string(val_size + test_size + 1) +
                                 " records, have " + std::to_string(ds.size()));
    }

    const auto normal_idx = indices_of_class(ds, ClassLabel::normal);
    const auto attack_idx = indices_of_class(ds, ClassLabel::attack);

    const auto stratum_sizes = [&](std::size_t total) {
        const auto attacks = static_cast<std::size_t>(
            std::llround(static_cast<double>(total) * spec.attack_ratio));
        return std::pair<std::size_t, std::size_t>{total - attacks, attacks};  // {normal, attack}
    };
    const auto [val_normal, val_attack] = stratum_sizes(val_size);
    const auto [test_normal, test_attack] = stratum_sizes(test_size);

    if (normal_idx.size() < val_normal + test_normal) {
        throw std::runtime_error("split: not enough normal records for stratified sampling (need " +
                                 std::to_string(val_normal + test_normal) + ", have " +
                                 std::to_string(normal_idx.size()) + ")");
    }
    if (attack_idx.size() < val_attack + test_attack) {
        throw std::runtime_error("split: not enough attack records for stratified sampling (need " +
                                 std::to_string(val_attack + test_attack) + ", have " +
                                 std::to_string(attack_idx.size()) + ")");
    }

    // one seeded draw per class pool: the first val_* draws go to validation,
    // the next test_* to test, remainder to train
    Rng rng(spec.seed);
    const auto normal_draw = rng.sample_indices(normal_idx.size(), val_normal + test_normal);
    const auto attack_draw = rng.sample_indices(attack_idx.size(), val_attack + test_attack);

    std::vector<std::size_t> val_rows, test_rows;
    val_rows.reserve(val_size);
    test_rows.reserve(test_size);
    for (std::size_t i = 0; i < normal_draw.size(); ++i) {
        (i < val_normal ? val_rows : test_rows).push_back(normal_idx[normal_draw[i]]);
    }
    for (std::size_t i = 0; i < attack_draw.size(); ++i) {
        (i < val_attack ? val_rows : test_rows).push_back(attack_idx[attack_draw[i]]);
    }
    std::sort(val_rows.begin(), val_rows.end());
    std::sort(test_rows.begin(), test_rows.end());

    std::vector<bool> held(ds.size(), false);
    for (std::size_t i : val_rows) held[i] = true;
    for (std::size_t i : test_rows) held[i] = true;
    std::vector<std::size_t> train_rows;
    train_rows.reserve(ds.size() - val_size - test_size);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (!held[i]) train_rows.push_back(i);
    }

    if (manifest) {
        manifest->seed = spec.seed;
        manifest->attack_ratio = spec.attack_ratio;
        manifest->eval_size = spec.eval_size;
        manifest->train_indices = train_rows;
        manifest->validation_indices = val_rows;
        manifest->test_indices = test_rows;
    }

    DataSplits splits;
    splits.train = take_rows(ds, train_rows);
    splits.validation = take_rows(ds, val_rows);
    splits.test = take_rows(ds, test_rows);
    return splits;
}

DataSplits apply_manifest(const Dataset& ds, const SplitManifest& manifest) {
    const auto check = [&](const std::vector<std::size_t>& indices) {
        for (std::size_t i : indices) {
            if (i >= ds.size()) {
                throw std::runtime_error("manifest index " + std::to_string(i) +
                                         " out of range for dataset of " +
                                         std::to_string(ds.size()) + " records");
            }
        }
    };
    check(manifest.train_indices);
    check(manifest.validation_indices);
    check(manifest.test_indices);
    DataSplits splits;
    splits.train = take_rows(ds, manifest.train_indices);
    splits.validation = take_rows(ds, manifest.validation_indices);
    splits.test = take_rows(ds, manifest.test_indices);
    return splits;
}

std::string manifest_to_json(const SplitManifest& manifest) {
    nlohmann::json j;
    j["seed"] = manifest.seed;
    j["attack_ratio"] = manifest.attack_ratio;
    j["eval_size"] = manifest.eval_size;
    j["train_indices"] = manifest.train_indices;
    j["validation_indices"] = manifest.validation_indices;
    j["test_indices"] = manifest.test_indices;
    return j.dump(2);
}

SplitManifest manifest_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SplitManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.attack_ratio = j.at("attack_ratio").get<double>();
    m.eval_size = j.at("eval_size").get<std::size_t>();
    m.train_indices = j.at("train_indices").get<std::vector<std::size_t>>();
    m.validation_indices = j.at("validation_indices").get<std::vector<std::size_t>>();
    m.test_indices = j.at("test_indices").get<std::vector<std::size_t>>();
    return m;
}

void write_manifest(const SplitManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << manifest_to_json(manifest) << '\n';
}

SplitManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read manifest: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return manifest_from_json(buf.str());
}

NormStats fit_norm_stats(const Dataset& train) {
    if (train.empty()) throw std::runtime_error("fit_norm_stats: empty training split");
    NormStats stats;
    const double n = static_cast<double>(train.size());
    for (int f = 0; f < kFeatureCount; ++f) {
        if (!NormStats::has_stats(f)) continue;
        double sum = 0.0;
        for (const auto& rec : train.records) sum += rec.numeric[static_cast<std::size_t>(f)];
        const double mean = sum / n;
        double sq = 0.0;
        for (const auto& rec : train.records) {
            const double d = rec.numeric[static_cast<std::size_t>(f)] - mean;
            sq += d * d;
        }
        stats.mean[f] = mean;
        stats.stddev[f] = std::max(std::sqrt(sq / n), NormStats::kStddevFloor);
    }
    return stats;
}

Dataset apply_norm(const Dataset& ds, const NormStats& stats) {
    Dataset out = ds;
    for (auto& rec : out.records) {
        for (int f = 0; f < kFeatureCount; ++f) {
            if (!NormStats::has_stats(f)) continue;
            rec.numeric[static_cast<std::size_t>(f)] =
                (rec.numeric[static_cast<std::size_t>(f)] - stats.mean[f]) / stats.stddev[f];
        }
    }
    return out;
}

EncodingPlan EncodingPlan::fit(const Dataset& train) {
    EncodingPlan plan;
    for (const auto& rec : train.records) {
        for (int s = 0; s < kSymbolicCount; ++s) {
            const std::string& symbol = rec.symbols[static_cast<std::size_t>(s)];
            auto& index = plan.symbol_slot_[static_cast<std::size_t>(s)];
            if (index.emplace(symbol, static_cast<int>(index.size())).second) {
                plan.vocab_[static_cast<std::size_t>(s)].push_back(symbol);
            }
        }
    }
    int offset = 0;
    for (int f = 0; f < kFeatureCount; ++f) {
        plan.slot_[static_cast<std::size_t>(f)] = offset;
        const int slot = symbolic_slot(f);
        offset += slot < 0 ? 1 : static_cast<int>(plan.vocab_[static_cast<std::size_t>(slot)].size());
    }
    plan.dim_ = offset;
    return plan;
}

Eigen::VectorXd EncodingPlan::encode(const ConnectionRecord& rec) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
    for (int f = 0; f < kFeatureCount; ++f) {
        const int base = slot_[static_cast<std::size_t>(f)];
        const int slot = symbolic_slot(f);
        if (slot < 0) {
            v[base] = rec.numeric[static_cast<std::size_t>(f)];
        } else {
            const auto& index = symbol_slot_[static_cast<std::size_t>(slot)];
            const auto it = index.find(rec.symbols[static_cast<std::size_t>(slot)]);
            if (it != index.end()) v[base + it->second] = 1.0;
            // unknown symbol: the whole group stays zero
        }
    }
    return v;
}

Eigen::MatrixXd EncodingPlan::encode_dataset(const Dataset& ds) const {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(ds.size()), dim_);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        X.row(static_cast<Eigen::Index>(i)) = encode(ds.records[i]).transpose();
    }
    return X;
}

int EncodingPlan::slot_of(int feature_index) const {
    return slot_.at(static_cast<std::size_t>(feature_index));
}

int EncodingPlan::width_of(int feature_index) const {
    const int slot = symbolic_slot(feature_index);
    return slot < 0 ? 1 : static_cast<int>(vocab_[static_cast<std::size_t>(slot)].size());
}

const std::vector<std::string>& EncodingPlan::vocabulary(int feature_index) const {
    const int slot = symbolic_slot(feature_index);
    if (slot < 0) throw std::out_of_range("feature has no vocabulary");
    return vocab_[static_cast<std::size_t>(slot)];
}

}  // namespace netfuse
