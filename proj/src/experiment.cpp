#include "netfuse/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "netfuse/model_io.hpp"
#include "netfuse/rng.hpp"

namespace netfuse {

namespace {

using nlohmann::json;

// stage seeds are derived from the split seed so one seed pins the whole run
constexpr std::uint64_t kSubsampleSeedOffset = 101;
constexpr std::uint64_t kThinSeedOffset = 202;
constexpr std::uint64_t kBalanceSeedOffset = 303;

template <class F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
    }
}

ExperimentRow::Kind row_kind_from_name(const std::string& kind) {
    if (kind == "ann") return ExperimentRow::Kind::ann;
    if (kind == "svm") return ExperimentRow::Kind::svm;
    if (kind == "fusion") return ExperimentRow::Kind::fusion;
    throw std::runtime_error("config: unknown row kind '" + kind + "'");
}

std::string row_kind_name(ExperimentRow::Kind kind) {
    switch (kind) {
        case ExperimentRow::Kind::ann: return "ann";
        case ExperimentRow::Kind::svm: return "svm";
        case ExperimentRow::Kind::fusion: return "fusion";
    }
    return "fusion";
}

Dataset subsample(const Dataset& ds, std::size_t n, std::uint64_t seed) {
    if (n >= ds.size()) return ds;
    Rng rng(seed);
    auto picked = rng.sample_indices(ds.size(), n);
    std::sort(picked.begin(), picked.end());
    Dataset out;
    out.records.reserve(n);
    for (std::size_t i : picked) out.records.push_back(ds.records[i]);
    return out;
}

std::vector<ClassLabel> labels_of(const Dataset& ds) {
    std::vector<ClassLabel> y;
    y.reserve(ds.size());
    for (const auto& rec : ds.records) y.push_back(rec.label);
    return y;
}

// hard decisions of both base classifiers over encoded rows
struct Decisions {
    std::vector<ClassLabel> ann;
    std::vector<ClassLabel> svm;
};

Decisions decide_all(const MlpModel& ann, const SvmModel& svm_model, const Eigen::MatrixXd& X) {
    Decisions d;
    const Eigen::VectorXd scores = mlp::score_all(ann, X);
    d.ann.reserve(static_cast<std::size_t>(X.rows()));
    d.svm.reserve(static_cast<std::size_t>(X.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        d.ann.push_back(scores[i] >= 0.5 ? ClassLabel::attack : ClassLabel::normal);
        const double m = svm_model.weights.dot(X.row(i)) + svm_model.bias;
        d.svm.push_back(m >= 0.0 ? ClassLabel::attack : ClassLabel::normal);
    }
    return d;
}

// fusion vectors for a whole split, from cached decisions and raw symbols
std::vector<FusionVector> assemble_fusion_vectors(const Dataset& raw, const Decisions& decisions,
                                                  const FusionFeatureSet& fs) {
    std::vector<FusionVector> out;
    out.reserve(raw.size());
    const auto active = fs.active();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        FusionVector v;
        v.reserve(active.size());
        for (nb::FusionFeature f : active) {
            switch (f) {
                case nb::FusionFeature::ann_decision:
                    v.emplace_back(f, std::string(label_name(decisions.ann[i])));
                    break;
                case nb::FusionFeature::svm_decision:
                    v.emplace_back(f, std::string(label_name(decisions.svm[i])));
                    break;
                case nb::FusionFeature::protocol:
                    v.emplace_back(f, raw.records[i].symbols[0]);
                    break;
                case nb::FusionFeature::service:
                    v.emplace_back(f, raw.records[i].symbols[1]);
                    break;
                case nb::FusionFeature::flag:
                    v.emplace_back(f, raw.records[i].symbols[2]);
                    break;
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

RowResult evaluate_row(const std::string& name, const std::vector<ClassLabel>& predictions,
                       const std::vector<ClassLabel>& truths) {
    RowResult row;
    row.name = name;
    row.confusion = tally(predictions, truths, ClassLabel::normal);
    row.paper = rates(row.confusion);
    row.attack_positive = rates(row.confusion.swapped());
    return row;
}

json metrics_to_json(const Metrics& m) {
    return {{"tpr", m.tpr}, {"fpr", m.fpr}, {"pcc", m.pcc},
            {"tpr_percent", percent(m.tpr)}, {"fpr_percent", percent(m.fpr)},
            {"pcc_percent", percent(m.pcc)}};
}

Metrics metrics_from_json(const json& j) {
    Metrics m;
    m.tpr = j.at("tpr").get<double>();
    m.fpr = j.at("fpr").get<double>();
    m.pcc = j.at("pcc").get<double>();
    return m;
}

json feature_set_to_json(const FusionFeatureSet& fs) {
    json packet = json::array();
    if (fs.use_protocol) packet.push_back("protocol");
    if (fs.use_service) packet.push_back("service");
    if (fs.use_flag) packet.push_back("flag");
    return {{"use_ann", fs.use_ann}, {"use_svm", fs.use_svm}, {"packet_features", packet}};
}

FusionFeatureSet feature_set_from_json(const json& j) {
    FusionFeatureSet fs;
    fs.use_ann = j.value("use_ann", false);
    fs.use_svm = j.value("use_svm", false);
    for (const auto& name : j.value("packet_features", json::array())) {
        switch (nb::feature_from_name(name.get<std::string>())) {
            case nb::FusionFeature::protocol: fs.use_protocol = true; break;
            case nb::FusionFeature::service: fs.use_service = true; break;
            case nb::FusionFeature::flag: fs.use_flag = true; break;
            default:
                throw std::runtime_error("config: packet_features accepts protocol/service/flag");
        }
    }
    return fs;
}

}  // namespace

void ExperimentConfig::validate() const {
    split.validate();
    mlp.validate();
    svm.validate();
    if (!(alpha > 0.0)) throw std::runtime_error("config: alpha must be positive");
    if (rows.empty()) throw std::runtime_error("config: rows must not be empty");
    for (const auto& row : rows) {
        if (row.name.empty()) throw std::runtime_error("config: every row needs a name");
        if (row.kind == ExperimentRow::Kind::fusion) row.features.validate();
    }
    for (const auto& f : formats) {
        if (f != "csv" && f != "json" && f != "plot-data") {
            throw std::runtime_error("config: unknown report format '" + f + "'");
        }
    }
}

ExperimentConfig config_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.dataset_path = j.value("dataset_path", "");
    if (j.contains("subsample") && !j.at("subsample").is_null()) {
        cfg.subsample = j.at("subsample").get<std::size_t>();
    }
    if (j.contains("thinning")) {
        const json& t = j.at("thinning");
        cfg.thinning.enabled = t.value("enabled", true);
        if (t.contains("caps")) {
            for (const auto& [family, cap] : t.at("caps").items()) {
                cfg.thinning.caps[family] = cap.get<std::size_t>();
            }
        }
    }
    if (j.contains("split")) {
        const json& s = j.at("split");
        cfg.split.seed = s.value("seed", std::uint64_t{0});
        cfg.split.attack_ratio = s.value("attack_ratio", 0.5);
        cfg.split.eval_size = s.value("eval_size", std::size_t{1000});
        cfg.split.equal_thirds = s.value("equal_thirds", false);
    }
    if (j.contains("mlp")) {
        const json& m = j.at("mlp");
        cfg.mlp.hidden_sizes = m.value("hidden_sizes", std::vector<int>{40});
        cfg.mlp.learning_rate = m.value("learning_rate", 0.01);
        cfg.mlp.epochs = m.value("epochs", 50);
        cfg.mlp.batch_size = m.value("batch_size", 32);
        cfg.mlp.seed = m.value("seed", std::uint64_t{0});
    }
    if (j.contains("svm")) {
        const json& s = j.at("svm");
        cfg.svm.lambda = s.value("lambda", 1e-4);
        cfg.svm.epochs = s.value("epochs", 20);
        cfg.svm.seed = s.value("seed", std::uint64_t{0});
        cfg.svm.project = s.value("project", false);
    }
    cfg.alpha = j.value("alpha", 1.0);
    cfg.pcc_weighting = j.value("pcc_weighting", false);
    cfg.rows.clear();
    for (const auto& r : j.value("rows", json::array())) {
        ExperimentRow row;
        row.name = r.at("name").get<std::string>();
        row.kind = row_kind_from_name(r.value("kind", "fusion"));
        if (row.kind == ExperimentRow::Kind::fusion) {
            row.features = feature_set_from_json(r);
        }
        cfg.rows.push_back(std::move(row));
    }
    cfg.output_dir = j.value("output_dir", ".");
    cfg.formats = j.value("formats", std::vector<std::string>{"csv", "json"});
    cfg.validate();
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["dataset_path"] = cfg.dataset_path;
    if (cfg.subsample) {
        j["subsample"] = *cfg.subsample;
    } else {
        j["subsample"] = nullptr;
    }
    json caps = json::object();
    for (const auto& [family, cap] : cfg.thinning.caps) caps[family] = cap;
    j["thinning"] = {{"enabled", cfg.thinning.enabled}, {"caps", caps}};
    j["split"] = {{"seed", cfg.split.seed},
                  {"attack_ratio", cfg.split.attack_ratio},
                  {"eval_size", cfg.split.eval_size},
                  {"equal_thirds", cfg.split.equal_thirds}};
    j["mlp"] = {{"hidden_sizes", cfg.mlp.hidden_sizes},
                {"learning_rate", cfg.mlp.learning_rate},
                {"epochs", cfg.mlp.epochs},
                {"batch_size", cfg.mlp.batch_size},
                {"seed", cfg.mlp.seed}};
    j["svm"] = {{"lambda", cfg.svm.lambda},
                {"epochs", cfg.svm.epochs},
                {"seed", cfg.svm.seed},
                {"project", cfg.svm.project}};
    j["alpha"] = cfg.alpha;
    j["pcc_weighting"] = cfg.pcc_weighting;
    json rows = json::array();
    for (const auto& row : cfg.rows) {
        json r = {{"name", row.name}, {"kind", row_kind_name(row.kind)}};
        if (row.kind == ExperimentRow::Kind::fusion) {
            const json fs = feature_set_to_json(row.features);
            r.update(fs);
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["output_dir"] = cfg.output_dir;
    j["formats"] = cfg.formats;
    return j.dump(2);
}

PreparedData prepare_data(const ExperimentConfig& cfg, const Dataset& parsed) {
    cfg.validate();
    PreparedData data;

    Dataset working = parsed;
    if (cfg.subsample) {
        working = stage("subsample", [&] {
            return subsample(working, *cfg.subsample, cfg.split.seed + kSubsampleSeedOffset);
        });
    }
    if (cfg.thinning.enabled) {
        working = stage("thin", [&] {
            std::map<std::string, std::size_t> caps = cfg.thinning.caps;
            if (caps.empty()) {
                for (const char* family : {"dos", "probe", "r2l", "u2r", "other"}) {
                    caps[family] = kDefaultThinningCap;
                }
            }
            return thin_attack_categories(working, caps, cfg.split.seed + kThinSeedOffset);
        });
    }
    data.balanced = stage("balance", [&] {
        SplitSpec spec = cfg.split;
        spec.seed = cfg.split.seed + kBalanceSeedOffset;
        return balance(working, spec);
    });
    data.splits = stage("split", [&] { return split(data.balanced, cfg.split, &data.manifest); });
    data.stats = stage("fit_norm_stats", [&] { return fit_norm_stats(data.splits.train); });
    data.normalized.train = apply_norm(data.splits.train, data.stats);
    data.normalized.validation = apply_norm(data.splits.validation, data.stats);
    data.normalized.test = apply_norm(data.splits.test, data.stats);
    data.plan = stage("encoding", [&] { return EncodingPlan::fit(data.normalized.train); });
    data.train_x = data.plan.encode_dataset(data.normalized.train);
    data.validation_x = data.plan.encode_dataset(data.normalized.validation);
    data.test_x = data.plan.encode_dataset(data.normalized.test);
    data.train_y = labels_of(data.splits.train);
    data.validation_y = labels_of(data.splits.validation);
    data.test_y = labels_of(data.splits.test);
    return data;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const ParseResult parsed = stage("parse", [&] {
        if (cfg.dataset_path.empty()) {
            throw std::runtime_error("config has no dataset_path");
        }
        return parse_file(cfg.dataset_path, /*strict=*/true);
    });
    return run_experiment(cfg, parsed.dataset);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& parsed) {
    PreparedData data = prepare_data(cfg, parsed);

    MlpModel ann = stage("mlp_train", [&] { return mlp::train(data.train_x, data.train_y, cfg.mlp); });
    SvmModel svm_model =
        stage("svm_train", [&] { return svm::train(data.train_x, data.train_y, cfg.svm); });

    // validation PCC feeds the report and (optionally) the fusion weights
    const Decisions val = decide_all(ann, svm_model, data.validation_x);
    ann.validation_pcc = pcc(tally(val.ann, data.validation_y));
    svm_model.validation_pcc = pcc(tally(val.svm, data.validation_y));

    const Decisions train_dec = decide_all(ann, svm_model, data.train_x);
    const Decisions test_dec = decide_all(ann, svm_model, data.test_x);

    ExperimentReport report;
    report.version = std::string(kToolkitVersion);
    report.config = cfg;
    report.manifest = data.manifest;
    report.ann_validation_pcc = ann.validation_pcc;
    report.svm_validation_pcc = svm_model.validation_pcc;

    for (const auto& row : cfg.rows) {
        switch (row.kind) {
            case ExperimentRow::Kind::ann:
                report.rows.push_back(evaluate_row(row.name, test_dec.ann, data.test_y));
                break;
            case ExperimentRow::Kind::svm:
                report.rows.push_back(evaluate_row(row.name, test_dec.svm, data.test_y));
                break;
            case ExperimentRow::Kind::fusion: {
                const auto result = stage(row.name.c_str(), [&] {
                    std::map<nb::FusionFeature, double> weights;
                    if (cfg.pcc_weighting) {
                        weights[nb::FusionFeature::ann_decision] = ann.validation_pcc;
                        weights[nb::FusionFeature::svm_decision] = svm_model.validation_pcc;
                    }
                    const auto train_vectors =
                        assemble_fusion_vectors(data.splits.train, train_dec, row.features);
                    std::vector<std::pair<FusionVector, ClassLabel>> train_pairs;
                    train_pairs.reserve(train_vectors.size());
                    for (std::size_t i = 0; i < train_vectors.size(); ++i) {
                        train_pairs.emplace_back(train_vectors[i], data.train_y[i]);
                    }
                    const NbFusionModel model = nb::fit(train_pairs, cfg.alpha, weights);
                    const auto test_vectors =
                        assemble_fusion_vectors(data.splits.test, test_dec, row.features);
                    std::vector<ClassLabel> predictions;
                    predictions.reserve(test_vectors.size());
                    for (const auto& v : test_vectors) predictions.push_back(nb::decide(model, v));
                    return evaluate_row(row.name, predictions, data.test_y);
                });
                report.rows.push_back(result);
                break;
            }
        }
    }

    // qualitative fusion-dominance flag; reported, never asserted
    const RowResult* ann_row = nullptr;
    const RowResult* svm_row = nullptr;
    for (std::size_t i = 0; i < cfg.rows.size(); ++i) {
        if (cfg.rows[i].kind == ExperimentRow::Kind::ann && !ann_row) ann_row = &report.rows[i];
        if (cfg.rows[i].kind == ExperimentRow::Kind::svm && !svm_row) svm_row = &report.rows[i];
    }
    const RowResult* best_fusion = nullptr;
    for (std::size_t i = 0; i < cfg.rows.size(); ++i) {
        if (cfg.rows[i].kind != ExperimentRow::Kind::fusion) continue;
        if (!best_fusion || report.rows[i].paper.fpr < best_fusion->paper.fpr ||
            (report.rows[i].paper.fpr == best_fusion->paper.fpr &&
             report.rows[i].paper.tpr > best_fusion->paper.tpr)) {
            best_fusion = &report.rows[i];
        }
    }
    if (ann_row && svm_row && best_fusion) {
        FusionDominance d;
        d.best_fusion_row = best_fusion->name;
        d.fpr_not_above_bases =
            best_fusion->paper.fpr <= std::min(ann_row->paper.fpr, svm_row->paper.fpr);
        d.tpr_within_half_point =
            best_fusion->paper.tpr >= std::max(ann_row->paper.tpr, svm_row->paper.tpr) - 0.005;
        d.holds = d.fpr_not_above_bases && d.tpr_within_half_point;
        report.dominance = d;
    }
    return report;
}

std::string report_to_json(const ExperimentReport& report) {
    json j;
    j["version"] = report.version;
    j["config"] = json::parse(config_to_json(report.config));
    j["split_manifest"] = json::parse(manifest_to_json(report.manifest));
    j["validation_pcc"] = {{"ann", report.ann_validation_pcc}, {"svm", report.svm_validation_pcc}};
    json rows = json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"name", row.name},
                        {"confusion", {{"tp", row.confusion.tp},
                                       {"tn", row.confusion.tn},
                                       {"fp", row.confusion.fp},
                                       {"fn", row.confusion.fn}}},
                        {"normal_positive", metrics_to_json(row.paper)},
                        {"attack_positive", metrics_to_json(row.attack_positive)}});
    }
    j["rows"] = std::move(rows);
    if (report.dominance) {
        j["fusion_dominance"] = {{"best_fusion_row", report.dominance->best_fusion_row},
                                 {"fpr_not_above_bases", report.dominance->fpr_not_above_bases},
                                 {"tpr_within_half_point", report.dominance->tpr_within_half_point},
                                 {"holds", report.dominance->holds}};
    }
    return j.dump(2);
}

ExperimentReport report_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentReport report;
    report.version = j.at("version").get<std::string>();
    report.config = config_from_json(j.at("config").dump());
    report.manifest = manifest_from_json(j.at("split_manifest").dump());
    report.ann_validation_pcc = j.at("validation_pcc").at("ann").get<double>();
    report.svm_validation_pcc = j.at("validation_pcc").at("svm").get<double>();
    for (const auto& r : j.at("rows")) {
        RowResult row;
        row.name = r.at("name").get<std::string>();
        row.confusion.tp = r.at("confusion").at("tp").get<std::uint64_t>();
        row.confusion.tn = r.at("confusion").at("tn").get<std::uint64_t>();
        row.confusion.fp = r.at("confusion").at("fp").get<std::uint64_t>();
        row.confusion.fn = r.at("confusion").at("fn").get<std::uint64_t>();
        row.paper = metrics_from_json(r.at("normal_positive"));
        row.attack_positive = metrics_from_json(r.at("attack_positive"));
        report.rows.push_back(std::move(row));
    }
    if (j.contains("fusion_dominance")) {
        FusionDominance d;
        const json& fd = j.at("fusion_dominance");
        d.best_fusion_row = fd.at("best_fusion_row").get<std::string>();
        d.fpr_not_above_bases = fd.at("fpr_not_above_bases").get<bool>();
        d.tpr_within_half_point = fd.at("tpr_within_half_point").get<bool>();
        d.holds = fd.at("holds").get<bool>();
        report.dominance = d;
    }
    return report;
}

std::string report_to_csv(const ExperimentReport& report) {
    std::string out = "classifier,orientation,tpr,fpr,pcc\n";
    for (const auto& row : report.rows) {
        out += row.name + ",normal-positive," + percent(row.paper.tpr) + ',' +
               percent(row.paper.fpr) + ',' + percent(row.paper.pcc) + '\n';
        out += row.name + ",attack-positive," + percent(row.attack_positive.tpr) + ',' +
               percent(row.attack_positive.fpr) + ',' + percent(row.attack_positive.pcc) + '\n';
    }
    return out;
}

std::string plot_data_csv(const ExperimentReport& report) {
    std::string out = metrics_csv_header() + '\n';
    for (const auto& row : report.rows) {
        out += metrics_csv_row(row.name, row.paper) + '\n';
    }
    return out;
}

std::string plot_spec_json(const ExperimentReport& report) {
    json points = json::array();
    for (const auto& row : report.rows) {
        points.push_back({{"name", row.name},
                          {"x", row.paper.fpr * 100.0},
                          {"y", row.paper.tpr * 100.0}});
    }
    json j = {{"title", "Detection performance by classifier combination"},
              {"x_axis", {{"label", "FPR (%)"}, {"unit", "percent"}}},
              {"y_axis", {{"label", "TPR (%)"}, {"unit", "percent"}}},
              {"series", {{{"name", "test split"}, {"points", points}}}}};
    return j.dump(2);
}

void emit_plot_data(const ExperimentReport& report, const std::string& csv_path,
                    const std::string& spec_path) {
    const std::string csv = plot_data_csv(report);
    const std::string spec = plot_spec_json(report);
    write_text_file(csv_path, csv);
    write_text_file(spec_path, spec);
}

void write_report(const ExperimentReport& report, const std::string& output_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(output_dir);

    // render everything up front so a failure never leaves a partial report
    std::vector<std::pair<fs::path, std::string>> files;
    files.emplace_back(dir / "split_manifest.json", manifest_to_json(report.manifest) + "\n");
    for (const auto& format : report.config.formats) {
        if (format == "json") {
            files.emplace_back(dir / "report.json", report_to_json(report) + "\n");
        } else if (format == "csv") {
            files.emplace_back(dir / "report.csv", report_to_csv(report));
        } else if (format == "plot-data") {
            files.emplace_back(dir / "plot_data.csv", plot_data_csv(report));
            files.emplace_back(dir / "plot_spec.json", plot_spec_json(report) + "\n");
        }
    }
    fs::create_directories(dir);
    for (const auto& [path, text] : files) {
        write_text_file(path.string(), text);
    }
}

}  // namespace netfuse
