#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netfuse/dataset.hpp"
#include "netfuse/experiment.hpp"
#include "netfuse/model_io.hpp"
#include "netfuse/preprocess.hpp"
#include "netfuse/synth.hpp"

namespace {

using namespace netfuse;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct PipelineOptions {
    std::optional<std::uint64_t> seed;
    std::optional<double> attack_ratio;
    std::optional<std::size_t> eval_size;
    bool equal_thirds = false;
    std::optional<std::size_t> subsample;
    bool no_thinning = false;
    std::vector<std::string> caps;  // family=count
};

void add_pipeline_flags(CLI::App* cmd, PipelineOptions& opts) {
    cmd->add_option("--seed", opts.seed, "Seed for every sampled pipeline stage");
    cmd->add_option("--attack-ratio", opts.attack_ratio, "Attack fraction after balancing (default 0.5)");
    cmd->add_option("--eval-size", opts.eval_size, "Validation/test size (default 1000)");
    cmd->add_flag("--equal-thirds", opts.equal_thirds, "Split into three equal parts instead");
    cmd->add_option("--subsample", opts.subsample, "Subsample N records right after parsing");
    cmd->add_flag("--no-thinning", opts.no_thinning, "Skip attack-category thinning");
    cmd->add_option("--cap", opts.caps, "Per-family thinning cap, family=count (repeatable)");
}

void apply_pipeline_options(ExperimentConfig& cfg, const PipelineOptions& opts) {
    if (opts.seed) {
        cfg.split.seed = *opts.seed;
        cfg.mlp.seed = *opts.seed;
        cfg.svm.seed = *opts.seed;
    }
    if (opts.attack_ratio) cfg.split.attack_ratio = *opts.attack_ratio;
    if (opts.eval_size) cfg.split.eval_size = *opts.eval_size;
    if (opts.equal_thirds) cfg.split.equal_thirds = true;
    if (opts.subsample) cfg.subsample = *opts.subsample;
    if (opts.no_thinning) cfg.thinning.enabled = false;
    for (const auto& cap : opts.caps) {
        const auto eq = cap.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--cap expects family=count, got '" + cap + "'");
        }
        cfg.thinning.caps[cap.substr(0, eq)] =
            static_cast<std::size_t>(std::stoull(cap.substr(eq + 1)));
    }
}

// the six experiment rows used when a config file gives none
std::vector<ExperimentRow> default_rows() {
    const auto fusion = [](std::string name, bool protocol, bool service, bool flag) {
        ExperimentRow row;
        row.name = std::move(name);
        row.kind = ExperimentRow::Kind::fusion;
        row.features.use_ann = true;
        row.features.use_svm = true;
        row.features.use_protocol = protocol;
        row.features.use_service = service;
        row.features.use_flag = flag;
        return row;
    };
    std::vector<ExperimentRow> rows;
    rows.push_back({"ANN", ExperimentRow::Kind::ann, {}});
    rows.push_back({"SVM", ExperimentRow::Kind::svm, {}});
    rows.push_back(fusion("ANN+SVM", false, false, false));
    rows.push_back(fusion("ANN+SVM+flag+protocol", true, false, true));
    rows.push_back(fusion("ANN+SVM+service+protocol", true, true, false));
    rows.push_back(fusion("ANN+SVM+flag+service+protocol", true, true, true));
    return rows;
}

int cmd_parse(const std::string& path, bool lenient) {
    const ParseResult result = parse_file(path, /*strict=*/!lenient);
    const ClassCounts counts = class_counts(result.dataset);
    std::cout << result.dataset.size() << " records (" << counts.normal << " normal, "
              << counts.attack << " attack)" << std::endl;
    if (lenient && result.skipped > 0) {
        std::cout << result.skipped << " malformed lines skipped" << std::endl;
    }
    return kExitOk;
}

int cmd_preprocess(const std::string& path, const PipelineOptions& opts, const std::string& out) {
    ExperimentConfig cfg;
    cfg.dataset_path = path;
    cfg.rows = default_rows();
    apply_pipeline_options(cfg, opts);

    const ParseResult parsed = parse_file(path);
    const PreparedData data = prepare_data(cfg, parsed.dataset);
    write_manifest(data.manifest, out);
    std::cout << "split manifest written to " << out << " (train " << data.splits.train.size()
              << ", validation " << data.splits.validation.size() << ", test "
              << data.splits.test.size() << ")" << std::endl;
    return kExitOk;
}

ExperimentConfig load_config(const std::string& config_path) {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = config_from_json(read_text_file(config_path));
    } else {
        cfg.rows = default_rows();
    }
    return cfg;
}

int cmd_train(const std::string& path, const std::string& model_kind,
              const std::string& config_path, const PipelineOptions& opts,
              const std::string& out) {
    ExperimentConfig cfg = load_config(config_path);
    cfg.dataset_path = path;
    apply_pipeline_options(cfg, opts);

    const ParseResult parsed = parse_file(path);
    const PreparedData data = prepare_data(cfg, parsed.dataset);

    if (model_kind == "mlp") {
        MlpModel model = mlp::train(data.train_x, data.train_y, cfg.mlp);
        std::vector<ClassLabel> predictions;
        for (Eigen::Index i = 0; i < data.validation_x.rows(); ++i) {
            predictions.push_back(
                mlp::decide(model, Eigen::VectorXd(data.validation_x.row(i).transpose())));
        }
        model.validation_pcc = pcc(tally(predictions, data.validation_y));
        write_text_file(out, mlp_to_json(model, cfg.mlp));
        std::cout << "mlp model written to " << out
                  << " (validation PCC " << percent(model.validation_pcc) << "%)" << std::endl;
    } else if (model_kind == "svm") {
        SvmModel model = svm::train(data.train_x, data.train_y, cfg.svm);
        std::vector<ClassLabel> predictions;
        for (Eigen::Index i = 0; i < data.validation_x.rows(); ++i) {
            predictions.push_back(
                svm::decide(model, Eigen::VectorXd(data.validation_x.row(i).transpose())));
        }
        model.validation_pcc = pcc(tally(predictions, data.validation_y));
        write_text_file(out, svm_to_json(model, cfg.svm));
        std::cout << "svm model written to " << out
                  << " (validation PCC " << percent(model.validation_pcc) << "%)" << std::endl;
    } else {
        throw CLI::ValidationError("--model must be mlp or svm");
    }
    return kExitOk;
}

int cmd_eval(const std::string& path, const std::string& model_path, const std::string& split_name,
             const std::string& config_path, const PipelineOptions& opts,
             const std::string& format, const std::string& out) {
    ExperimentConfig cfg = load_config(config_path);
    cfg.dataset_path = path;
    apply_pipeline_options(cfg, opts);

    const ParseResult parsed = parse_file(path);
    const PreparedData data = prepare_data(cfg, parsed.dataset);

    const Eigen::MatrixXd* X = nullptr;
    const std::vector<ClassLabel>* y = nullptr;
    if (split_name == "train") {
        X = &data.train_x;
        y = &data.train_y;
    } else if (split_name == "validation") {
        X = &data.validation_x;
        y = &data.validation_y;
    } else if (split_name == "test") {
        X = &data.test_x;
        y = &data.test_y;
    } else {
        throw CLI::ValidationError("--split must be train, validation or test");
    }

    const std::string text = read_text_file(model_path);
    std::vector<ClassLabel> predictions;
    std::string name;
    if (text.find("\"mlp\"") != std::string::npos) {
        const MlpModel model = mlp_from_json(text);
        name = "mlp";
        for (Eigen::Index i = 0; i < X->rows(); ++i) {
            predictions.push_back(mlp::decide(model, Eigen::VectorXd(X->row(i).transpose())));
        }
    } else {
        const SvmModel model = svm_from_json(text);
        name = "svm";
        for (Eigen::Index i = 0; i < X->rows(); ++i) {
            predictions.push_back(svm::decide(model, Eigen::VectorXd(X->row(i).transpose())));
        }
    }

    const ConfusionMatrix cm = tally(predictions, *y);
    const Metrics normal_pos = rates(cm);
    const Metrics attack_pos = rates(cm.swapped());
    if (format == "csv") {
        std::string csv = metrics_csv_header() + '\n' + metrics_csv_row(name, normal_pos) + '\n';
        if (out.empty()) {
            std::cout << csv;
        } else {
            write_text_file(out, csv);
        }
    } else {
        std::ostringstream json;
        json << "{\n  \"classifier\": \"" << name << "\",\n  \"split\": \"" << split_name
             << "\",\n  \"confusion\": {\"tp\": " << cm.tp << ", \"tn\": " << cm.tn
             << ", \"fp\": " << cm.fp << ", \"fn\": " << cm.fn << "},\n"
             << "  \"normal_positive\": {\"tpr\": " << percent(normal_pos.tpr)
             << ", \"fpr\": " << percent(normal_pos.fpr) << ", \"pcc\": " << percent(normal_pos.pcc)
             << "},\n  \"attack_positive\": {\"tpr\": " << percent(attack_pos.tpr)
             << ", \"fpr\": " << percent(attack_pos.fpr) << ", \"pcc\": " << percent(attack_pos.pcc)
             << "}\n}\n";
        if (out.empty()) {
            std::cout << json.str();
        } else {
            write_text_file(out, json.str());
        }
    }
    return kExitOk;
}

int cmd_experiment(const std::string& config_path, const std::string& data_override,
                   const std::string& out_override) {
    ExperimentConfig cfg = config_from_json(read_text_file(config_path));
    if (!data_override.empty()) cfg.dataset_path = data_override;
    if (!out_override.empty()) cfg.output_dir = out_override;

    const ExperimentReport report = run_experiment(cfg);
    write_report(report, cfg.output_dir);

    std::cout << "report written to " << cfg.output_dir << "\n\n"
              << report_to_csv(report);
    if (report.dominance) {
        std::cout << "\nfusion dominance (" << report.dominance->best_fusion_row
                  << "): " << (report.dominance->holds ? "holds" : "does not hold") << std::endl;
    }
    return kExitOk;
}

int cmd_report(const std::string& in, const std::string& format, const std::string& out) {
    const ExperimentReport report = report_from_json(read_text_file(in));
    if (format == "csv") {
        write_text_file(out, report_to_csv(report));
    } else if (format == "plot-data") {
        const std::filesystem::path base(out);
        std::filesystem::path spec = base;
        spec.replace_extension(".json");
        emit_plot_data(report, base.string(), spec.string());
    } else if (format == "json") {
        write_text_file(out, report_to_json(report) + "\n");
    } else {
        throw CLI::ValidationError("--format must be csv, json or plot-data");
    }
    std::cout << "wrote " << out << std::endl;
    return kExitOk;
}

int cmd_synth(const std::string& out, std::uint64_t seed) {
    SynthSpec spec;
    spec.seed = seed;
    write_synth_corpus(spec, out);
    std::cout << "stand-in corpus written to " << out << std::endl;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"netfuse - classifier-fusion network attack detection toolkit"};
    app.require_subcommand(1);

    // parse
    std::string parse_path;
    bool parse_lenient = false;
    auto* parse_cmd = app.add_subcommand("parse", "Validate a dataset file and print class counts");
    parse_cmd->add_option("file", parse_path, "NSL-KDD format dataset file")->required();
    parse_cmd->add_flag("--lenient", parse_lenient, "Skip malformed lines instead of failing");

    // preprocess
    std::string pre_path, pre_out = "split_manifest.json";
    PipelineOptions pre_opts;
    auto* pre_cmd = app.add_subcommand("preprocess", "Materialize a split manifest");
    pre_cmd->add_option("file", pre_path, "NSL-KDD format dataset file")->required();
    pre_cmd->add_option("--out", pre_out, "Manifest output path");
    add_pipeline_flags(pre_cmd, pre_opts);

    // train
    std::string train_path, train_model, train_config, train_out = "model.json";
    PipelineOptions train_opts;
    auto* train_cmd = app.add_subcommand("train", "Fit and serialize a base classifier");
    train_cmd->add_option("file", train_path, "NSL-KDD format dataset file")->required();
    train_cmd->add_option("--model", train_model, "mlp or svm")->required();
    train_cmd->add_option("--config", train_config, "Experiment config JSON (hyperparameters)");
    train_cmd->add_option("--out", train_out, "Model output path");
    add_pipeline_flags(train_cmd, train_opts);

    // eval
    std::string eval_path, eval_model, eval_split = "test", eval_config, eval_format = "json",
                eval_out;
    PipelineOptions eval_opts;
    auto* eval_cmd = app.add_subcommand("eval", "Score a serialized model on a split");
    eval_cmd->add_option("file", eval_path, "NSL-KDD format dataset file")->required();
    eval_cmd->add_option("--model", eval_model, "Serialized model JSON")->required();
    eval_cmd->add_option("--split", eval_split, "train, validation or test (default test)");
    eval_cmd->add_option("--config", eval_config, "Experiment config JSON");
    eval_cmd->add_option("--format", eval_format, "json or csv");
    eval_cmd->add_option("--out", eval_out, "Write metrics here instead of stdout");
    add_pipeline_flags(eval_cmd, eval_opts);

    // experiment
    std::string exp_config, exp_data, exp_out;
    auto* exp_cmd = app.add_subcommand("experiment", "Run a full experiment from a config file");
    exp_cmd->add_option("--config", exp_config, "Experiment config JSON")->required();
    exp_cmd->add_option("--data", exp_data, "Override the config's dataset path");
    exp_cmd->add_option("--out", exp_out, "Override the config's output directory");

    // report
    std::string rep_in, rep_format = "csv", rep_out = "report.csv";
    auto* rep_cmd = app.add_subcommand("report", "Render or convert a report file");
    rep_cmd->add_option("--in", rep_in, "report.json produced by `experiment`")->required();
    rep_cmd->add_option("--format", rep_format, "csv, json or plot-data");
    rep_cmd->add_option("--out", rep_out, "Output path");

    // synth
    std::string synth_out = "synthetic_corpus.txt";
    std::uint64_t synth_seed = 20180417;
    auto* synth_cmd =
        app.add_subcommand("synth", "Generate a stand-in corpus with the KDDTrain+ label census");
    synth_cmd->add_option("--out", synth_out, "Corpus output path");
    synth_cmd->add_option("--seed", synth_seed, "Generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            return app.exit(e);
        }
        app.exit(e, std::cout, std::cerr);
        return kExitUsage;
    }

    try {
        if (*parse_cmd) return cmd_parse(parse_path, parse_lenient);
        if (*pre_cmd) return cmd_preprocess(pre_path, pre_opts, pre_out);
        if (*train_cmd) return cmd_train(train_path, train_model, train_config, train_opts, train_out);
        if (*eval_cmd) {
            return cmd_eval(eval_path, eval_model, eval_split, eval_config, eval_opts, eval_format,
                            eval_out);
        }
        if (*exp_cmd) return cmd_experiment(exp_config, exp_data, exp_out);
        if (*rep_cmd) return cmd_report(rep_in, rep_format, rep_out);
        if (*synth_cmd) return cmd_synth(synth_out, synth_seed);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitData;
    }
    return kExitUsage;
}
