#include "netfuse/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace netfuse {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    // row-major flat array
    json values = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
    }
    return values;
}

Eigen::MatrixXd matrix_from_json(const json& values, Eigen::Index rows, Eigen::Index cols) {
    if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
        throw std::runtime_error("model file: weight array size does not match its shape");
    }
    Eigen::MatrixXd m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(k++)].get<double>();
    }
    return m;
}

}  // namespace

std::string mlp_to_json(const MlpModel& model, const MlpConfig& cfg) {
    json j;
    j["model"] = "mlp";
    j["validation_pcc"] = model.validation_pcc;
    j["config"] = {{"hidden_sizes", cfg.hidden_sizes},
                   {"learning_rate", cfg.learning_rate},
                   {"epochs", cfg.epochs},
                   {"batch_size", cfg.batch_size},
                   {"seed", cfg.seed}};
    json layers = json::array();
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        layers.push_back({{"rows", model.weights[l].rows()},
                          {"cols", model.weights[l].cols()},
                          {"weights", matrix_to_json(model.weights[l])},
                          {"bias", std::vector<double>(model.biases[l].data(),
                                                       model.biases[l].data() + model.biases[l].size())}});
    }
    j["layers"] = std::move(layers);
    return j.dump(2);
}

MlpModel mlp_from_json(const std::string& text, MlpConfig* cfg) {
    const json j = json::parse(text);
    if (j.value("model", "") != std::string("mlp")) {
        throw std::runtime_error("model file: expected a \"mlp\" model");
    }
    MlpModel model;
    for (const auto& layer : j.at("layers")) {
        const auto rows = layer.at("rows").get<Eigen::Index>();
        const auto cols = layer.at("cols").get<Eigen::Index>();
        model.weights.push_back(matrix_from_json(layer.at("weights"), rows, cols));
        const auto bias = layer.at("bias").get<std::vector<double>>();
        model.biases.push_back(Eigen::Map<const Eigen::VectorXd>(bias.data(),
                                                                 static_cast<Eigen::Index>(bias.size())));
    }
    model.validation_pcc = j.value("validation_pcc", 0.0);
    model.check_chain();
    if (cfg) {
        const json& c = j.at("config");
        cfg->hidden_sizes = c.at("hidden_sizes").get<std::vector<int>>();
        cfg->learning_rate = c.at("learning_rate").get<double>();
        cfg->epochs = c.at("epochs").get<int>();
        cfg->batch_size = c.at("batch_size").get<int>();
        cfg->seed = c.at("seed").get<std::uint64_t>();
    }
    return model;
}

std::string svm_to_json(const SvmModel& model, const SvmConfig& cfg) {
    json j;
    j["model"] = "svm";
    j["weights"] = std::vector<double>(model.weights.data(), model.weights.data() + model.weights.size());
    j["bias"] = model.bias;
    j["validation_pcc"] = model.validation_pcc;
    j["config"] = {{"lambda", cfg.lambda},
                   {"epochs", cfg.epochs},
                   {"seed", cfg.seed},
                   {"project", cfg.project}};
    return j.dump(2);
}

SvmModel svm_from_json(const std::string& text, SvmConfig* cfg) {
    const json j = json::parse(text);
    if (j.value("model", "") != std::string("svm")) {
        throw std::runtime_error("model file: expected a \"svm\" model");
    }
    SvmModel model;
    const auto weights = j.at("weights").get<std::vector<double>>();
    if (weights.empty()) throw std::runtime_error("model file: svm weight vector is empty");
    model.weights =
        Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
    model.bias = j.at("bias").get<double>();
    model.validation_pcc = j.value("validation_pcc", 0.0);
    if (!model.weights.allFinite()) throw std::runtime_error("model file: svm weights are not finite");
    if (cfg) {
        const json& c = j.at("config");
        cfg->lambda = c.at("lambda").get<double>();
        cfg->epochs = c.at("epochs").get<int>();
        cfg->seed = c.at("seed").get<std::uint64_t>();
        cfg->project = c.value("project", false);
    }
    return model;
}

std::string fusion_to_json(const NbFusionModel& model, const FusionFeatureSet& fs) {
    json j;
    j["model"] = "nb_fusion";
    j["alpha"] = model.alpha;
    j["priors"] = {{"normal", model.priors[0]}, {"attack", model.priors[1]}};
    j["feature_set"] = {{"ann", fs.use_ann},
                        {"svm", fs.use_svm},
                        {"protocol", fs.use_protocol},
                        {"service", fs.use_service},
                        {"flag", fs.use_flag}};
    json tables = json::array();
    for (const auto& t : model.tables) {
        tables.push_back({{"feature", std::string(nb::feature_name(t.feature))},
                          {"weight", t.weight},
                          {"vocabulary", t.vocabulary},
                          {"prob_normal", t.prob[0]},
                          {"prob_attack", t.prob[1]},
                          {"unseen_normal", t.unseen_prob[0]},
                          {"unseen_attack", t.unseen_prob[1]}});
    }
    j["tables"] = std::move(tables);
    return j.dump(2);
}

NbFusionModel fusion_from_json(const std::string& text, FusionFeatureSet* fs) {
    const json j = json::parse(text);
    if (j.value("model", "") != std::string("nb_fusion")) {
        throw std::runtime_error("model file: expected a \"nb_fusion\" model");
    }
    NbFusionModel model;
    model.alpha = j.at("alpha").get<double>();
    model.priors[0] = j.at("priors").at("normal").get<double>();
    model.priors[1] = j.at("priors").at("attack").get<double>();
    for (const auto& t : j.at("tables")) {
        nb::FeatureTable table;
        table.feature = nb::feature_from_name(t.at("feature").get<std::string>());
        table.weight = t.at("weight").get<double>();
        table.vocabulary = t.at("vocabulary").get<std::vector<std::string>>();
        table.prob[0] = t.at("prob_normal").get<std::vector<double>>();
        table.prob[1] = t.at("prob_attack").get<std::vector<double>>();
        table.unseen_prob[0] = t.at("unseen_normal").get<double>();
        table.unseen_prob[1] = t.at("unseen_attack").get<double>();
        if (table.prob[0].size() != table.vocabulary.size() ||
            table.prob[1].size() != table.vocabulary.size()) {
            throw std::runtime_error("model file: fusion table rows do not match the vocabulary");
        }
        model.tables.push_back(std::move(table));
    }
    if (fs) {
        const json& f = j.at("feature_set");
        fs->use_ann = f.at("ann").get<bool>();
        fs->use_svm = f.at("svm").get<bool>();
        fs->use_protocol = f.at("protocol").get<bool>();
        fs->use_service = f.at("service").get<bool>();
        fs->use_flag = f.at("flag").get<bool>();
    }
    return model;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
    if (!out) throw std::runtime_error("failed while writing file: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace netfuse
