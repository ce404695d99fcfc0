#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netfuse/experiment.hpp"
#include "netfuse/model_io.hpp"
#include "netfuse/synth.hpp"

using namespace netfuse;

namespace {

namespace fs = std::filesystem;

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CommandResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / "netfuse_cli_io";
    fs::create_directories(dir);
    const fs::path out_path = dir / ("out" + std::to_string(counter));
    const fs::path err_path = dir / ("err" + std::to_string(counter));
    ++counter;

    const std::string command = std::string(NETFUSE_CLI_PATH) + " " + args + " > " +
                                out_path.string() + " 2> " + err_path.string();
    const int status = std::system(command.c_str());
    CommandResult result;
#ifdef _WIN32
    result.exit_code = status;
#else
    result.exit_code = WEXITSTATUS(status);
#endif
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "netfuse_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// small corpus shared by the CLI cases
const fs::path& corpus_path() {
    static const fs::path path = [] {
        SynthSpec spec;
        spec.seed = 1234;
        spec.label_counts = {{"normal", 400}, {"neptune", 250}, {"satan", 100},
                             {"guess_passwd", 30}, {"buffer_overflow", 20}};
        const fs::path p = work_dir() / "corpus.txt";
        write_synth_corpus(spec, p.string());
        return p;
    }();
    return path;
}

std::string small_config_json(const fs::path& out_dir) {
    ExperimentConfig cfg;
    cfg.dataset_path = corpus_path().string();
    cfg.thinning.enabled = false;
    cfg.split.seed = 11;
    cfg.split.eval_size = 60;
    cfg.mlp.epochs = 8;
    cfg.mlp.seed = 11;
    cfg.svm.epochs = 8;
    cfg.svm.seed = 11;
    cfg.output_dir = out_dir.string();
    cfg.formats = {"csv", "json", "plot-data"};
    ExperimentRow ann_row;
    ann_row.name = "ANN";
    ann_row.kind = ExperimentRow::Kind::ann;
    cfg.rows.push_back(ann_row);
    ExperimentRow svm_row;
    svm_row.name = "SVM";
    svm_row.kind = ExperimentRow::Kind::svm;
    cfg.rows.push_back(svm_row);
    ExperimentRow fusion_row;
    fusion_row.name = "ANN+SVM+flag";
    fusion_row.kind = ExperimentRow::Kind::fusion;
    fusion_row.features.use_ann = true;
    fusion_row.features.use_svm = true;
    fusion_row.features.use_flag = true;
    cfg.rows.push_back(fusion_row);
    return config_to_json(cfg);
}

}  // namespace

TEST_CASE("cli: no arguments is a usage error on stderr") {
    const CommandResult result = run_cli("");
    CHECK(result.exit_code == 1);
    CHECK_FALSE(result.err.empty());
}

TEST_CASE("cli: unknown subcommand is a usage error") {
    const CommandResult result = run_cli("frobnicate");
    CHECK(result.exit_code == 1);
}

TEST_CASE("cli: --help exits zero") {
    const CommandResult result = run_cli("--help");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("parse") != std::string::npos);
    CHECK(result.out.find("experiment") != std::string::npos);
}

TEST_CASE("cli: parse prints record and class counts") {
    const CommandResult result = run_cli("parse " + corpus_path().string());
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("800 records (400 normal, 400 attack)") != std::string::npos);
}

TEST_CASE("cli: parse on a malformed file is a data error") {
    const fs::path bad = work_dir() / "bad.txt";
    std::ofstream(bad) << "this,is,not,enough,fields\n";
    const CommandResult result = run_cli("parse " + bad.string());
    CHECK(result.exit_code == 2);
    CHECK_FALSE(result.err.empty());
}

TEST_CASE("cli: missing file is a data error") {
    const CommandResult result = run_cli("parse /no/such/file.txt");
    CHECK(result.exit_code == 2);
}

TEST_CASE("cli: preprocess writes a split manifest") {
    const fs::path manifest_path = work_dir() / "manifest.json";
    const CommandResult result =
        run_cli("preprocess " + corpus_path().string() + " --seed 3 --eval-size 50 --no-thinning --out " +
                manifest_path.string());
    CHECK(result.exit_code == 0);
    REQUIRE(fs::exists(manifest_path));
    const SplitManifest manifest = read_manifest(manifest_path.string());
    CHECK(manifest.seed == 3);
    CHECK(manifest.validation_indices.size() == 50);
    CHECK(manifest.test_indices.size() == 50);
}

TEST_CASE("cli: experiment runs a config end to end") {
    const fs::path out_dir = work_dir() / "exp_out";
    const fs::path cfg_path = work_dir() / "config.json";
    std::ofstream(cfg_path) << small_config_json(out_dir);

    const CommandResult result = run_cli("experiment --config " + cfg_path.string());
    CHECK(result.exit_code == 0);
    CHECK(fs::exists(out_dir / "report.json"));
    CHECK(fs::exists(out_dir / "report.csv"));
    CHECK(fs::exists(out_dir / "plot_data.csv"));

    SUBCASE("report subcommand converts the report") {
        const fs::path csv_out = work_dir() / "converted.csv";
        const CommandResult convert =
            run_cli("report --in " + (out_dir / "report.json").string() + " --format csv --out " +
                    csv_out.string());
        CHECK(convert.exit_code == 0);
        CHECK(slurp(csv_out) == slurp(out_dir / "report.csv"));
    }

    SUBCASE("experiment is reproducible byte for byte") {
        const fs::path out2 = work_dir() / "exp_out2";
        const CommandResult rerun = run_cli("experiment --config " + cfg_path.string() + " --out " +
                                            out2.string());
        CHECK(rerun.exit_code == 0);
        CHECK(slurp(out_dir / "report.csv") == slurp(out2 / "report.csv"));
        CHECK(slurp(out_dir / "split_manifest.json") == slurp(out2 / "split_manifest.json"));
    }
}

TEST_CASE("cli: experiment with a missing config file is a data error") {
    const CommandResult result = run_cli("experiment --config /no/such/config.json");
    CHECK(result.exit_code == 2);
}

TEST_CASE("cli: train and eval round-trip a model file") {
    const fs::path model_path = work_dir() / "mlp.json";
    const CommandResult trained =
        run_cli("train " + corpus_path().string() +
                " --model mlp --seed 4 --eval-size 50 --no-thinning --out " + model_path.string());
    CHECK(trained.exit_code == 0);
    REQUIRE(fs::exists(model_path));
    const MlpModel model = mlp_from_json(slurp(model_path));
    CHECK(model.validation_pcc > 0.0);

    const CommandResult evaluated =
        run_cli("eval " + corpus_path().string() + " --model " + model_path.string() +
                " --split test --seed 4 --eval-size 50 --no-thinning");
    CHECK(evaluated.exit_code == 0);
    CHECK(evaluated.out.find("confusion") != std::string::npos);
    CHECK(evaluated.out.find("attack_positive") != std::string::npos);
}

TEST_CASE("cli: synth writes a parseable corpus") {
    // exercised through the library elsewhere; here just the subcommand wiring
    const fs::path out = work_dir() / "synth_smoke.txt";
    const CommandResult result = run_cli("synth --seed 2 --out " + out.string());
    CHECK(result.exit_code == 0);
    REQUIRE(fs::exists(out));
    const ParseResult parsed = parse_file(out.string());
    const ClassCounts counts = class_counts(parsed.dataset);
    CHECK(parsed.dataset.size() == 125973);
    CHECK(counts.normal == 67343);
    CHECK(counts.attack == 58630);
    fs::remove(out);
}
