#include <doctest.h>

#include <cmath>

#include "netfuse/mlp.hpp"
#include "netfuse/model_io.hpp"

using namespace netfuse;

namespace {

constexpr ClassLabel N = ClassLabel::normal;
constexpr ClassLabel A = ClassLabel::attack;

// 20 points in 2-D, separable by the plane x0 = 0 with margin 1:
// attack iff x0 >= 1, normal iff x0 <= -1
void toy_separable(Eigen::MatrixXd& X, std::vector<ClassLabel>& y) {
    X.resize(20, 2);
    y.resize(20);
    Rng rng(6);
    for (int i = 0; i < 20; ++i) {
        const bool attack = i % 2 == 0;
        const double sign = attack ? 1.0 : -1.0;
        X(i, 0) = sign * (1.0 + rng.uniform());
        X(i, 1) = rng.uniform(-1.0, 1.0);
        y[static_cast<std::size_t>(i)] = attack ? A : N;
    }
    // verify separability with the hand-chosen plane w=(1,0), b=0
    for (int i = 0; i < 20; ++i) {
        const double margin = X(i, 0);
        if (y[static_cast<std::size_t>(i)] == A) {
            REQUIRE(margin >= 1.0);
        } else {
            REQUIRE(margin <= -1.0);
        }
    }
}

double training_accuracy(const MlpModel& model, const Eigen::MatrixXd& X,
                         const std::vector<ClassLabel>& y) {
    int correct = 0;
    const Eigen::VectorXd scores = mlp::score_all(model, X);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const ClassLabel decision = scores[i] >= 0.5 ? A : N;
        if (decision == y[static_cast<std::size_t>(i)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(X.rows());
}

MlpModel zero_model(int input_dim, const std::vector<int>& hidden) {
    MlpModel model;
    std::vector<int> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        model.weights.push_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
        model.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }
    return model;
}

}  // namespace

TEST_CASE("mlp learns a linearly separable toy set within 200 epochs") {
    Eigen::MatrixXd X;
    std::vector<ClassLabel> y;
    toy_separable(X, y);
    MlpConfig cfg;
    cfg.hidden_sizes = {5};
    cfg.learning_rate = 0.5;
    cfg.epochs = 200;
    cfg.batch_size = 20;
    cfg.seed = 1;
    const MlpModel model = mlp::train(X, y, cfg);
    CHECK(training_accuracy(model, X, y) == 1.0);
    CHECK(model.finite());
}

TEST_CASE("a single repeated attack sample is memorized monotonically") {
    Eigen::MatrixXd X(1, 3);
    X << 0.5, -0.2, 1.0;
    const std::vector<ClassLabel> y = {A};
    MlpConfig cfg;
    cfg.hidden_sizes = {4};
    cfg.learning_rate = 0.5;
    cfg.batch_size = 1;
    cfg.seed = 3;
    double previous = 0.0;
    for (int epochs : {5, 20, 80}) {
        cfg.epochs = epochs;
        const MlpModel model = mlp::train(X, y, cfg);
        const double s = mlp::score(model, Eigen::VectorXd(X.row(0).transpose()));
        CHECK(s > previous);
        previous = s;
    }
    CHECK(previous > 0.95);
}

TEST_CASE("training is deterministic in the seed") {
    Eigen::MatrixXd X;
    std::vector<ClassLabel> y;
    toy_separable(X, y);
    MlpConfig cfg;
    cfg.hidden_sizes = {7};
    cfg.epochs = 20;
    cfg.seed = 9;
    const MlpModel a = mlp::train(X, y, cfg);
    const MlpModel b = mlp::train(X, y, cfg);
    REQUIRE(a.weights.size() == b.weights.size());
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        CHECK(a.weights[l] == b.weights[l]);
        CHECK(a.biases[l] == b.biases[l]);
    }
}

TEST_CASE("all-zero weights score 0.5 for every input") {
    const MlpModel model = zero_model(4, {3});
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd x(4);
        for (int i = 0; i < 4; ++i) x[i] = rng.uniform(-5.0, 5.0);
        CHECK(mlp::score(model, x) == 0.5);
    }
}

TEST_CASE("scores are independent of batch evaluation order") {
    Eigen::MatrixXd X;
    std::vector<ClassLabel> y;
    toy_separable(X, y);
    MlpConfig cfg;
    cfg.epochs = 10;
    cfg.seed = 4;
    const MlpModel model = mlp::train(X, y, cfg);
    const Eigen::VectorXd batch = mlp::score_all(model, X);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        CHECK(batch[i] == mlp::score(model, Eigen::VectorXd(X.row(i).transpose())));
    }
}

TEST_CASE("scores stay finite for extreme inputs") {
    Eigen::MatrixXd X;
    std::vector<ClassLabel> y;
    toy_separable(X, y);
    MlpConfig cfg;
    cfg.epochs = 5;
    const MlpModel model = mlp::train(X, y, cfg);
    Eigen::VectorXd x(2);
    x << 1e6, -1e6;
    const double s = mlp::score(model, x);
    CHECK(std::isfinite(s));
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
}

TEST_CASE("decision threshold: ties go to attack") {
    SUBCASE("score exactly 0.5 at the default threshold") {
        const MlpModel model = zero_model(2, {3});
        Eigen::VectorXd x(2);
        x << 1.0, 2.0;
        REQUIRE(mlp::score(model, x) == 0.5);
        CHECK(mlp::decide(model, x) == A);
    }
    SUBCASE("scores just below and above the threshold") {
        // a single sigmoid unit: score = sigmoid(bias), so bias = logit(p)
        MlpModel model;
        model.weights.push_back(Eigen::MatrixXd::Zero(1, 2));
        model.biases.push_back(Eigen::VectorXd::Zero(1));
        Eigen::VectorXd x(2);
        x << 0.0, 0.0;

        model.biases[0][0] = std::log(0.49 / 0.51);
        CHECK(mlp::score(model, x) == doctest::Approx(0.49).epsilon(1e-12));
        CHECK(mlp::decide(model, x) == N);

        model.biases[0][0] = std::log(0.51 / 0.49);
        CHECK(mlp::score(model, x) == doctest::Approx(0.51).epsilon(1e-12));
        CHECK(mlp::decide(model, x) == A);
    }
    SUBCASE("threshold must lie in (0,1)") {
        const MlpModel model = zero_model(2, {});
        Eigen::VectorXd x(2);
        x << 0.0, 0.0;
        CHECK_THROWS_AS(mlp::decide(model, x, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(mlp::decide(model, x, 1.0), std::invalid_argument);
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(13);
    Eigen::MatrixXd X(3, 4);
    std::vector<ClassLabel> y(3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 4; ++j) X(i, j) = rng.uniform(-1.0, 1.0);
        y[static_cast<std::size_t>(i)] = rng.bernoulli(0.5) ? A : N;
    }
    MlpConfig cfg;
    cfg.hidden_sizes = {5};
    cfg.seed = 21;
    Rng init_rng(cfg.seed);
    MlpModel model = mlp::init_model(4, cfg, init_rng);

    const mlp::Gradients<double> grads = mlp::loss_gradients(model, X, y);
    const double step = 1e-5;
    double worst = 0.0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        for (Eigen::Index r = 0; r < model.weights[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < model.weights[l].cols(); ++c) {
                const double saved = model.weights[l](r, c);
                model.weights[l](r, c) = saved + step;
                const double up = mlp::loss(model, X, y);
                model.weights[l](r, c) = saved - step;
                const double down = mlp::loss(model, X, y);
                model.weights[l](r, c) = saved;
                const double numeric = (up - down) / (2.0 * step);
                const double analytic = grads.weights[l](r, c);
                const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
                worst = std::max(worst, std::abs(numeric - analytic) / scale);
            }
        }
        for (Eigen::Index r = 0; r < model.biases[l].size(); ++r) {
            const double saved = model.biases[l][r];
            model.biases[l][r] = saved + step;
            const double up = mlp::loss(model, X, y);
            model.biases[l][r] = saved - step;
            const double down = mlp::loss(model, X, y);
            model.biases[l][r] = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double analytic = grads.biases[l][r];
            const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
            worst = std::max(worst, std::abs(numeric - analytic) / scale);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("full-batch loss is non-increasing at a small learning rate") {
    Eigen::MatrixXd X;
    std::vector<ClassLabel> y;
    toy_separable(X, y);
    MlpConfig cfg;
    cfg.hidden_sizes = {5};
    cfg.learning_rate = 0.001;
    cfg.epochs = 60;
    cfg.batch_size = static_cast<int>(X.rows());
    cfg.seed = 11;
    std::vector<double> losses;
    mlp::train(X, y, cfg, &losses);
    REQUIRE(losses.size() == 60);
    for (std::size_t e = 1; e < losses.size(); ++e) {
        CHECK(losses[e] <= losses[e - 1] + 1e-12);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const MlpModel model = zero_model(4, {3});
    Eigen::VectorXd x(3);
    x.setZero();
    CHECK_THROWS_AS(mlp::score(model, x), std::invalid_argument);

    Eigen::MatrixXd X(2, 4);
    X.setZero();
    std::vector<ClassLabel> y = {A};
    CHECK_THROWS_AS(mlp::train(X, y, MlpConfig{}), std::invalid_argument);
}

TEST_CASE("a non-finite training state reports the epoch") {
    // mixed-sign infinities produce NaN pre-activations on the first batch
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd X(2, 2);
    X << inf, inf, -inf, inf;
    const std::vector<ClassLabel> y = {A, N};
    MlpConfig cfg;
    cfg.hidden_sizes = {3};
    cfg.epochs = 3;
    cfg.batch_size = 2;
    try {
        mlp::train(X, y, cfg);
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(e.epoch() == 0);
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}

TEST_CASE("mlp serialization round-trips and validates shapes") {
    Eigen::MatrixXd X;
    std::vector<ClassLabel> y;
    toy_separable(X, y);
    MlpConfig cfg;
    cfg.hidden_sizes = {6, 3};
    cfg.epochs = 15;
    cfg.seed = 8;
    const MlpModel model = mlp::train(X, y, cfg);

    const std::string text = mlp_to_json(model, cfg);
    MlpConfig loaded_cfg;
    const MlpModel loaded = mlp_from_json(text, &loaded_cfg);
    REQUIRE(loaded.weights.size() == model.weights.size());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        CHECK(loaded.weights[l] == model.weights[l]);
        CHECK(loaded.biases[l] == model.biases[l]);
    }
    CHECK(loaded_cfg.hidden_sizes == cfg.hidden_sizes);
    CHECK(loaded_cfg.seed == cfg.seed);
    Eigen::VectorXd x(2);
    x << 0.3, -0.7;
    CHECK(mlp::score(loaded, x) == mlp::score(model, x));

    SUBCASE("broken layer chaining is rejected") {
        std::string bad = text;
        const auto pos = bad.find("\"rows\": 6");
        REQUIRE(pos != std::string::npos);
        bad.replace(pos, 9, "\"rows\": 9");
        CHECK_THROWS(mlp_from_json(bad));
    }
}
