#include <cmath>
#include <cstdio>
#include <doctest.h>
#include <filesystem>
#include <stdexcept>

#include "oracles.hpp"
#include "tvg/hashing.hpp"
#include "tvg/temporal.hpp"
#include "tvg/trainer.hpp"

using tvg::Matrix;
using namespace tvg::gnn;

namespace {

struct TrainingProblem {
    tvg::Graph graph;
    tvg::LaplacianBundle lap;
    tvg::SamplingMask mask;
    Matrix truth;
    Matrix observed;
    Matrix input_diff;
};

TrainingProblem make_problem(std::size_t n, std::size_t m, double density, std::uint64_t seed) {
    tvg::Rng rng(seed);
    auto graph = oracle::random_geometric_graph(n, 3, rng);
    auto lap = tvg::normalized_laplacian(graph);
    auto mask = tvg::random_sampling_mask(n, m, density, rng.next_u64());
    Matrix truth = oracle::random_matrix(n, m, rng);
    Matrix observed = tvg::hadamard(mask.mask, truth);
    Matrix input_diff = tvg::temporal_difference(observed);
    return {std::move(graph), std::move(lap),   std::move(mask),
            std::move(truth), std::move(observed), std::move(input_diff)};
}

// Shared finite-difference gate: max relative error of the analytic gradient
// over every parameter; denominator floored to dodge sign noise at zero.
double max_gradient_mismatch(const CascadeModel& model, const TrainingProblem& prob,
                             double lambda, double epsilon) {
    const auto& s = prob.mask.sampled_indices;
    const auto analytic = loss_and_gradients(model, prob.input_diff, prob.observed, s,
                                             prob.lap.laplacian, lambda, epsilon,
                                             prob.lap.scaled);
    const auto flat_analytic = flatten_grads(analytic.grads);
    const auto params = flatten_params(model);

    CascadeModel probe = model;
    const auto fd = oracle::finite_diff(
        [&](const std::vector<double>& p) {
            unflatten_params(probe, p);
            const Matrix out = model_forward(prob.input_diff, probe, prob.lap.scaled);
            return reconstruction_loss(out, prob.observed, s, prob.lap.laplacian, lambda,
                                       epsilon);
        },
        params, 1e-5);

    double worst = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        const double denom = std::max({std::fabs(fd[i]), std::fabs(flat_analytic[i]), 1e-6});
        worst = std::max(worst, std::fabs(fd[i] - flat_analytic[i]) / denom);
    }
    return worst;
}

}  // namespace

TEST_CASE("loss: exact reconstruction on S with constant-in-time output is zero") {
    const auto prob = make_problem(5, 4, 0.5, 61);
    Matrix x_bar(5, 4);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 4; ++j) x_bar(i, j) = 2.0;
    Matrix x_true = x_bar;
    CHECK(reconstruction_loss(x_bar, x_true, prob.mask.sampled_indices, prob.lap.laplacian,
                              1e-3, 0.05) == 0.0);
}

TEST_CASE("loss: lambda zero is the plain masked MSE, blind outside S") {
    const auto prob = make_problem(4, 4, 0.5, 62);
    tvg::Rng rng(63);
    Matrix x_bar = oracle::random_matrix(4, 4, rng);
    const double base = reconstruction_loss(x_bar, prob.truth, prob.mask.sampled_indices,
                                            prob.lap.laplacian, 0.0, 0.05);
    double expect = 0.0;
    for (const auto& [i, j] : prob.mask.sampled_indices) {
        const double d = prob.truth(i, j) - x_bar(i, j);
        expect += d * d;
    }
    expect /= static_cast<double>(prob.mask.sampled_indices.size());
    CHECK(oracle::rel_error(base, expect) < 1e-14);

    // perturbing values outside S leaves the loss unchanged
    Matrix tweaked = x_bar;
    for (const auto& [i, j] : prob.mask.unsampled_indices()) tweaked(i, j) += 17.0;
    CHECK(reconstruction_loss(tweaked, prob.truth, prob.mask.sampled_indices,
                              prob.lap.laplacian, 0.0, 0.05) == doctest::Approx(base));

    CHECK_THROWS_AS(reconstruction_loss(x_bar, prob.truth, {}, prob.lap.laplacian, 0.0, 0.05),
                    std::invalid_argument);
}

TEST_CASE("loss: composition of masked MSE and sobolev smoothness") {
    const auto prob = make_problem(4, 3, 0.5, 64);
    tvg::Rng rng(65);
    const Matrix x_bar = oracle::random_matrix(4, 3, rng);
    const double lambda = 1e-4, eps = 0.05;
    double mse = 0.0;
    for (const auto& [i, j] : prob.mask.sampled_indices) {
        const double d = prob.truth(i, j) - x_bar(i, j);
        mse += d * d;
    }
    mse /= static_cast<double>(prob.mask.sampled_indices.size());
    const double want = mse + lambda * tvg::sobolev_smoothness(x_bar, prob.lap.laplacian, eps);
    CHECK(oracle::rel_error(reconstruction_loss(x_bar, prob.truth, prob.mask.sampled_indices,
                                                prob.lap.laplacian, lambda, eps),
                            want) < 1e-12);
}

TEST_CASE("gradients: single zero-weight layer matches the closed form") {
    // with W = 0 the output is zero, so dL/dW = Z^T dL/dXbar with
    // dL/dXbar = -(2/|S|) X restricted to S
    const auto prob = make_problem(5, 4, 0.6, 66);
    CascadeConfig cfg;
    cfg.signal_times = 4;
    cfg.layer_count = 1;
    cfg.alpha = 1;
    CascadeModel model = init_cascade_model(cfg, 3);
    model.layers[0].weights[0][0] = Matrix(3, 4);
    model.layers[0].branch_scalars = {1.0};

    const auto& s = prob.mask.sampled_indices;
    const auto got = loss_and_gradients(model, prob.input_diff, prob.observed, s,
                                        prob.lap.laplacian, 0.0, 0.0, prob.lap.scaled);

    Matrix dout(5, 4);
    const double scale = 2.0 / static_cast<double>(s.size());
    for (const auto& [i, j] : s) dout(i, j) = -scale * prob.observed(i, j);
    const Matrix want = tvg::multiply(tvg::transpose(prob.input_diff), dout);
    CHECK(oracle::rel_frobenius(got.grads.layers[0].weights[0][0], want) < 1e-12);
}

TEST_CASE("gradients: symmetric branches receive equal scalar gradients") {
    const auto prob = make_problem(5, 4, 0.6, 67);
    CascadeConfig cfg;
    cfg.signal_times = 4;
    cfg.layer_count = 1;
    cfg.alpha = 3;
    CascadeModel model = init_cascade_model(cfg, 5);
    // make every branch identical: only order-1 terms, same weight matrix
    const Matrix w = model.layers[0].weights[0][0];
    for (std::size_t rho = 0; rho < 3; ++rho) {
        for (std::size_t k = 0; k <= rho; ++k) {
            model.layers[0].weights[rho][k] = (k == 0) ? w : Matrix(w.rows(), w.cols());
        }
    }
    const auto got = loss_and_gradients(model, prob.input_diff, prob.observed,
                                        prob.mask.sampled_indices, prob.lap.laplacian, 1e-4,
                                        0.05, prob.lap.scaled);
    const auto& mu_grad = got.grads.layers[0].branch_scalars;
    CHECK(mu_grad[0] == doctest::Approx(mu_grad[1]).epsilon(1e-12));
    CHECK(mu_grad[1] == doctest::Approx(mu_grad[2]).epsilon(1e-12));
}

TEST_CASE("gradients match central finite differences on a small cascade") {
    const auto prob = make_problem(6, 5, 0.5, 68);
    CascadeConfig cfg;
    cfg.signal_times = 5;
    cfg.layer_count = 2;
    cfg.hidden_dim = 3;
    cfg.alpha = 2;
    const CascadeModel model = init_cascade_model(cfg, 11);
    CHECK(max_gradient_mismatch(model, prob, 1e-4, 0.05) < 1e-4);
}

TEST_CASE("gradients match finite differences with identity activation and no penalty") {
    const auto prob = make_problem(5, 4, 0.7, 69);
    CascadeConfig cfg;
    cfg.signal_times = 4;
    cfg.layer_count = 2;
    cfg.hidden_dim = 2;
    cfg.alpha = 3;
    cfg.activation = Activation::identity;
    const CascadeModel model = init_cascade_model(cfg, 13);
    CHECK(max_gradient_mismatch(model, prob, 0.0, 0.0) < 1e-4);
}

TEST_CASE("gcn gradients match finite differences") {
    const auto prob = make_problem(6, 5, 0.5, 70);
    GcnConfig cfg;
    cfg.signal_times = 5;
    cfg.layer_count = 2;
    cfg.hidden_dim = 3;
    GcnModel model = init_gcn_model(cfg, 17);
    const Matrix ahat = gcn_normalized_adjacency(prob.graph);
    const auto& s = prob.mask.sampled_indices;
    const double lambda = 1e-4, eps = 0.05;

    GcnCache cache;
    const Matrix out = gcn_forward(prob.input_diff, model, ahat, &cache);
    const Matrix dout = reconstruction_loss_gradient(out, prob.observed, s, prob.lap.laplacian,
                                                     lambda, eps);
    const auto grads = gcn_backward(model, cache, dout, ahat);
    std::vector<double> flat_analytic;
    for (const auto& g : grads) {
        flat_analytic.insert(flat_analytic.end(), g.data().begin(), g.data().end());
    }

    GcnModel probe = model;
    const auto fd = oracle::finite_diff(
        [&](const std::vector<double>& p) {
            unflatten_params(probe, p);
            return reconstruction_loss(gcn_forward(prob.input_diff, probe, ahat), prob.observed,
                                       s, prob.lap.laplacian, lambda, eps);
        },
        flatten_params(model), 1e-5);

    double worst = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        const double denom = std::max({std::fabs(fd[i]), std::fabs(flat_analytic[i]), 1e-6});
        worst = std::max(worst, std::fabs(fd[i] - flat_analytic[i]) / denom);
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("training overfits a single sampled entry") {
    const std::size_t n = 6, m = 4;
    tvg::Rng rng(71);
    auto graph = oracle::random_geometric_graph(n, 2, rng);
    auto lap = tvg::normalized_laplacian(graph);
    Matrix mask_matrix(n, m);
    mask_matrix(2, 1) = 1.0;
    const auto mask = tvg::SamplingMask::from_matrix(mask_matrix);
    Matrix observed(n, m);
    observed(2, 1) = 1.5;

    CascadeConfig mc;
    mc.signal_times = m;
    mc.layer_count = 1;
    mc.alpha = 1;
    TrainConfig tc;
    tc.lambda = 0.0;
    tc.epochs = 5000;
    tc.learning_rate = 0.01;
    tc.weight_decay = 0.0;
    tc.seed = 21;
    const auto result = train_cascade(observed, mask, lap, mc, tc);
    CHECK(result.loss_history.back() < 1e-3 * result.loss_history.front());
}

TEST_CASE("training is bitwise deterministic for a fixed seed") {
    const auto prob = make_problem(6, 5, 0.5, 72);
    CascadeConfig mc;
    mc.signal_times = 5;
    mc.layer_count = 2;
    mc.hidden_dim = 3;
    mc.alpha = 2;
    TrainConfig tc;
    tc.epochs = 50;
    tc.seed = 33;
    const auto a = train_cascade(prob.observed, prob.mask, prob.lap, mc, tc);
    const auto b = train_cascade(prob.observed, prob.mask, prob.lap, mc, tc);
    REQUIRE(a.loss_history.size() == b.loss_history.size());
    for (std::size_t i = 0; i < a.loss_history.size(); ++i) {
        CHECK(a.loss_history[i] == b.loss_history[i]);
    }
    CHECK(a.reconstruction == b.reconstruction);

    TrainConfig other = tc;
    other.seed = 34;
    const auto c = train_cascade(prob.observed, prob.mask, prob.lap, mc, other);
    CHECK(c.loss_history.front() != a.loss_history.front());
}

TEST_CASE("train config validation and bad train indices") {
    const auto prob = make_problem(4, 3, 0.5, 73);
    CascadeConfig mc;
    mc.signal_times = 3;
    TrainConfig tc;
    tc.epochs = 0;
    CHECK_THROWS_AS(train_cascade(prob.observed, prob.mask, prob.lap, mc, tc),
                    std::invalid_argument);

    tc = TrainConfig{};
    tc.epochs = 1;
    tc.train_indices = {{0, 0}};
    if (prob.mask.mask(0, 0) == 0.0) {
        CHECK_THROWS_AS(train_cascade(prob.observed, prob.mask, prob.lap, mc, tc),
                        std::invalid_argument);
    }
}

TEST_CASE("checkpoints round-trip through JSON") {
    CascadeConfig mc;
    mc.signal_times = 5;
    mc.layer_count = 2;
    mc.hidden_dim = 3;
    mc.alpha = 2;
    const CascadeModel model = init_cascade_model(mc, 77);
    const auto dir = std::filesystem::temp_directory_path() / "tvg_ckpt_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "model.json").string();
    save_cascade_model(model, 77, path);
    const auto [loaded, seed] = load_cascade_model(path);
    CHECK(seed == 77);
    REQUIRE(loaded.layers.size() == model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        CHECK(loaded.layers[l].branch_scalars == model.layers[l].branch_scalars);
        for (std::size_t rho = 0; rho < model.layers[l].weights.size(); ++rho) {
            for (std::size_t k = 0; k < model.layers[l].weights[rho].size(); ++k) {
                CHECK(loaded.layers[l].weights[rho][k] == model.layers[l].weights[rho][k]);
            }
        }
    }

    GcnConfig gc;
    gc.signal_times = 5;
    gc.layer_count = 2;
    gc.hidden_dim = 3;
    const GcnModel gcn = init_gcn_model(gc, 78);
    const std::string gpath = (dir / "gcn.json").string();
    save_gcn_model(gcn, 78, gpath);
    const auto [gloaded, gseed] = load_gcn_model(gpath);
    CHECK(gseed == 78);
    REQUIRE(gloaded.weights.size() == gcn.weights.size());
    for (std::size_t l = 0; l < gcn.weights.size(); ++l) {
        CHECK(gloaded.weights[l] == gcn.weights[l]);
    }
    CHECK_THROWS(load_gcn_model(path));  // kind mismatch
    std::filesystem::remove_all(dir);
}
