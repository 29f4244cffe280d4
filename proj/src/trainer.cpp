#include "tvg/trainer.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tvg/temporal.hpp"

namespace tvg::gnn {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (weight_decay < 0.0) throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
    if (lambda < 0.0) throw std::invalid_argument("TrainConfig: lambda must be >= 0");
    if (epsilon < 0.0) throw std::invalid_argument("TrainConfig: epsilon must be >= 0");
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
}

double reconstruction_loss(const Matrix& x_bar, const Matrix& x_true, const IndexSet& s,
                           const Matrix& l, double lambda, double epsilon) {
    if (s.empty()) throw std::invalid_argument("reconstruction_loss: empty training set");
    if (!x_bar.same_shape(x_true)) {
        throw std::invalid_argument("reconstruction_loss: shape mismatch " +
                                    x_bar.shape_string() + " vs " + x_true.shape_string());
    }
    double mse = 0.0;
    for (const auto& [i, j] : s) {
        const double d = x_true(i, j) - x_bar(i, j);
        mse += d * d;
    }
    mse /= static_cast<double>(s.size());
    if (lambda == 0.0) return mse;
    return mse + lambda * sobolev_smoothness(x_bar, l, epsilon);
}

Matrix reconstruction_loss_gradient(const Matrix& x_bar, const Matrix& x_true, const IndexSet& s,
                                    const Matrix& l, double lambda, double epsilon) {
    if (s.empty()) throw std::invalid_argument("reconstruction_loss_gradient: empty training set");
    Matrix g(x_bar.rows(), x_bar.cols());
    const double scale = 2.0 / static_cast<double>(s.size());
    for (const auto& [i, j] : s) {
        g(i, j) = scale * (x_bar(i, j) - x_true(i, j));
    }
    if (lambda != 0.0) {
        // d/dX tr((X D_h)^T (L + eps I) X D_h) = 2 (L + eps I) X D_h D_h^T
        Matrix t = temporal_second_difference(x_bar);
        Matrix lt = multiply(l, t);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.data()[i] += 2.0 * lambda * (lt.data()[i] + epsilon * t.data()[i]);
        }
    }
    return g;
}

LossAndGrads loss_and_gradients(const CascadeModel& model, const Matrix& input_diff,
                                const Matrix& x_true, const IndexSet& s, const Matrix& l,
                                double lambda, double epsilon, const Matrix& scaled_laplacian) {
    CascadeCache cache;
    LossAndGrads out;
    out.reconstruction = model_forward(input_diff, model, scaled_laplacian, &cache);
    for (std::size_t li = 0; li < cache.preact.size(); ++li) {
        if (!all_finite(cache.preact[li])) {
            throw std::runtime_error("loss_and_gradients: non-finite values in layer " +
                                     std::to_string(li));
        }
    }
    out.loss = reconstruction_loss(out.reconstruction, x_true, s, l, lambda, epsilon);
    const Matrix g = reconstruction_loss_gradient(out.reconstruction, x_true, s, l, lambda,
                                                  epsilon);
    out.grads = model_backward(model, cache, g, scaled_laplacian);
    return out;
}

namespace {

void append_matrix(std::vector<double>& flat, const Matrix& m) {
    flat.insert(flat.end(), m.data().begin(), m.data().end());
}

void take_matrix(Matrix& m, const std::vector<double>& flat, std::size_t& pos) {
    for (double& v : m.data()) v = flat[pos++];
}

}  // namespace

std::vector<double> flatten_params(const CascadeModel& model) {
    std::vector<double> flat;
    for (const auto& layer : model.layers) {
        for (const auto& branch : layer.weights)
            for (const Matrix& w : branch) append_matrix(flat, w);
        flat.insert(flat.end(), layer.branch_scalars.begin(), layer.branch_scalars.end());
    }
    return flat;
}

void unflatten_params(CascadeModel& model, const std::vector<double>& flat) {
    std::size_t pos = 0;
    for (auto& layer : model.layers) {
        for (auto& branch : layer.weights)
            for (Matrix& w : branch) take_matrix(w, flat, pos);
        for (double& mu : layer.branch_scalars) mu = flat[pos++];
    }
    if (pos != flat.size()) {
        throw std::invalid_argument("unflatten_params: length mismatch");
    }
}

std::vector<double> flatten_grads(const CascadeGrads& grads) {
    std::vector<double> flat;
    for (const auto& layer : grads.layers) {
        for (const auto& branch : layer.weights)
            for (const Matrix& w : branch) append_matrix(flat, w);
        flat.insert(flat.end(), layer.branch_scalars.begin(), layer.branch_scalars.end());
    }
    return flat;
}

std::vector<double> flatten_params(const GcnModel& model) {
    std::vector<double> flat;
    for (const Matrix& w : model.weights) append_matrix(flat, w);
    return flat;
}

void unflatten_params(GcnModel& model, const std::vector<double>& flat) {
    std::size_t pos = 0;
    for (Matrix& w : model.weights) take_matrix(w, flat, pos);
    if (pos != flat.size()) {
        throw std::invalid_argument("unflatten_params: length mismatch");
    }
}

AdamOptimizer::AdamOptimizer(std::size_t param_count, double learning_rate, double weight_decay)
    : lr_(learning_rate), wd_(weight_decay), m_(param_count, 0.0), v_(param_count, 0.0) {}

void AdamOptimizer::step(std::vector<double>& params, const std::vector<double>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw std::invalid_argument("AdamOptimizer: parameter count mismatch");
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, zeta = 1e-8;
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, t_);
    const double bc2 = 1.0 - std::pow(beta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m_[i] = beta1 * m_[i] + (1.0 - beta1) * g;
        v_[i] = beta2 * v_[i] + (1.0 - beta2) * g * g;
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        params[i] -= lr_ * (mhat / (std::sqrt(vhat) + zeta) + wd_ * params[i]);
    }
}

namespace {

IndexSet resolve_train_indices(const SamplingMask& mask, const TrainConfig& cfg) {
    if (cfg.train_indices.empty()) return mask.sampled_indices;
    for (const auto& [i, j] : cfg.train_indices) {
        if (i >= mask.nodes() || j >= mask.times() || mask.mask(i, j) != 1.0) {
            throw std::invalid_argument("TrainConfig: train index (" + std::to_string(i) + "," +
                                        std::to_string(j) + ") is not a sampled entry");
        }
    }
    return cfg.train_indices;
}

void check_divergence(double loss, int epoch) {
    if (!std::isfinite(loss) || loss > 1e12) {
        throw std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                                 " (loss = " + std::to_string(loss) + ")");
    }
}

}  // namespace

CascadeTrainResult train_cascade(const Matrix& observed, const SamplingMask& mask,
                                 const LaplacianBundle& lap, const CascadeConfig& model_cfg,
                                 const TrainConfig& train_cfg) {
    train_cfg.validate();
    model_cfg.validate();
    if (model_cfg.signal_times != observed.cols()) {
        throw std::invalid_argument("train_cascade: model expects M = " +
                                    std::to_string(model_cfg.signal_times) + ", signal has " +
                                    std::to_string(observed.cols()));
    }
    const IndexSet s = resolve_train_indices(mask, train_cfg);
    const Matrix input_diff = temporal_difference(hadamard(mask.mask, observed));

    CascadeTrainResult result;
    result.model = init_cascade_model(model_cfg, train_cfg.seed);
    std::vector<double> params = flatten_params(result.model);
    AdamOptimizer adam(params.size(), train_cfg.learning_rate, train_cfg.weight_decay);
    result.loss_history.reserve(static_cast<std::size_t>(train_cfg.epochs));

    for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
        auto lg = loss_and_gradients(result.model, input_diff, observed, s, lap.laplacian,
                                     train_cfg.lambda, train_cfg.epsilon, lap.scaled);
        check_divergence(lg.loss, epoch);
        result.loss_history.push_back(lg.loss);
        adam.step(params, flatten_grads(lg.grads));
        unflatten_params(result.model, params);
    }
    result.reconstruction = model_forward(input_diff, result.model, lap.scaled);
    return result;
}

GcnTrainResult train_gcn(const Matrix& observed, const SamplingMask& mask,
                         const LaplacianBundle& lap, const Graph& g, const GcnConfig& model_cfg,
                         const TrainConfig& train_cfg) {
    train_cfg.validate();
    model_cfg.validate();
    if (model_cfg.signal_times != observed.cols()) {
        throw std::invalid_argument("train_gcn: model expects M = " +
                                    std::to_string(model_cfg.signal_times) + ", signal has " +
                                    std::to_string(observed.cols()));
    }
    const IndexSet s = resolve_train_indices(mask, train_cfg);
    const Matrix ahat = gcn_normalized_adjacency(g);
    const Matrix input_diff = temporal_difference(hadamard(mask.mask, observed));

    GcnTrainResult result;
    result.model = init_gcn_model(model_cfg, train_cfg.seed);
    std::vector<double> params = flatten_params(result.model);
    AdamOptimizer adam(params.size(), train_cfg.learning_rate, train_cfg.weight_decay);
    result.loss_history.reserve(static_cast<std::size_t>(train_cfg.epochs));

    for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
        GcnCache cache;
        Matrix x_bar = gcn_forward(input_diff, result.model, ahat, &cache);
        const double loss = reconstruction_loss(x_bar, observed, s, lap.laplacian,
                                                train_cfg.lambda, train_cfg.epsilon);
        check_divergence(loss, epoch);
        result.loss_history.push_back(loss);
        const Matrix gout = reconstruction_loss_gradient(x_bar, observed, s, lap.laplacian,
                                                         train_cfg.lambda, train_cfg.epsilon);
        const auto grads = gcn_backward(result.model, cache, gout, ahat);
        std::vector<double> flat_grads;
        for (const Matrix& w : grads) {
            flat_grads.insert(flat_grads.end(), w.data().begin(), w.data().end());
        }
        adam.step(params, flat_grads);
        unflatten_params(result.model, params);
    }
    result.reconstruction = gcn_forward(input_diff, result.model, ahat);
    return result;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

nlohmann::json matrix_to_json(const Matrix& m) { return m.data(); }

Matrix matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    if (j.size() != m.size()) {
        throw std::invalid_argument("model checkpoint: weight array size mismatch");
    }
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = j[i].get<double>();
    return m;
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::vector<std::size_t> model_dims(const CascadeModel& model) {
    std::vector<std::size_t> dims;
    dims.push_back(model.layers.front().in_dim());
    for (const auto& layer : model.layers) dims.push_back(layer.out_dim());
    return dims;
}

}  // namespace

void save_cascade_model(const CascadeModel& model, std::uint64_t seed, const std::string& path) {
    model.validate();
    nlohmann::json j;
    j["format"] = "tvg-model";
    j["kind"] = "timegnn";
    j["activation"] = to_string(model.activation);
    j["alpha"] = model.layers.front().alpha();
    j["dims"] = model_dims(model);
    j["seed"] = seed;
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : model.layers) {
        nlohmann::json lj;
        lj["mu"] = layer.branch_scalars;
        nlohmann::json weights = nlohmann::json::array();
        for (const auto& branch : layer.weights)
            for (const Matrix& w : branch) weights.push_back(matrix_to_json(w));
        lj["weights"] = weights;
        layers.push_back(std::move(lj));
    }
    j["layers"] = std::move(layers);
    write_json(j, path);
}

std::pair<CascadeModel, std::uint64_t> load_cascade_model(const std::string& path) {
    const nlohmann::json j = load_json(path);
    if (j.value("format", "") != "tvg-model" || j.value("kind", "") != "timegnn") {
        throw std::runtime_error(path + ": not a timegnn checkpoint");
    }
    const auto dims = j.at("dims").get<std::vector<std::size_t>>();
    const auto alpha = j.at("alpha").get<std::size_t>();
    CascadeModel model;
    model.activation = activation_from_string(j.at("activation").get<std::string>());
    const auto& layers = j.at("layers");
    if (layers.size() + 1 != dims.size()) {
        throw std::runtime_error(path + ": layer count does not match dims");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        CascadeLayerParams layer;
        layer.branch_scalars = layers[l].at("mu").get<std::vector<double>>();
        if (layer.branch_scalars.size() != alpha) {
            throw std::runtime_error(path + ": mu count does not match alpha");
        }
        const auto& weights = layers[l].at("weights");
        std::size_t idx = 0;
        layer.weights.resize(alpha);
        for (std::size_t rho = 0; rho < alpha; ++rho) {
            for (std::size_t k = 0; k <= rho; ++k) {
                if (idx >= weights.size()) {
                    throw std::runtime_error(path + ": missing weight matrices");
                }
                layer.weights[rho].push_back(matrix_from_json(weights[idx++], dims[l], dims[l + 1]));
            }
        }
        if (idx != weights.size()) throw std::runtime_error(path + ": extra weight matrices");
        model.layers.push_back(std::move(layer));
    }
    model.validate();
    return {std::move(model), j.value("seed", std::uint64_t{0})};
}

void save_gcn_model(const GcnModel& model, std::uint64_t seed, const std::string& path) {
    nlohmann::json j;
    j["format"] = "tvg-model";
    j["kind"] = "gcn";
    j["activation"] = to_string(model.activation);
    std::vector<std::size_t> dims;
    dims.push_back(model.weights.front().rows());
    for (const Matrix& w : model.weights) dims.push_back(w.cols());
    j["dims"] = dims;
    j["seed"] = seed;
    nlohmann::json weights = nlohmann::json::array();
    for (const Matrix& w : model.weights) weights.push_back(matrix_to_json(w));
    j["weights"] = std::move(weights);
    write_json(j, path);
}

std::pair<GcnModel, std::uint64_t> load_gcn_model(const std::string& path) {
    const nlohmann::json j = load_json(path);
    if (j.value("format", "") != "tvg-model" || j.value("kind", "") != "gcn") {
        throw std::runtime_error(path + ": not a gcn checkpoint");
    }
    const auto dims = j.at("dims").get<std::vector<std::size_t>>();
    GcnModel model;
    model.activation = activation_from_string(j.at("activation").get<std::string>());
    const auto& weights = j.at("weights");
    if (weights.size() + 1 != dims.size()) {
        throw std::runtime_error(path + ": weight count does not match dims");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        model.weights.push_back(matrix_from_json(weights[l], dims[l], dims[l + 1]));
    }
    return {std::move(model), j.value("seed", std::uint64_t{0})};
}

}  // namespace tvg::gnn
