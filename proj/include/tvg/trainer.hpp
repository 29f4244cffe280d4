#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tvg/graph.hpp"
#include "tvg/matrix.hpp"
#include "tvg/model.hpp"
#include "tvg/sampling.hpp"

namespace tvg::gnn {

using IndexSet = std::vector<std::pair<std::size_t, std::size_t>>;

/// Training-loop settings: full-batch Adam with decoupled weight decay.
/// train_indices is the loss set S; when empty the trainer uses every
/// sampled index of the mask.
struct TrainConfig {
    double learning_rate = 0.01;
    double weight_decay = 1e-5;
    double lambda = 1e-5;  // Sobolev regularization weight in the loss
    double epsilon = 0.05;
    int epochs = 5000;
    std::uint64_t seed = 1;
    IndexSet train_indices;

    void validate() const;
};

/// Masked MSE over S plus the Sobolev smoothness penalty:
/// (1/|S|) sum_{(i,j) in S} (X(i,j) - Xbar(i,j))^2 + lambda * sobolev(Xbar, L, eps).
double reconstruction_loss(const Matrix& x_bar, const Matrix& x_true, const IndexSet& s,
                           const Matrix& l, double lambda, double epsilon);

/// Derivative of reconstruction_loss with respect to Xbar.
Matrix reconstruction_loss_gradient(const Matrix& x_bar, const Matrix& x_true, const IndexSet& s,
                                    const Matrix& l, double lambda, double epsilon);

struct LossAndGrads {
    double loss = 0.0;
    Matrix reconstruction;
    CascadeGrads grads;
};

/// Forward + reverse pass in one call; exact analytic gradients for every
/// weight matrix and branch scalar. Throws if a layer produces non-finite
/// values, naming the layer.
LossAndGrads loss_and_gradients(const CascadeModel& model, const Matrix& input_diff,
                                const Matrix& x_true, const IndexSet& s, const Matrix& l,
                                double lambda, double epsilon, const Matrix& scaled_laplacian);

// Flat parameter views used by the optimizer and the checkpoint format.
// Order: per layer, branch rho = 1..alpha, orders k = 1..rho, each weight
// matrix row-major, then the layer's branch scalars.
std::vector<double> flatten_params(const CascadeModel& model);
void unflatten_params(CascadeModel& model, const std::vector<double>& flat);
std::vector<double> flatten_grads(const CascadeGrads& grads);

std::vector<double> flatten_params(const GcnModel& model);
void unflatten_params(GcnModel& model, const std::vector<double>& flat);

/// Adam with decoupled weight decay (beta1 = 0.9, beta2 = 0.999, zeta = 1e-8).
class AdamOptimizer {
public:
    AdamOptimizer(std::size_t param_count, double learning_rate, double weight_decay);
    void step(std::vector<double>& params, const std::vector<double>& grads);

private:
    double lr_, wd_;
    int t_ = 0;
    std::vector<double> m_, v_;
};

struct TrainResult {
    Matrix reconstruction;
    std::vector<double> loss_history;  // loss at the parameters of each epoch
};

struct CascadeTrainResult : TrainResult {
    CascadeModel model;
};

struct GcnTrainResult : TrainResult {
    GcnModel model;
};

/// Trains a freshly initialized cascade model on the observed signal.
/// Deterministic per seed. Aborts with a diagnostic if the loss diverges
/// (non-finite or above 1e12).
CascadeTrainResult train_cascade(const Matrix& observed, const SamplingMask& mask,
                                 const LaplacianBundle& lap, const CascadeConfig& model_cfg,
                                 const TrainConfig& train_cfg);

/// Same trainer and loss for the GCN baseline.
GcnTrainResult train_gcn(const Matrix& observed, const SamplingMask& mask,
                         const LaplacianBundle& lap, const Graph& g, const GcnConfig& model_cfg,
                         const TrainConfig& train_cfg);

// Checkpoint serialization (JSON: dims, alpha, activation, row-major weight
// arrays, branch scalars, seed).
void save_cascade_model(const CascadeModel& model, std::uint64_t seed, const std::string& path);
std::pair<CascadeModel, std::uint64_t> load_cascade_model(const std::string& path);
void save_gcn_model(const GcnModel& model, std::uint64_t seed, const std::string& path);
std::pair<GcnModel, std::uint64_t> load_gcn_model(const std::string& path);

}  // namespace tvg::gnn
