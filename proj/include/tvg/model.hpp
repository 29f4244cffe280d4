#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvg/graph.hpp"
#include "tvg/matrix.hpp"

namespace tvg::gnn {

enum class Activation { identity, relu };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

/// One cascade layer: branches rho = 1..alpha, branch rho carrying exactly
/// rho weight matrices (Chebyshev orders 1..rho) and a learnable mixing
/// scalar mu_rho. All weight matrices share (in_dim, out_dim).
struct CascadeLayerParams {
    std::vector<std::vector<Matrix>> weights;  // [rho-1][k-1], in_dim x out_dim
    std::vector<double> branch_scalars;        // mu_rho, size alpha

    std::size_t alpha() const { return weights.size(); }
    std::size_t in_dim() const { return weights.at(0).at(0).rows(); }
    std::size_t out_dim() const { return weights.at(0).at(0).cols(); }
    void validate() const;
};

/// Stack of cascade layers mapping an N x (M-1) temporal-difference input to
/// an N x M reconstruction. Hidden layers are followed by the activation;
/// the output layer is linear.
struct CascadeModel {
    std::vector<CascadeLayerParams> layers;
    Activation activation = Activation::relu;

    std::size_t input_dim() const { return layers.front().in_dim(); }
    std::size_t output_dim() const { return layers.back().out_dim(); }
    void validate() const;
};

/// Architecture description: dims (M-1 -> H -> ... -> H -> M) with
/// layer_count layers, every branch count alpha, shared activation.
struct CascadeConfig {
    std::size_t signal_times = 0;  // M
    std::size_t layer_count = 2;
    std::size_t hidden_dim = 8;
    std::size_t alpha = 3;
    Activation activation = Activation::relu;

    std::vector<std::size_t> dims() const;
    void validate() const;
};

/// Glorot-uniform initialized model; mu_rho starts at 1/alpha so the initial
/// cascade is an average over branches.
CascadeModel init_cascade_model(const CascadeConfig& cfg, std::uint64_t seed);

/// Chebyshev basis of the scaled Laplacian:
/// Z^(1) = X, Z^(2) = Lhat X, Z^(k) = 2 Lhat Z^(k-1) - Z^(k-2).
std::vector<Matrix> cheb_basis(const Matrix& x, const Matrix& scaled_laplacian,
                               std::size_t order);

/// Single cascade layer: sum_rho mu_rho sum_{k<=rho} Z^(k) W^(k)_rho.
Matrix cascade_forward(const Matrix& h_in, const CascadeLayerParams& params,
                       const Matrix& scaled_laplacian);

/// Per-layer intermediates kept by the forward pass for backpropagation.
struct CascadeCache {
    std::vector<Matrix> inputs;             // input of each layer
    std::vector<std::vector<Matrix>> cheb;  // Chebyshev basis of each layer input
    std::vector<Matrix> preact;             // layer output before activation
};

/// Full forward pass; fills `cache` when given.
Matrix model_forward(const Matrix& input_diff, const CascadeModel& model,
                     const Matrix& scaled_laplacian, CascadeCache* cache = nullptr);

/// Gradients of a scalar loss with respect to all layer parameters, given
/// d(loss)/d(output). Mirrors the parameter structure.
struct CascadeGrads {
    std::vector<CascadeLayerParams> layers;
};

CascadeGrads model_backward(const CascadeModel& model, const CascadeCache& cache,
                            const Matrix& grad_output, const Matrix& scaled_laplacian);

// ---------------------------------------------------------------------------
// GCN baseline: layers X' = Ahat X W with the renormalized adjacency
// Ahat = Dt^{-1/2} (A + I) Dt^{-1/2}, same dims/activation/loss as above.
// ---------------------------------------------------------------------------

struct GcnModel {
    std::vector<Matrix> weights;
    Activation activation = Activation::relu;

    std::size_t input_dim() const { return weights.front().rows(); }
    std::size_t output_dim() const { return weights.back().cols(); }
};

struct GcnConfig {
    std::size_t signal_times = 0;
    std::size_t layer_count = 2;
    std::size_t hidden_dim = 8;
    Activation activation = Activation::relu;

    std::vector<std::size_t> dims() const;
    void validate() const;
};

Matrix gcn_normalized_adjacency(const Graph& g);

GcnModel init_gcn_model(const GcnConfig& cfg, std::uint64_t seed);

struct GcnCache {
    std::vector<Matrix> propagated;  // Ahat * input per layer
    std::vector<Matrix> preact;
};

Matrix gcn_forward(const Matrix& input_diff, const GcnModel& model, const Matrix& ahat,
                   GcnCache* cache = nullptr);

std::vector<Matrix> gcn_backward(const GcnModel& model, const GcnCache& cache,
                                 const Matrix& grad_output, const Matrix& ahat);

}  // namespace tvg::gnn
