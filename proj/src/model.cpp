#include "tvg/model.hpp"

#include <cmath>
#include <stdexcept>

#include "tvg/rng.hpp"

namespace tvg::gnn {

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "identity" || name == "linear") return Activation::identity;
    throw std::invalid_argument("unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
    return a == Activation::relu ? "relu" : "identity";
}

void CascadeLayerParams::validate() const {
    if (weights.empty() || weights.size() != branch_scalars.size()) {
        throw std::invalid_argument("CascadeLayerParams: branch count mismatch");
    }
    const std::size_t in = in_dim(), out = out_dim();
    for (std::size_t rho = 0; rho < weights.size(); ++rho) {
        if (weights[rho].size() != rho + 1) {
            throw std::invalid_argument("CascadeLayerParams: branch " + std::to_string(rho + 1) +
                                        " must hold exactly " + std::to_string(rho + 1) +
                                        " weight matrices");
        }
        for (const Matrix& w : weights[rho]) {
            if (w.rows() != in || w.cols() != out) {
                throw std::invalid_argument("CascadeLayerParams: inconsistent weight shapes");
            }
        }
    }
}

void CascadeModel::validate() const {
    if (layers.empty()) throw std::invalid_argument("CascadeModel: no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        layers[l].validate();
        if (l > 0 && layers[l].in_dim() != layers[l - 1].out_dim()) {
            throw std::invalid_argument("CascadeModel: dim mismatch between layers " +
                                        std::to_string(l - 1) + " and " + std::to_string(l));
        }
    }
}

std::vector<std::size_t> CascadeConfig::dims() const {
    std::vector<std::size_t> d;
    d.push_back(signal_times - 1);
    for (std::size_t l = 1; l < layer_count; ++l) d.push_back(hidden_dim);
    d.push_back(signal_times);
    return d;
}

void CascadeConfig::validate() const {
    if (signal_times < 2) throw std::invalid_argument("CascadeConfig: need M >= 2");
    if (layer_count < 1) throw std::invalid_argument("CascadeConfig: need at least one layer");
    if (layer_count > 1 && hidden_dim < 1) {
        throw std::invalid_argument("CascadeConfig: hidden_dim must be >= 1");
    }
    if (alpha < 1) throw std::invalid_argument("CascadeConfig: alpha must be >= 1");
}

namespace {

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix w(rows, cols);
    const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (double& v : w.data()) v = rng.uniform(-bound, bound);
    return w;
}

void apply_activation(Matrix& m, Activation a) {
    if (a == Activation::relu) {
        for (double& v : m.data()) v = v > 0.0 ? v : 0.0;
    }
}

}  // namespace

CascadeModel init_cascade_model(const CascadeConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto dims = cfg.dims();
    Rng rng(seed);
    CascadeModel model;
    model.activation = cfg.activation;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        CascadeLayerParams layer;
        layer.branch_scalars.assign(cfg.alpha, 1.0 / static_cast<double>(cfg.alpha));
        layer.weights.resize(cfg.alpha);
        for (std::size_t rho = 0; rho < cfg.alpha; ++rho) {
            for (std::size_t k = 0; k <= rho; ++k) {
                layer.weights[rho].push_back(glorot_uniform(dims[l], dims[l + 1], rng));
            }
        }
        model.layers.push_back(std::move(layer));
    }
    model.validate();
    return model;
}

std::vector<Matrix> cheb_basis(const Matrix& x, const Matrix& scaled_laplacian,
                               std::size_t order) {
    if (order < 1) throw std::invalid_argument("cheb_basis: order must be >= 1");
    if (scaled_laplacian.rows() != scaled_laplacian.cols() ||
        scaled_laplacian.rows() != x.rows()) {
        throw std::invalid_argument("cheb_basis: Laplacian is " +
                                    scaled_laplacian.shape_string() + " but X is " +
                                    x.shape_string());
    }
    std::vector<Matrix> z;
    z.reserve(order);
    z.push_back(x);
    if (order >= 2) z.push_back(multiply(scaled_laplacian, x));
    for (std::size_t k = 2; k < order; ++k) {
        Matrix next = multiply(scaled_laplacian, z[k - 1]);
        scale_in_place(next, 2.0);
        axpy(-1.0, z[k - 2], next);
        z.push_back(std::move(next));
    }
    return z;
}

namespace {

Matrix cascade_from_basis(const std::vector<Matrix>& z, const CascadeLayerParams& params) {
    Matrix out(z[0].rows(), params.out_dim());
    Matrix zw;
    for (std::size_t rho = 0; rho < params.alpha(); ++rho) {
        for (std::size_t k = 0; k <= rho; ++k) {
            multiply_into(z[k], params.weights[rho][k], zw);
            axpy(params.branch_scalars[rho], zw, out);
        }
    }
    return out;
}

}  // namespace

Matrix cascade_forward(const Matrix& h_in, const CascadeLayerParams& params,
                       const Matrix& scaled_laplacian) {
    params.validate();
    if (h_in.cols() != params.in_dim()) {
        throw std::invalid_argument("cascade_forward: input width " +
                                    std::to_string(h_in.cols()) + " != in_dim " +
                                    std::to_string(params.in_dim()));
    }
    const auto z = cheb_basis(h_in, scaled_laplacian, params.alpha());
    return cascade_from_basis(z, params);
}

Matrix model_forward(const Matrix& input_diff, const CascadeModel& model,
                     const Matrix& scaled_laplacian, CascadeCache* cache) {
    model.validate();
    if (input_diff.cols() != model.input_dim()) {
        throw std::invalid_argument("model_forward: input width " +
                                    std::to_string(input_diff.cols()) + " != expected " +
                                    std::to_string(model.input_dim()));
    }
    if (cache) {
        cache->inputs.clear();
        cache->cheb.clear();
        cache->preact.clear();
    }
    Matrix h = input_diff;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        auto z = cheb_basis(h, scaled_laplacian, layer.alpha());
        Matrix out = cascade_from_basis(z, layer);
        if (cache) {
            cache->inputs.push_back(std::move(h));
            cache->cheb.push_back(std::move(z));
            cache->preact.push_back(out);
        }
        if (l + 1 < model.layers.size()) apply_activation(out, model.activation);
        h = std::move(out);
    }
    return h;
}

CascadeGrads model_backward(const CascadeModel& model, const CascadeCache& cache,
                            const Matrix& grad_output, const Matrix& scaled_laplacian) {
    const std::size_t num_layers = model.layers.size();
    if (cache.inputs.size() != num_layers) {
        throw std::invalid_argument("model_backward: cache does not match model");
    }
    CascadeGrads grads;
    grads.layers.resize(num_layers);

    Matrix g = grad_output;  // gradient w.r.t. the layer output being processed
    for (std::size_t li = num_layers; li-- > 0;) {
        const auto& layer = model.layers[li];
        const auto& z = cache.cheb[li];
        const std::size_t alpha = layer.alpha();

        // activation follows every layer except the last
        if (li + 1 < num_layers && model.activation == Activation::relu) {
            const Matrix& pre = cache.preact[li];
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (pre.data()[i] <= 0.0) g.data()[i] = 0.0;
            }
        }

        auto& lg = grads.layers[li];
        lg.branch_scalars.assign(alpha, 0.0);
        lg.weights.resize(alpha);

        // q_k = Z^(k)^T G is shared by all branches containing order k
        std::vector<Matrix> q(alpha);
        for (std::size_t k = 0; k < alpha; ++k) q[k] = multiply(transpose(z[k]), g);

        for (std::size_t rho = 0; rho < alpha; ++rho) {
            const double mu = layer.branch_scalars[rho];
            double mu_grad = 0.0;
            for (std::size_t k = 0; k <= rho; ++k) {
                lg.weights[rho].push_back(mu * q[k]);
                mu_grad += frobenius_dot(layer.weights[rho][k], q[k]);
            }
            lg.branch_scalars[rho] = mu_grad;
        }

        if (li == 0) break;  // input gradient not needed beyond the first layer

        // Gradient w.r.t. the layer input, via the adjoint of the Chebyshev
        // recurrence. a_k starts from G Wbar_k^T with Wbar_k = sum_{rho>=k}
        // mu_rho W^(k)_rho; then a_{k-1} += 2 Lhat a_k, a_{k-2} -= a_k, and
        // finally dU = a_1 + Lhat a_2 (Lhat symmetric).
        std::vector<Matrix> a(alpha);
        Matrix wbar, tmp;
        for (std::size_t k = 0; k < alpha; ++k) {
            wbar = Matrix(layer.in_dim(), layer.out_dim());
            for (std::size_t rho = k; rho < alpha; ++rho) {
                axpy(layer.branch_scalars[rho], layer.weights[rho][k], wbar);
            }
            a[k] = multiply(g, transpose(wbar));
        }
        for (std::size_t k = alpha; k-- > 2;) {
            multiply_into(scaled_laplacian, a[k], tmp);
            axpy(2.0, tmp, a[k - 1]);
            axpy(-1.0, a[k], a[k - 2]);
        }
        Matrix gin = std::move(a[0]);
        if (alpha >= 2) {
            multiply_into(scaled_laplacian, a[1], tmp);
            axpy(1.0, tmp, gin);
        }
        g = std::move(gin);
    }
    return grads;
}

// ---------------------------------------------------------------------------
// GCN baseline
// ---------------------------------------------------------------------------

std::vector<std::size_t> GcnConfig::dims() const {
    std::vector<std::size_t> d;
    d.push_back(signal_times - 1);
    for (std::size_t l = 1; l < layer_count; ++l) d.push_back(hidden_dim);
    d.push_back(signal_times);
    return d;
}

void GcnConfig::validate() const {
    if (signal_times < 2) throw std::invalid_argument("GcnConfig: need M >= 2");
    if (layer_count < 1) throw std::invalid_argument("GcnConfig: need at least one layer");
    if (layer_count > 1 && hidden_dim < 1) {
        throw std::invalid_argument("GcnConfig: hidden_dim must be >= 1");
    }
}

Matrix gcn_normalized_adjacency(const Graph& g) {
    const std::size_t n = g.node_count();
    const Matrix& a = g.adjacency();
    std::vector<double> dt(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 1.0;  // self loop
        for (std::size_t j = 0; j < n; ++j) s += a(i, j);
        dt[i] = 1.0 / std::sqrt(s);
    }
    Matrix ahat(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double aij = a(i, j) + (i == j ? 1.0 : 0.0);
            ahat(i, j) = dt[i] * aij * dt[j];
        }
    }
    return ahat;
}

GcnModel init_gcn_model(const GcnConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const auto dims = cfg.dims();
    Rng rng(seed);
    GcnModel model;
    model.activation = cfg.activation;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        model.weights.push_back(glorot_uniform(dims[l], dims[l + 1], rng));
    }
    return model;
}

Matrix gcn_forward(const Matrix& input_diff, const GcnModel& model, const Matrix& ahat,
                   GcnCache* cache) {
    if (model.weights.empty()) throw std::invalid_argument("gcn_forward: no layers");
    if (input_diff.cols() != model.input_dim()) {
        throw std::invalid_argument("gcn_forward: input width " +
                                    std::to_string(input_diff.cols()) + " != expected " +
                                    std::to_string(model.input_dim()));
    }
    if (cache) {
        cache->propagated.clear();
        cache->preact.clear();
    }
    Matrix h = input_diff;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        Matrix prop = multiply(ahat, h);
        Matrix out = multiply(prop, model.weights[l]);
        if (cache) {
            cache->propagated.push_back(std::move(prop));
            cache->preact.push_back(out);
        }
        if (l + 1 < model.weights.size()) apply_activation(out, model.activation);
        h = std::move(out);
    }
    return h;
}

std::vector<Matrix> gcn_backward(const GcnModel& model, const GcnCache& cache,
                                 const Matrix& grad_output, const Matrix& ahat) {
    const std::size_t num_layers = model.weights.size();
    if (cache.propagated.size() != num_layers) {
        throw std::invalid_argument("gcn_backward: cache does not match model");
    }
    std::vector<Matrix> grads(num_layers);
    Matrix g = grad_output;
    for (std::size_t li = num_layers; li-- > 0;) {
        if (li + 1 < num_layers && model.activation == Activation::relu) {
            const Matrix& pre = cache.preact[li];
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (pre.data()[i] <= 0.0) g.data()[i] = 0.0;
            }
        }
        grads[li] = multiply(transpose(cache.propagated[li]), g);
        if (li == 0) break;
        // d/d(input) of Ahat U W: Ahat^T G W^T, with Ahat symmetric
        g = multiply(ahat, multiply(g, transpose(model.weights[li])));
    }
    return grads;
}

}  // namespace tvg::gnn
