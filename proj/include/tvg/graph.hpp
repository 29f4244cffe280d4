#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tvg/matrix.hpp"

namespace tvg {

/// Connected, undirected, weighted graph. The adjacency matrix is validated
/// at construction (exact symmetry, nonnegative weights, zero diagonal,
/// connectivity) and immutable afterwards, so instances are safe to share
/// across threads.
class Graph {
public:
    /// Throws std::invalid_argument if the adjacency is not square/symmetric,
    /// has a nonzero diagonal or negative weights, or if the graph is
    /// disconnected (the message lists the components).
    explicit Graph(Matrix adjacency, std::vector<std::vector<double>> coords = {});

    std::size_t node_count() const { return adjacency_.rows(); }
    const Matrix& adjacency() const { return adjacency_; }
    bool has_coords() const { return !coords_.empty(); }
    const std::vector<std::vector<double>>& coords() const { return coords_; }

    std::vector<double> degrees() const;

private:
    Matrix adjacency_;
    std::vector<std::vector<double>> coords_;
};

/// Normalized Laplacian together with its estimated spectral radius and the
/// shifted/scaled matrix used by Chebyshev filters.
struct LaplacianBundle {
    Matrix laplacian;   // L = I - D^{-1/2} A D^{-1/2}
    double lambda_max;  // power-iteration estimate of the largest eigenvalue
    Matrix scaled;      // 2 L / lambda_max - I, spectrum in [-1, 1]
};

/// k-NN graph from node coordinates with Gaussian kernel weights
/// w_ij = exp(-d_ij^2 / sigma^2). Neighbor selection is tie-inclusive: every
/// point at the k-th smallest distance is kept, and the edge set is the union
/// over both endpoints. When sigma is not given, sigma^2 defaults to the mean
/// squared distance over the retained edges.
Graph build_knn_graph(const std::vector<std::vector<double>>& coords, std::size_t k,
                      std::optional<double> sigma = std::nullopt);

LaplacianBundle normalized_laplacian(const Graph& g);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration from a
/// fixed seeded start vector (relative Rayleigh change < 1e-9, at most 1000
/// iterations). Falls back to the analytic bound 2.0 with a warning on
/// stderr if the iteration does not settle.
double estimate_lambda_max(const Matrix& l);

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns (U, lambda) with columns of U orthonormal and eigenvalues
/// ascending. Intended for the small matrices of the synthetic generator.
std::pair<Matrix, std::vector<double>> symmetric_eigendecomposition(const Matrix& l);

namespace detail {
// Connected components by BFS over nonzero adjacency entries; exposed for tests.
std::vector<std::vector<std::size_t>> connected_components(const Matrix& adjacency);
void require_symmetric(const Matrix& m, const char* what);
}  // namespace detail

}  // namespace tvg
