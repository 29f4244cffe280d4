#include "tvg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tvg/rng.hpp"

namespace tvg {

namespace detail {

void require_symmetric(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(std::string(what) + ": matrix not square (" +
                                    m.shape_string() + ")");
    }
    const double tol = 1e-12 * std::max(1.0, max_abs(m));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            if (std::fabs(m(i, j) - m(j, i)) > tol) {
                throw std::invalid_argument(std::string(what) + ": matrix not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

std::vector<std::vector<std::size_t>> connected_components(const Matrix& adjacency) {
    const std::size_t n = adjacency.rows();
    std::vector<int> label(n, -1);
    std::vector<std::vector<std::size_t>> components;
    std::vector<std::size_t> queue;
    for (std::size_t start = 0; start < n; ++start) {
        if (label[start] >= 0) continue;
        const int comp = static_cast<int>(components.size());
        components.emplace_back();
        queue.assign(1, start);
        label[start] = comp;
        while (!queue.empty()) {
            const std::size_t u = queue.back();
            queue.pop_back();
            components[static_cast<std::size_t>(comp)].push_back(u);
            for (std::size_t v = 0; v < n; ++v) {
                if (adjacency(u, v) != 0.0 && label[v] < 0) {
                    label[v] = comp;
                    queue.push_back(v);
                }
            }
        }
    }
    for (auto& c : components) std::sort(c.begin(), c.end());
    return components;
}

}  // namespace detail

namespace {

std::string component_summary(const std::vector<std::vector<std::size_t>>& comps) {
    std::string msg = std::to_string(comps.size()) + " components:";
    for (std::size_t c = 0; c < comps.size(); ++c) {
        msg += " {";
        for (std::size_t i = 0; i < comps[c].size() && i < 8; ++i) {
            if (i) msg += ",";
            msg += std::to_string(comps[c][i]);
        }
        if (comps[c].size() > 8) msg += ",... " + std::to_string(comps[c].size()) + " nodes";
        msg += "}";
    }
    return msg;
}

}  // namespace

Graph::Graph(Matrix adjacency, std::vector<std::vector<double>> coords)
    : adjacency_(std::move(adjacency)), coords_(std::move(coords)) {
    const std::size_t n = adjacency_.rows();
    if (n == 0 || adjacency_.cols() != n) {
        throw std::invalid_argument("Graph: adjacency must be square and nonempty");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency_(i, i) != 0.0) {
            throw std::invalid_argument("Graph: nonzero diagonal at node " + std::to_string(i));
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double w = adjacency_(i, j);
            if (!std::isfinite(w) || w < 0.0) {
                throw std::invalid_argument("Graph: invalid weight at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
            }
            if (adjacency_(i, j) != adjacency_(j, i)) {
                throw std::invalid_argument("Graph: adjacency not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    if (!coords_.empty() && coords_.size() != n) {
        throw std::invalid_argument("Graph: coordinate count does not match node count");
    }
    const auto comps = detail::connected_components(adjacency_);
    if (comps.size() != 1) {
        throw std::invalid_argument("Graph: disconnected, " + component_summary(comps));
    }
}

std::vector<double> Graph::degrees() const {
    const std::size_t n = node_count();
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += adjacency_(i, j);
        d[i] = s;
    }
    return d;
}

Graph build_knn_graph(const std::vector<std::vector<double>>& coords, std::size_t k,
                      std::optional<double> sigma) {
    const std::size_t n = coords.size();
    if (k < 1) throw std::invalid_argument("build_knn_graph: k must be >= 1");
    if (n < k + 1) {
        throw std::invalid_argument("build_knn_graph: need at least k+1 points, got " +
                                    std::to_string(n));
    }
    const std::size_t dim = coords[0].size();
    if (dim == 0) throw std::invalid_argument("build_knn_graph: empty coordinates");
    for (const auto& p : coords) {
        if (p.size() != dim) {
            throw std::invalid_argument("build_knn_graph: inconsistent coordinate dimensions");
        }
        for (double v : p) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("build_knn_graph: non-finite coordinate");
            }
        }
    }
    if (sigma && !(*sigma > 0.0)) {
        throw std::invalid_argument("build_knn_graph: sigma must be positive");
    }

    Matrix dist2(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double diff = coords[i][c] - coords[j][c];
                d2 += diff * diff;
            }
            if (d2 == 0.0) {
                throw std::invalid_argument("build_knn_graph: duplicate points " +
                                            std::to_string(i) + " and " + std::to_string(j));
            }
            dist2(i, j) = d2;
            dist2(j, i) = d2;
        }
    }

    // Union symmetrization, tie-inclusive: keep every neighbor at the k-th
    // smallest distance (e.g. the four corners of a unit square with k=1
    // yield the 4-cycle, not a path).
    Matrix selected(n, n);
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) order.emplace_back(dist2(i, j), j);
        }
        std::sort(order.begin(), order.end());
        const double kth = order[k - 1].first;
        for (const auto& [d2, j] : order) {
            if (d2 > kth) break;
            selected(i, j) = 1.0;
        }
    }

    double sum_d2 = 0.0;
    std::size_t edge_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (selected(i, j) != 0.0 || selected(j, i) != 0.0) {
                sum_d2 += dist2(i, j);
                ++edge_count;
            }
        }
    }
    const double sigma2 =
        sigma ? (*sigma) * (*sigma) : sum_d2 / static_cast<double>(edge_count);

    Matrix adjacency(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (selected(i, j) != 0.0 || selected(j, i) != 0.0) {
                const double w = std::exp(-dist2(i, j) / sigma2);
                adjacency(i, j) = w;
                adjacency(j, i) = w;
            }
        }
    }
    return Graph(std::move(adjacency), coords);
}

LaplacianBundle normalized_laplacian(const Graph& g) {
    const std::size_t n = g.node_count();
    const auto deg = g.degrees();
    for (std::size_t i = 0; i < n; ++i) {
        if (deg[i] <= 0.0) {
            throw std::invalid_argument("normalized_laplacian: zero-degree node " +
                                        std::to_string(i));
        }
    }
    std::vector<double> dinv(n);
    for (std::size_t i = 0; i < n; ++i) dinv[i] = 1.0 / std::sqrt(deg[i]);

    Matrix l(n, n);
    const Matrix& a = g.adjacency();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) l(i, j) = -dinv[i] * a(i, j) * dinv[j];
        l(i, i) += 1.0;
    }

    LaplacianBundle bundle;
    bundle.lambda_max = estimate_lambda_max(l);
    bundle.scaled = Matrix(n, n);
    const double inv = 2.0 / bundle.lambda_max;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) bundle.scaled(i, j) = inv * l(i, j);
        bundle.scaled(i, i) -= 1.0;
    }
    bundle.laplacian = std::move(l);
    return bundle;
}

double estimate_lambda_max(const Matrix& l) {
    detail::require_symmetric(l, "estimate_lambda_max");
    const std::size_t n = l.rows();

    Rng rng(0x51f15eedULL);  // fixed seed so the estimate is reproducible
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    double nv = norm2(v);
    if (nv == 0.0) nv = 1.0;
    for (auto& x : v) x /= nv;

    double lambda = 0.0;
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<double> w = multiply(l, v);
        const double rayleigh = dot(v, w);
        const double nw = norm2(w);
        if (nw == 0.0) return 1e-12;  // v landed in the null space exactly
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
        if (iter > 0 && std::fabs(rayleigh - lambda) <= 1e-9 * std::max(std::fabs(rayleigh), 1e-30)) {
            return std::max(rayleigh, 1e-12);
        }
        lambda = rayleigh;
    }
    std::fprintf(stderr,
                 "warning: estimate_lambda_max did not converge in 1000 iterations; "
                 "falling back to the bound 2.0\n");
    return 2.0;
}

std::pair<Matrix, std::vector<double>> symmetric_eigendecomposition(const Matrix& l) {
    detail::require_symmetric(l, "symmetric_eigendecomposition");
    const std::size_t n = l.rows();
    Matrix a = l;
    Matrix u = Matrix::identity(n);
    const double norm = frobenius_norm(a);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
        return std::sqrt(s);
    };

    bool converged = (norm == 0.0) || off_norm() <= 1e-12 * norm;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        const double arp = a(r, p), arq = a(r, q);
                        a(r, p) = arp - s * (arq + tau * arp);
                        a(p, r) = a(r, p);
                        a(r, q) = arq + s * (arp - tau * arq);
                        a(q, r) = a(r, q);
                    }
                    const double urp = u(r, p), urq = u(r, q);
                    u(r, p) = urp - s * (urq + tau * urp);
                    u(r, q) = urq + s * (urp - tau * urq);
                }
            }
        }
        converged = off_norm() <= 1e-12 * norm;
    }
    if (!converged) {
        throw std::runtime_error("symmetric_eigendecomposition: Jacobi did not converge "
                                 "within 100 sweeps");
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

    std::vector<double> lambdas(n);
    Matrix sorted(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        lambdas[c] = a(idx[c], idx[c]);
        for (std::size_t r = 0; r < n; ++r) sorted(r, c) = u(r, idx[c]);
    }
    return {std::move(sorted), std::move(lambdas)};
}

}  // namespace tvg
