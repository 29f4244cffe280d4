#include "tvg/temporal.hpp"

#include <cmath>
#include <stdexcept>

namespace tvg {

TimeSignal TimeSignal::checked(Matrix values) {
    if (values.rows() == 0 || values.cols() < 2) {
        throw std::invalid_argument("TimeSignal: need at least one node and two time steps, got " +
                                    values.shape_string());
    }
    if (!all_finite(values)) {
        throw std::invalid_argument("TimeSignal: non-finite entry");
    }
    return TimeSignal{std::move(values)};
}

Matrix temporal_difference(const Matrix& x) {
    if (x.cols() < 2) {
        throw std::invalid_argument("temporal_difference: need at least two time steps, got " +
                                    x.shape_string());
    }
    Matrix d(x.rows(), x.cols() - 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* xi = x.row(i);
        double* di = d.row(i);
        for (std::size_t s = 0; s + 1 < x.cols(); ++s) di[s] = xi[s + 1] - xi[s];
    }
    return d;
}

double p_dirichlet(const std::vector<double>& x, const Graph& g, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("p_dirichlet: p must be positive");
    const std::size_t n = g.node_count();
    if (x.size() != n) throw std::invalid_argument("p_dirichlet: signal length mismatch");
    const Matrix& a = g.adjacency();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = a(i, j);
            if (w == 0.0) continue;
            const double diff = x[j] - x[i];
            inner += w * diff * diff;
        }
        total += std::pow(inner, p / 2.0);
    }
    return total / p;
}

double quadratic_form(const std::vector<double>& x, const Matrix& l) {
    if (l.rows() != l.cols() || l.rows() != x.size()) {
        throw std::invalid_argument("quadratic_form: shape mismatch");
    }
    return dot(x, multiply(l, x));
}

double quadratic_form(const Matrix& x, const Matrix& l) {
    if (l.rows() != l.cols() || l.rows() != x.rows()) {
        throw std::invalid_argument("quadratic_form: shape mismatch, L is " + l.shape_string() +
                                    ", X is " + x.shape_string());
    }
    return frobenius_dot(x, multiply(l, x));
}

double sobolev_smoothness(const Matrix& x, const Matrix& l, double epsilon) {
    if (epsilon < 0.0) throw std::invalid_argument("sobolev_smoothness: epsilon must be >= 0");
    const Matrix diff = temporal_difference(x);
    return quadratic_form(diff, l) + epsilon * frobenius_dot(diff, diff);
}

void temporal_second_difference_into(const Matrix& x, Matrix& out) {
    const std::size_t n = x.rows(), m = x.cols();
    if (out.rows() != n || out.cols() != m) out = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i);
        double* ti = out.row(i);
        if (m == 1) {
            ti[0] = 0.0;
            continue;
        }
        ti[0] = -(xi[1] - xi[0]);
        for (std::size_t s = 1; s + 1 < m; ++s) {
            ti[s] = (xi[s] - xi[s - 1]) - (xi[s + 1] - xi[s]);
        }
        ti[m - 1] = xi[m - 1] - xi[m - 2];
    }
}

Matrix temporal_second_difference(const Matrix& x) {
    Matrix out;
    temporal_second_difference_into(x, out);
    return out;
}

}  // namespace tvg
