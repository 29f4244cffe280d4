#pragma once

#include "tvg/graph.hpp"
#include "tvg/matrix.hpp"

namespace tvg {

/// Node-by-time signal matrix: column s is the graph signal at time s.
struct TimeSignal {
    Matrix values;

    static TimeSignal checked(Matrix values);
    std::size_t nodes() const { return values.rows(); }
    std::size_t times() const { return values.cols(); }
};

/// Consecutive column differences: column s of the result is x_{s+1} - x_s.
/// Same effect as multiplying by the first-difference operator on the right,
/// computed by direct subtraction.
Matrix temporal_difference(const Matrix& x);

/// Discrete p-Dirichlet form
/// S_p(x) = (1/p) sum_i [ sum_j A(i,j) (x(j) - x(i))^2 ]^{p/2}.
double p_dirichlet(const std::vector<double>& x, const Graph& g, double p);

/// x^T L x for any symmetric matrix L.
double quadratic_form(const std::vector<double>& x, const Matrix& l);

/// tr(X^T L X), i.e. the column-wise sum of quadratic forms.
double quadratic_form(const Matrix& x, const Matrix& l);

/// Sobolev smoothness of the temporal differences:
/// tr((X D_h)^T (L + eps I) (X D_h))
///   = quadratic_form(temporal_difference(X), L) + eps * ||X D_h||_F^2.
double sobolev_smoothness(const Matrix& x, const Matrix& l, double epsilon);

/// X D_h D_h^T as a boundary-aware second-difference stencil:
/// col 1: -(x_2 - x_1); col s: (x_s - x_{s-1}) - (x_{s+1} - x_s);
/// col M: x_M - x_{M-1}. Appears in the reconstruction operator and in the
/// gradient of the Sobolev term.
void temporal_second_difference_into(const Matrix& x, Matrix& out);
Matrix temporal_second_difference(const Matrix& x);

}  // namespace tvg
