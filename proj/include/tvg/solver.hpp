#pragma once

#include <vector>

#include "tvg/matrix.hpp"
#include "tvg/sampling.hpp"

namespace tvg {

/// Settings for the fit-plus-smoothness reconstruction
///   min_X 1/2 ||J o X - Y||_F^2 + upsilon/2 tr((X D_h)^T (L + eps I) X D_h).
/// epsilon = 0 gives the plain temporal-smoothness objective (TGSR);
/// epsilon > 0 the Sobolev-regularized variant (GraphTRSS).
struct SolverConfig {
    double upsilon = 0.5;
    double epsilon = 0.05;
    double cg_tol = 1e-8;
    int cg_max_iter = 2000;

    void validate() const;
};

struct ReconResult {
    Matrix x;
    int iterations = 0;
    double final_residual = 0.0;  // ||A(x) - Y||_F / ||Y||_F, recomputed at exit
    bool converged = false;
    std::vector<double> residual_history;  // relative residual per iteration
};

/// Gradient operator of the objective at X (stationarity reads A(X) = Y):
/// A(X) = J o X + upsilon (L + eps I) X D_h D_h^T, with the temporal factor
/// applied as a second-difference stencil rather than materialized matrices.
Matrix recon_operator(const Matrix& x, const SamplingMask& mask, const Matrix& l,
                      const SolverConfig& cfg);

/// Solves A(X) = Y by a conjugate-direction Krylov iteration started at
/// X0 = Y. The residual-minimizing (conjugate residual) recursion is used so
/// the residual norm is non-increasing; for this symmetric PSD operator it
/// converges like conjugate gradients. Reaching the iteration cap returns the
/// current iterate with converged = false, never silently.
ReconResult solve(const Matrix& observed, const SamplingMask& mask, const Matrix& l,
                  const SolverConfig& cfg);

/// Objective value 1/2 ||J o X - Y||_F^2 + upsilon/2 * sobolev(X, L, eps).
double objective_value(const Matrix& x, const Matrix& observed, const SamplingMask& mask,
                       const Matrix& l, const SolverConfig& cfg);

}  // namespace tvg
