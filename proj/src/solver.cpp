#include "tvg/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "tvg/temporal.hpp"

namespace tvg {

namespace {

struct OperatorWorkspace {
    Matrix t;   // X D_h D_h^T
    Matrix lt;  // L * t
};

void apply_operator(const Matrix& x, const SamplingMask& mask, const Matrix& l,
                    const SolverConfig& cfg, OperatorWorkspace& ws, Matrix& out) {
    temporal_second_difference_into(x, ws.t);
    multiply_into(l, ws.t, ws.lt);
    if (out.rows() != x.rows() || out.cols() != x.cols()) out = Matrix(x.rows(), x.cols());
    const std::size_t total = x.size();
    const double ups = cfg.upsilon, eps = cfg.epsilon;
    for (std::size_t i = 0; i < total; ++i) {
        out.data()[i] = mask.mask.data()[i] * x.data()[i] +
                        ups * (ws.lt.data()[i] + eps * ws.t.data()[i]);
    }
}

void check_shapes(const Matrix& x, const SamplingMask& mask, const Matrix& l) {
    if (!x.same_shape(mask.mask)) {
        throw std::invalid_argument("recon: signal is " + x.shape_string() + " but mask is " +
                                    mask.mask.shape_string());
    }
    if (l.rows() != l.cols() || l.rows() != x.rows()) {
        throw std::invalid_argument("recon: Laplacian is " + l.shape_string() +
                                    " but signal has " + std::to_string(x.rows()) + " nodes");
    }
}

}  // namespace

void SolverConfig::validate() const {
    if (!(upsilon > 0.0)) throw std::invalid_argument("SolverConfig: upsilon must be > 0");
    if (epsilon < 0.0) throw std::invalid_argument("SolverConfig: epsilon must be >= 0");
    if (!(cg_tol > 0.0)) throw std::invalid_argument("SolverConfig: cg_tol must be > 0");
    if (cg_max_iter < 1) throw std::invalid_argument("SolverConfig: cg_max_iter must be >= 1");
}

Matrix recon_operator(const Matrix& x, const SamplingMask& mask, const Matrix& l,
                      const SolverConfig& cfg) {
    check_shapes(x, mask, l);
    OperatorWorkspace ws;
    Matrix out;
    apply_operator(x, mask, l, cfg, ws, out);
    return out;
}

ReconResult solve(const Matrix& observed, const SamplingMask& mask, const Matrix& l,
                  const SolverConfig& cfg) {
    cfg.validate();
    check_shapes(observed, mask, l);
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (mask.mask.data()[i] == 0.0 && observed.data()[i] != 0.0) {
            throw std::invalid_argument("solve: observed matrix has a nonzero entry outside "
                                        "the sampling mask");
        }
    }

    ReconResult res;
    const double norm_y = frobenius_norm(observed);
    if (norm_y == 0.0) {
        res.x = Matrix(observed.rows(), observed.cols());
        res.converged = true;
        return res;
    }

    OperatorWorkspace ws;
    Matrix x = observed;  // X0 = Y
    Matrix r(x.rows(), x.cols());
    Matrix ax;
    apply_operator(x, mask, l, cfg, ws, ax);
    for (std::size_t i = 0; i < r.size(); ++i) r.data()[i] = observed.data()[i] - ax.data()[i];

    Matrix p = r;
    Matrix ar;
    apply_operator(r, mask, l, cfg, ws, ar);
    Matrix ap = ar;
    double r_ar = frobenius_dot(r, ar);

    res.residual_history.push_back(frobenius_norm(r) / norm_y);

    int iter = 0;
    while (iter < cfg.cg_max_iter) {
        const double ap_ap = frobenius_dot(ap, ap);
        if (ap_ap <= 0.0) break;  // p in the null space: residual cannot improve
        const double alpha = r_ar / ap_ap;
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        ++iter;

        const double rel = frobenius_norm(r) / norm_y;
        res.residual_history.push_back(rel);
        if (rel < cfg.cg_tol) {
            // guard against drift of the recursive residual
            apply_operator(x, mask, l, cfg, ws, ax);
            double true_rel = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) {
                const double d = observed.data()[i] - ax.data()[i];
                true_rel += d * d;
            }
            true_rel = std::sqrt(true_rel) / norm_y;
            if (true_rel < cfg.cg_tol) break;
            // restart from the true residual
            for (std::size_t i = 0; i < r.size(); ++i) {
                r.data()[i] = observed.data()[i] - ax.data()[i];
            }
            p = r;
            apply_operator(r, mask, l, cfg, ws, ar);
            ap = ar;
            r_ar = frobenius_dot(r, ar);
            continue;
        }

        apply_operator(r, mask, l, cfg, ws, ar);
        const double r_ar_next = frobenius_dot(r, ar);
        const double beta = r_ar_next / r_ar;
        r_ar = r_ar_next;
        for (std::size_t i = 0; i < p.size(); ++i) {
            p.data()[i] = r.data()[i] + beta * p.data()[i];
            ap.data()[i] = ar.data()[i] + beta * ap.data()[i];
        }
    }

    apply_operator(x, mask, l, cfg, ws, ax);
    double true_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = observed.data()[i] - ax.data()[i];
        true_res += d * d;
    }
    res.final_residual = std::sqrt(true_res) / norm_y;
    res.converged = res.final_residual < cfg.cg_tol;
    res.iterations = iter;
    res.x = std::move(x);
    return res;
}

double objective_value(const Matrix& x, const Matrix& observed, const SamplingMask& mask,
                       const Matrix& l, const SolverConfig& cfg) {
    check_shapes(x, mask, l);
    if (!x.same_shape(observed)) {
        throw std::invalid_argument("objective_value: shape mismatch");
    }
    double fit = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = mask.mask.data()[i] * x.data()[i] - observed.data()[i];
        fit += d * d;
    }
    return 0.5 * fit + 0.5 * cfg.upsilon * sobolev_smoothness(x, l, cfg.epsilon);
}

}  // namespace tvg
