#include "tvg/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tvg::bench {

Metrics compute_metrics(const Matrix& x_hat, const Matrix& x_true, const IndexSet& eval_indices) {
    if (eval_indices.empty()) {
        throw std::invalid_argument("compute_metrics: empty evaluation set");
    }
    if (!x_hat.same_shape(x_true)) {
        throw std::invalid_argument("compute_metrics: shape mismatch " + x_hat.shape_string() +
                                    " vs " + x_true.shape_string());
    }
    double sq = 0.0, abs = 0.0, pct = 0.0;
    std::size_t pct_count = 0;
    for (const auto& [i, j] : eval_indices) {
        if (i >= x_true.rows() || j >= x_true.cols()) {
            throw std::invalid_argument("compute_metrics: evaluation index out of range");
        }
        const double err = x_hat(i, j) - x_true(i, j);
        sq += err * err;
        abs += std::fabs(err);
        const double truth = std::fabs(x_true(i, j));
        if (truth >= 1e-8) {
            pct += std::fabs(err) / truth;
            ++pct_count;
        }
    }
    const double count = static_cast<double>(eval_indices.size());
    Metrics m;
    m.rmse = std::sqrt(sq / count);
    m.mae = abs / count;
    m.mape_skipped = eval_indices.size() - pct_count;
    m.mape = pct_count > 0 ? pct / static_cast<double>(pct_count)
                           : std::numeric_limits<double>::quiet_NaN();
    return m;
}

Matrix mean_imputation(const Matrix& observed, const SamplingMask& mask) {
    if (!observed.same_shape(mask.mask)) {
        throw std::invalid_argument("mean_imputation: shape mismatch");
    }
    Matrix out = observed;
    for (std::size_t j = 0; j < observed.cols(); ++j) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < observed.rows(); ++i) {
            if (mask.mask(i, j) == 1.0) {
                sum += observed(i, j);
                ++count;
            }
        }
        const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
        for (std::size_t i = 0; i < observed.rows(); ++i) {
            if (mask.mask(i, j) == 0.0) out(i, j) = mean;
        }
    }
    return out;
}

}  // namespace tvg::bench
