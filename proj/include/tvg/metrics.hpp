#pragma once

#include <utility>
#include <vector>

#include "tvg/matrix.hpp"
#include "tvg/sampling.hpp"

namespace tvg::bench {

using IndexSet = std::vector<std::pair<std::size_t, std::size_t>>;

/// Reconstruction errors over an evaluation index set. Entries whose true
/// value is below 1e-8 in magnitude are excluded from MAPE and counted in
/// mape_skipped; if every entry is excluded, mape is NaN (not available).
struct Metrics {
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    std::size_t mape_skipped = 0;
};

Metrics compute_metrics(const Matrix& x_hat, const Matrix& x_true, const IndexSet& eval_indices);

/// Baseline used in sanity checks: every unsampled entry of a column gets the
/// mean of that column's sampled values.
Matrix mean_imputation(const Matrix& observed, const SamplingMask& mask);

}  // namespace tvg::bench
