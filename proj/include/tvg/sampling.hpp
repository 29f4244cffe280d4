#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tvg/matrix.hpp"

namespace tvg {

/// Binary observation mask over an N x M signal. sampled_indices is the
/// support of the mask in row-major order; density the observed fraction.
struct SamplingMask {
    Matrix mask;
    std::vector<std::pair<std::size_t, std::size_t>> sampled_indices;
    double density = 0.0;

    /// Validates entries are exactly 0/1 and rebuilds the support and density.
    static SamplingMask from_matrix(Matrix mask);

    std::size_t nodes() const { return mask.rows(); }
    std::size_t times() const { return mask.cols(); }

    /// Complement of the support in row-major order (the evaluation set).
    std::vector<std::pair<std::size_t, std::size_t>> unsampled_indices() const;

    std::uint64_t hash() const;
};

/// Per-column random sampling: each time step observes exactly
/// round(density * n) distinct nodes, drawn from the given seed.
SamplingMask random_sampling_mask(std::size_t n, std::size_t m, double density,
                                  std::uint64_t seed);

}  // namespace tvg
