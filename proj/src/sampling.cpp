#include "tvg/sampling.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tvg/hashing.hpp"
#include "tvg/rng.hpp"

namespace tvg {

SamplingMask SamplingMask::from_matrix(Matrix m) {
    SamplingMask out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (v != 0.0 && v != 1.0) {
                throw std::invalid_argument("SamplingMask: entry (" + std::to_string(i) + "," +
                                            std::to_string(j) + ") is not 0/1");
            }
            if (v == 1.0) out.sampled_indices.emplace_back(i, j);
        }
    }
    out.density = static_cast<double>(out.sampled_indices.size()) /
                  static_cast<double>(m.rows() * m.cols());
    out.mask = std::move(m);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> SamplingMask::unsampled_indices() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(mask.size() - sampled_indices.size());
    for (std::size_t i = 0; i < mask.rows(); ++i) {
        for (std::size_t j = 0; j < mask.cols(); ++j) {
            if (mask(i, j) == 0.0) out.emplace_back(i, j);
        }
    }
    return out;
}

std::uint64_t SamplingMask::hash() const {
    std::vector<unsigned char> bits(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        bits[i] = mask.data()[i] == 1.0 ? 1 : 0;
    }
    return fnv1a64(bits.data(), bits.size());
}

SamplingMask random_sampling_mask(std::size_t n, std::size_t m, double density,
                                  std::uint64_t seed) {
    if (!(density > 0.0) || density > 1.0) {
        throw std::invalid_argument("random_sampling_mask: density must be in (0, 1]");
    }
    if (n == 0 || m == 0) throw std::invalid_argument("random_sampling_mask: empty shape");
    const auto count = static_cast<std::size_t>(std::llround(density * static_cast<double>(n)));
    if (count == 0) {
        throw std::invalid_argument("random_sampling_mask: round(density*n) is zero");
    }

    Rng rng(seed);
    Matrix mask(n, m);
    std::vector<std::size_t> pool(n);
    for (std::size_t col = 0; col < m; ++col) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        // partial Fisher-Yates: the first `count` slots become the sample
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t j = i + rng.below(n - i);
            std::swap(pool[i], pool[j]);
            mask(pool[i], col) = 1.0;
        }
    }
    return SamplingMask::from_matrix(std::move(mask));
}

}  // namespace tvg
