#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvg/graph.hpp"
#include "tvg/temporal.hpp"

namespace tvg::data {

/// A graph plus its ground-truth signal matrix.
struct Dataset {
    std::string name;
    Graph graph;
    TimeSignal signal;
    std::size_t knn_k = 0;
};

/// Synthetic generator settings: nodes uniform in a square, k-NN graph,
/// first frame a low-frequency signal with fixed energy, then the random
/// walk x_t = x_{t-1} + L^{-1/2} f_t with white Gaussian f_t.
struct SyntheticConfig {
    std::size_t n_nodes = 100;
    std::size_t n_times = 200;
    double area_side = 100.0;
    std::size_t knn_k = 5;
    double energy = 1e4;
    std::size_t low_freq_count = 10;
    double noise_scale = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
};

Dataset generate_synthetic(const SyntheticConfig& cfg);

/// Loads a dataset from a nodes CSV (`node_id,x,y[,z]`) and a signals CSV
/// (`node_id,t0,t1,...`). Node ids must be a dense 0..N-1 range in either
/// file order; any NaN/missing value is rejected with its row and column.
Dataset load_dataset_csv(const std::string& nodes_path, const std::string& signals_path,
                         std::size_t knn_k, const std::string& name);

/// Dataset manifest: {name, nodes_path, signals_path, knn_k, densities}.
/// Paths are resolved relative to the manifest file.
struct Manifest {
    std::string name;
    std::string nodes_path;
    std::string signals_path;
    std::size_t knn_k = 5;
    std::vector<double> densities;
};

Manifest read_manifest(const std::string& path);
Dataset load_from_manifest(const std::string& path);

/// Writes nodes.csv, signals.csv and manifest.json under `dir`.
Manifest write_dataset(const Dataset& dataset, const std::vector<double>& densities,
                       const std::string& dir);

/// Writes a signal matrix in the signals CSV format.
void write_signal_csv(const Matrix& values, const std::string& path);

}  // namespace tvg::data
