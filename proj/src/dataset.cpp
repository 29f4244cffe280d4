#include "tvg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "tvg/io_util.hpp"
#include "tvg/rng.hpp"

namespace tvg::data {

void SyntheticConfig::validate() const {
    if (n_nodes < knn_k + 1) {
        throw std::invalid_argument("SyntheticConfig: need n_nodes >= knn_k + 1");
    }
    if (n_times < 2) throw std::invalid_argument("SyntheticConfig: need n_times >= 2");
    if (!(energy > 0.0)) throw std::invalid_argument("SyntheticConfig: energy must be > 0");
    if (!(area_side > 0.0)) throw std::invalid_argument("SyntheticConfig: area_side must be > 0");
    if (low_freq_count < 1 || low_freq_count >= n_nodes) {
        throw std::invalid_argument("SyntheticConfig: low_freq_count must be in [1, n_nodes)");
    }
    if (noise_scale < 0.0) {
        throw std::invalid_argument("SyntheticConfig: noise_scale must be >= 0");
    }
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);

    // Coordinates are redrawn if the k-NN graph comes out disconnected.
    Graph graph = [&]() {
        for (int attempt = 0; attempt < 10; ++attempt) {
            std::vector<std::vector<double>> coords(cfg.n_nodes);
            for (auto& p : coords) {
                p = {rng.uniform(0.0, cfg.area_side), rng.uniform(0.0, cfg.area_side)};
            }
            try {
                return build_knn_graph(coords, cfg.knn_k);
            } catch (const std::invalid_argument&) {
                continue;
            }
        }
        throw std::runtime_error("generate_synthetic: could not build a connected k-NN graph "
                                 "in 10 attempts");
    }();

    const LaplacianBundle lap = normalized_laplacian(graph);
    const auto [u, lambdas] = symmetric_eigendecomposition(lap.laplacian);
    const std::size_t n = cfg.n_nodes;

    // L^{-1/2} = U diag(0, lambda_2^{-1/2}, ...) U^T; the null direction is dropped.
    std::vector<double> inv_sqrt(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        inv_sqrt[i] = lambdas[i] > 1e-12 ? 1.0 / std::sqrt(lambdas[i]) : 0.0;
    }
    Matrix linv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 1; k < n; ++k) s += u(i, k) * inv_sqrt[k] * u(j, k);
            linv(i, j) = s;
        }
    }

    // First frame: a low-frequency mix rescaled to the requested energy.
    std::vector<double> x1(n, 0.0);
    for (std::size_t c = 0; c < cfg.low_freq_count; ++c) {
        const double coeff = rng.normal();
        for (std::size_t i = 0; i < n; ++i) x1[i] += coeff * u(i, c + 1);
    }
    const double nrm = norm2(x1);
    if (nrm == 0.0) throw std::runtime_error("generate_synthetic: degenerate first frame");
    const double scale = std::sqrt(cfg.energy) / nrm;
    for (double& v : x1) v *= scale;

    Matrix x(n, cfg.n_times);
    for (std::size_t i = 0; i < n; ++i) x(i, 0) = x1[i];
    std::vector<double> f(n), step(n);
    for (std::size_t t = 1; t < cfg.n_times; ++t) {
        for (std::size_t i = 0; i < n; ++i) f[i] = cfg.noise_scale * rng.normal();
        step = multiply(linv, f);
        for (std::size_t i = 0; i < n; ++i) x(i, t) = x(i, t - 1) + step[i];
    }

    return Dataset{"synthetic", std::move(graph), TimeSignal::checked(std::move(x)), cfg.knn_k};
}

namespace {

struct NodeRow {
    std::size_t id;
    std::vector<double> values;
};

std::vector<NodeRow> parse_node_rows(const std::vector<std::string>& lines,
                                     const std::string& path, std::size_t expected_fields) {
    std::vector<NodeRow> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto fields = split_csv_line(lines[ln]);
        if (fields.size() != expected_fields) {
            throw std::invalid_argument(path + ": row " + std::to_string(ln + 1) + " has " +
                                        std::to_string(fields.size()) + " fields, expected " +
                                        std::to_string(expected_fields));
        }
        NodeRow row;
        const auto id = parse_int(fields[0], path + " row " + std::to_string(ln + 1));
        if (id < 0) throw std::invalid_argument(path + ": negative node_id");
        row.id = static_cast<std::size_t>(id);
        for (std::size_t f = 1; f < fields.size(); ++f) {
            if (fields[f].empty()) {
                throw std::invalid_argument(path + ": missing value at row " +
                                            std::to_string(ln + 1) + ", column " +
                                            std::to_string(f + 1));
            }
            const double v = parse_double(fields[f], path + " row " + std::to_string(ln + 1));
            if (!std::isfinite(v)) {
                throw std::invalid_argument(path + ": non-finite value at row " +
                                            std::to_string(ln + 1) + ", column " +
                                            std::to_string(f + 1));
            }
            row.values.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// Orders rows by node_id after checking the ids are exactly 0..N-1.
void order_dense(std::vector<NodeRow>& rows, const std::string& path) {
    std::vector<int> seen(rows.size(), 0);
    for (const auto& r : rows) {
        if (r.id >= rows.size() || seen[r.id]++) {
            throw std::invalid_argument(path + ": node ids must be exactly 0.." +
                                        std::to_string(rows.size() - 1) +
                                        " (gap or duplicate at id " + std::to_string(r.id) + ")");
        }
    }
    std::sort(rows.begin(), rows.end(),
              [](const NodeRow& a, const NodeRow& b) { return a.id < b.id; });
}

}  // namespace

Dataset load_dataset_csv(const std::string& nodes_path, const std::string& signals_path,
                         std::size_t knn_k, const std::string& name) {
    const auto node_lines = read_lines(nodes_path);
    if (node_lines.empty()) throw std::invalid_argument(nodes_path + ": empty file");
    const auto node_header = split_csv_line(node_lines[0]);
    const bool has_z = node_header.size() == 4 && node_header[3] == "z";
    if (!((node_header.size() == 3 || has_z) && node_header[0] == "node_id" &&
          node_header[1] == "x" && node_header[2] == "y")) {
        throw std::invalid_argument(nodes_path + ": header must be node_id,x,y[,z]");
    }
    if (node_lines.size() < 2) throw std::invalid_argument(nodes_path + ": no data rows");
    auto node_rows = parse_node_rows(node_lines, nodes_path, node_header.size());
    order_dense(node_rows, nodes_path);
    std::vector<std::vector<double>> coords;
    coords.reserve(node_rows.size());
    for (auto& r : node_rows) coords.push_back(std::move(r.values));

    const auto signal_lines = read_lines(signals_path);
    if (signal_lines.empty()) throw std::invalid_argument(signals_path + ": empty file");
    const auto signal_header = split_csv_line(signal_lines[0]);
    if (signal_header.size() < 3 || signal_header[0] != "node_id") {
        throw std::invalid_argument(signals_path + ": header must be node_id,t0,t1,...");
    }
    for (std::size_t c = 1; c < signal_header.size(); ++c) {
        if (signal_header[c] != "t" + std::to_string(c - 1)) {
            throw std::invalid_argument(signals_path + ": header column " + std::to_string(c + 1) +
                                        " must be t" + std::to_string(c - 1));
        }
    }
    auto signal_rows = parse_node_rows(signal_lines, signals_path, signal_header.size());
    if (signal_rows.size() != coords.size()) {
        throw std::invalid_argument("node count mismatch: " + nodes_path + " has " +
                                    std::to_string(coords.size()) + " nodes, " + signals_path +
                                    " has " + std::to_string(signal_rows.size()));
    }
    order_dense(signal_rows, signals_path);

    const std::size_t m = signal_header.size() - 1;
    Matrix values(coords.size(), m);
    for (std::size_t i = 0; i < signal_rows.size(); ++i) {
        for (std::size_t t = 0; t < m; ++t) values(i, t) = signal_rows[i].values[t];
    }

    Graph graph = build_knn_graph(coords, knn_k);
    return Dataset{name, std::move(graph), TimeSignal::checked(std::move(values)), knn_k};
}

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    Manifest m;
    m.name = j.at("name").get<std::string>();
    m.knn_k = j.at("knn_k").get<std::size_t>();
    m.densities = j.value("densities", std::vector<double>{});
    const auto base = std::filesystem::path(path).parent_path();
    m.nodes_path = (base / j.at("nodes_path").get<std::string>()).string();
    m.signals_path = (base / j.at("signals_path").get<std::string>()).string();
    return m;
}

Dataset load_from_manifest(const std::string& path) {
    const Manifest m = read_manifest(path);
    return load_dataset_csv(m.nodes_path, m.signals_path, m.knn_k, m.name);
}

Manifest write_dataset(const Dataset& dataset, const std::vector<double>& densities,
                       const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path base(dir);

    {
        std::ofstream out(base / "nodes.csv");
        if (!out) throw std::runtime_error("cannot write " + (base / "nodes.csv").string());
        const auto& coords = dataset.graph.coords();
        if (coords.empty()) {
            throw std::invalid_argument("write_dataset: dataset graph has no coordinates");
        }
        const bool has_z = coords[0].size() == 3;
        out << (has_z ? "node_id,x,y,z\n" : "node_id,x,y\n");
        for (std::size_t i = 0; i < coords.size(); ++i) {
            out << i;
            for (double c : coords[i]) out << "," << format_double(c);
            out << "\n";
        }
    }
    write_signal_csv(dataset.signal.values, (base / "signals.csv").string());

    nlohmann::json j;
    j["name"] = dataset.name;
    j["nodes_path"] = "nodes.csv";
    j["signals_path"] = "signals.csv";
    j["knn_k"] = dataset.knn_k;
    j["densities"] = densities;
    std::ofstream out(base / "manifest.json");
    if (!out) throw std::runtime_error("cannot write " + (base / "manifest.json").string());
    out << j.dump(2) << "\n";

    Manifest m;
    m.name = dataset.name;
    m.nodes_path = (base / "nodes.csv").string();
    m.signals_path = (base / "signals.csv").string();
    m.knn_k = dataset.knn_k;
    m.densities = densities;
    return m;
}

void write_signal_csv(const Matrix& values, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "node_id";
    for (std::size_t t = 0; t < values.cols(); ++t) out << ",t" << t;
    out << "\n";
    for (std::size_t i = 0; i < values.rows(); ++i) {
        out << i;
        for (std::size_t t = 0; t < values.cols(); ++t) {
            out << "," << format_double(values(i, t));
        }
        out << "\n";
    }
}

}  // namespace tvg::data
