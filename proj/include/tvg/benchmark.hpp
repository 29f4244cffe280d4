#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tvg/dataset.hpp"
#include "tvg/metrics.hpp"
#include "tvg/model.hpp"
#include "tvg/solver.hpp"
#include "tvg/trainer.hpp"

namespace tvg::bench {

enum class Method { tgsr, graphtrss, timegnn, gcn };

Method method_from_string(const std::string& name);
std::string to_string(Method m);

/// Hyperparameters of the neural methods; alpha is ignored by the GCN.
/// Defaults are the tuned TimeGNN setting for the synthetic benchmark.
struct NnParams {
    std::size_t layers = 1;
    std::size_t hidden = 8;
    std::size_t alpha = 3;
    double learning_rate = 0.01;
    double weight_decay = 1e-5;
    double lambda = 1e-5;
    double epsilon = 0.05;
    int epochs = 5000;
    gnn::Activation activation = gnn::Activation::relu;

    std::string describe() const;
};

/// Candidate list for one method; tuning picks the entry with the lowest
/// validation RMSE.
struct MethodGrid {
    std::vector<SolverConfig> solver_candidates;  // tgsr / graphtrss
    std::vector<NnParams> nn_candidates;          // timegnn / gcn
};

struct ExperimentConfig {
    std::string dataset_ref = "synthetic";  // "synthetic" or a manifest path
    data::SyntheticConfig synthetic;
    std::vector<Method> methods;
    std::vector<double> densities;
    int repetitions = 50;
    std::uint64_t base_seed = 42;
    std::string output_dir = "out";
    int threads = 0;  // 0 = hardware concurrency
    double tuning_val_fraction = 0.25;
    std::map<Method, MethodGrid> grids;

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    void validate() const;
};

/// One Monte Carlo measurement (a method on one mask).
struct ResultRecord {
    std::string method;
    std::string dataset;
    double density = 0.0;
    int repetition = 0;
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    double wall_time_seconds = 0.0;
    bool converged = false;
    std::uint64_t mask_hash = 0;
};

struct MonteCarloResult {
    std::vector<ResultRecord> records;
    /// Human-readable description of the frozen hyperparameters per method.
    std::map<std::string, std::string> chosen_params;
};

/// Runs the full protocol: loads or generates the dataset, freezes
/// hyperparameters by grid search on a held-out split of dedicated tuning
/// masks, then runs every (density, repetition, method) cell on shared
/// per-cell masks. Records are written to output_dir/records.csv
/// incrementally in canonical (density, repetition, method) order. Cells run
/// in parallel; results are independent of the thread count.
MonteCarloResult run_monte_carlo(const ExperimentConfig& cfg);

struct SummaryRow {
    std::string method;
    std::string dataset;
    double mean_rmse = 0.0;
    double mean_mae = 0.0;
    double mean_mape = 0.0;
};

struct CurveRow {
    std::string method;
    std::string dataset;
    double density = 0.0;
    double mean_rmse = 0.0;
    double mean_mae = 0.0;
    double mean_mape = 0.0;
};

struct Summary {
    std::vector<SummaryRow> per_method;  // densities weighted equally
    std::vector<CurveRow> curve;
};

/// Means over converged records; per-density means first, then the
/// density-equal-weight average. NaN MAPEs are skipped.
Summary summarize(const std::vector<ResultRecord>& records);

extern const char* const kRecordsHeader;

void write_records_csv(const std::vector<ResultRecord>& records, const std::string& path);
std::vector<ResultRecord> read_records_csv(const std::string& path);
void write_summary_csv(const Summary& summary, const std::string& summary_path,
                       const std::string& curve_path);

std::string record_to_csv_line(const ResultRecord& r);

}  // namespace tvg::bench
