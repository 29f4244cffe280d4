#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvg/benchmark.hpp"
#include "tvg/dataset.hpp"
#include "tvg/hashing.hpp"
#include "tvg/io_util.hpp"
#include "tvg/metrics.hpp"
#include "tvg/sampling.hpp"
#include "tvg/solver.hpp"
#include "tvg/trainer.hpp"

namespace {

std::vector<double> parse_density_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& tok : tvg::split_csv_line(text)) {
        out.push_back(tvg::parse_double(tok, "--densities"));
    }
    return out;
}

struct GenerateArgs {
    tvg::data::SyntheticConfig cfg;
    std::string out_dir;
    std::string densities = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
};

int run_generate(const GenerateArgs& args) {
    const auto dataset = tvg::data::generate_synthetic(args.cfg);
    tvg::data::write_dataset(dataset, parse_density_list(args.densities), args.out_dir);
    std::cout << "wrote " << (std::filesystem::path(args.out_dir) / "manifest.json").string()
              << " (" << dataset.signal.nodes() << " nodes, " << dataset.signal.times()
              << " time steps)\n";
    return 0;
}

struct ReconstructArgs {
    std::string manifest;
    bool synthetic = false;
    std::uint64_t dataset_seed = 1;
    std::string method;
    double density = 0.5;
    std::uint64_t seed = 42;
    std::string out_path;
    std::string save_model;
    // solver knobs
    double upsilon = 0.5;
    std::optional<double> epsilon;
    double cg_tol = 1e-8;
    int cg_max_iter = 2000;
    // model knobs (defaults = the tuned timegnn setting; gcn wants --layers 2)
    std::size_t layers = 1;
    std::size_t hidden = 8;
    std::size_t alpha = 3;
    double learning_rate = 0.01;
    double weight_decay = 1e-5;
    double lambda = 1e-5;
    int epochs = 5000;
    std::string activation = "relu";
};

int run_reconstruct(const ReconstructArgs& args) {
    using tvg::bench::Method;
    const Method method = tvg::bench::method_from_string(args.method);

    tvg::data::Dataset dataset = [&] {
        if (args.synthetic) {
            tvg::data::SyntheticConfig cfg;
            cfg.seed = args.dataset_seed;
            return tvg::data::generate_synthetic(cfg);
        }
        if (args.manifest.empty()) {
            throw std::invalid_argument("reconstruct: pass --manifest or --synthetic");
        }
        return tvg::data::load_from_manifest(args.manifest);
    }();

    const auto lap = tvg::normalized_laplacian(dataset.graph);
    const auto mask = tvg::random_sampling_mask(dataset.signal.nodes(), dataset.signal.times(),
                                                args.density, args.seed);
    const tvg::Matrix observed = tvg::hadamard(mask.mask, dataset.signal.values);

    tvg::Matrix x_hat;
    bool converged = true;
    if (method == Method::tgsr || method == Method::graphtrss) {
        tvg::SolverConfig cfg;
        cfg.upsilon = args.upsilon;
        cfg.epsilon = args.epsilon ? *args.epsilon : (method == Method::tgsr ? 0.0 : 0.05);
        if (method == Method::tgsr && cfg.epsilon != 0.0) {
            throw std::invalid_argument("reconstruct: tgsr has epsilon fixed at 0");
        }
        cfg.cg_tol = args.cg_tol;
        cfg.cg_max_iter = args.cg_max_iter;
        const auto result = tvg::solve(observed, mask, lap.laplacian, cfg);
        x_hat = result.x;
        converged = result.converged;
        std::cout << "solver: " << result.iterations << " iterations, relative residual "
                  << tvg::format_double(result.final_residual)
                  << (result.converged ? "" : " (not converged)") << "\n";
    } else if (method == Method::timegnn) {
        tvg::gnn::CascadeConfig mc;
        mc.signal_times = dataset.signal.times();
        mc.layer_count = args.layers;
        mc.hidden_dim = args.hidden;
        mc.alpha = args.alpha;
        mc.activation = tvg::gnn::activation_from_string(args.activation);
        tvg::gnn::TrainConfig tc;
        tc.learning_rate = args.learning_rate;
        tc.weight_decay = args.weight_decay;
        tc.lambda = args.lambda;
        tc.epsilon = args.epsilon ? *args.epsilon : 0.05;
        tc.epochs = args.epochs;
        tc.seed = tvg::derive_seed(args.seed, "timegnn");
        const auto result = tvg::gnn::train_cascade(observed, mask, lap, mc, tc);
        x_hat = result.reconstruction;
        std::cout << "training: final loss " << tvg::format_double(result.loss_history.back())
                  << " after " << result.loss_history.size() << " epochs\n";
        if (!args.save_model.empty()) {
            tvg::gnn::save_cascade_model(result.model, tc.seed, args.save_model);
        }
    } else {
        tvg::gnn::GcnConfig mc;
        mc.signal_times = dataset.signal.times();
        mc.layer_count = args.layers;
        mc.hidden_dim = args.hidden;
        mc.activation = tvg::gnn::activation_from_string(args.activation);
        tvg::gnn::TrainConfig tc;
        tc.learning_rate = args.learning_rate;
        tc.weight_decay = args.weight_decay;
        tc.lambda = args.lambda;
        tc.epsilon = args.epsilon ? *args.epsilon : 0.05;
        tc.epochs = args.epochs;
        tc.seed = tvg::derive_seed(args.seed, "gcn");
        const auto result = tvg::gnn::train_gcn(observed, mask, lap, dataset.graph, mc, tc);
        x_hat = result.reconstruction;
        std::cout << "training: final loss " << tvg::format_double(result.loss_history.back())
                  << " after " << result.loss_history.size() << " epochs\n";
        if (!args.save_model.empty()) {
            tvg::gnn::save_gcn_model(result.model, tc.seed, args.save_model);
        }
    }

    if (!args.out_path.empty()) {
        tvg::data::write_signal_csv(x_hat, args.out_path);
    }
    auto eval = mask.unsampled_indices();
    if (eval.empty()) {
        for (std::size_t i = 0; i < x_hat.rows(); ++i)
            for (std::size_t j = 0; j < x_hat.cols(); ++j) eval.emplace_back(i, j);
    }
    const auto metrics = tvg::bench::compute_metrics(x_hat, dataset.signal.values, eval);
    std::cout << "rmse=" << tvg::format_double(metrics.rmse)
              << " mae=" << tvg::format_double(metrics.mae)
              << " mape=" << tvg::format_double(metrics.mape)
              << " mape_skipped=" << metrics.mape_skipped
              << " converged=" << (converged ? 1 : 0) << "\n";
    return 0;
}

int run_benchmark(const std::string& config_path, const std::string& out_override, int threads) {
    auto cfg = tvg::bench::ExperimentConfig::from_json_file(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (threads >= 0) cfg.threads = threads;
    const auto result = tvg::bench::run_monte_carlo(cfg);
    for (const auto& [method, desc] : result.chosen_params) {
        std::cout << "params[" << method << "]: " << desc << "\n";
    }
    const auto summary = tvg::bench::summarize(result.records);
    const std::filesystem::path dir(cfg.output_dir);
    tvg::bench::write_summary_csv(summary, (dir / "summary.csv").string(),
                                  (dir / "curve.csv").string());
    for (const auto& row : summary.per_method) {
        std::cout << row.method << " @ " << row.dataset
                  << ": rmse=" << tvg::format_double(row.mean_rmse)
                  << " mae=" << tvg::format_double(row.mean_mae)
                  << " mape=" << tvg::format_double(row.mean_mape) << "\n";
    }
    std::cout << "wrote " << (dir / "records.csv").string() << ", "
              << (dir / "summary.csv").string() << ", " << (dir / "curve.csv").string() << "\n";
    return 0;
}

int run_report(const std::string& records_path, const std::string& out_dir) {
    const auto records = tvg::bench::read_records_csv(records_path);
    const auto summary = tvg::bench::summarize(records);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    tvg::bench::write_summary_csv(summary, (dir / "summary.csv").string(),
                                  (dir / "curve.csv").string());
    std::cout << "wrote " << (dir / "summary.csv").string() << " and "
              << (dir / "curve.csv").string() << " from " << records.size() << " records\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-varying graph signal reconstruction toolkit"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset as CSV files");
    generate->add_option("--seed", gen.cfg.seed, "RNG seed");
    generate->add_option("--out", gen.out_dir, "Output directory")->required();
    generate->add_option("--nodes", gen.cfg.n_nodes, "Node count");
    generate->add_option("--times", gen.cfg.n_times, "Time steps");
    generate->add_option("--knn-k", gen.cfg.knn_k, "k-NN neighbor count");
    generate->add_option("--area", gen.cfg.area_side, "Square side length");
    generate->add_option("--energy", gen.cfg.energy, "Energy of the first frame");
    generate->add_option("--low-freq", gen.cfg.low_freq_count,
                         "Number of low-frequency eigenvectors in the first frame");
    generate->add_option("--noise", gen.cfg.noise_scale, "Std of the innovation signal");
    generate->add_option("--densities", gen.densities, "Densities stored in the manifest");

    ReconstructArgs rec;
    auto* reconstruct =
        app.add_subcommand("reconstruct", "Reconstruct one dataset from one random mask");
    reconstruct->add_option("--manifest", rec.manifest, "Dataset manifest JSON");
    reconstruct->add_flag("--synthetic", rec.synthetic, "Use the default synthetic dataset");
    reconstruct->add_option("--dataset-seed", rec.dataset_seed, "Seed for --synthetic");
    reconstruct->add_option("--method", rec.method, "tgsr|graphtrss|timegnn|gcn")->required();
    reconstruct->add_option("--density", rec.density, "Sampling density in (0,1]")->required();
    reconstruct->add_option("--seed", rec.seed, "Mask / training seed");
    reconstruct->add_option("--out", rec.out_path, "Write the completed matrix CSV here");
    reconstruct->add_option("--save-model", rec.save_model, "Write a model checkpoint (JSON)");
    reconstruct->add_option("--upsilon", rec.upsilon, "Solver regularization weight");
    reconstruct->add_option("--epsilon", rec.epsilon, "Sobolev shift");
    reconstruct->add_option("--cg-tol", rec.cg_tol, "Solver relative residual tolerance");
    reconstruct->add_option("--cg-max-iter", rec.cg_max_iter, "Solver iteration cap");
    reconstruct->add_option("--layers", rec.layers, "Model layer count");
    reconstruct->add_option("--hidden", rec.hidden, "Hidden width");
    reconstruct->add_option("--alpha", rec.alpha, "Cascade branch count");
    reconstruct->add_option("--lr", rec.learning_rate, "Learning rate");
    reconstruct->add_option("--weight-decay", rec.weight_decay, "Decoupled weight decay");
    reconstruct->add_option("--lambda", rec.lambda, "Sobolev loss weight");
    reconstruct->add_option("--epochs", rec.epochs, "Training epochs");
    reconstruct->add_option("--activation", rec.activation, "relu|identity");

    std::string bench_config, bench_out;
    int bench_threads = -1;
    auto* benchmark = app.add_subcommand("benchmark", "Run the Monte Carlo experiment protocol");
    benchmark->add_option("--config", bench_config, "Experiment config JSON")->required();
    benchmark->add_option("--out", bench_out, "Override the config output_dir");
    benchmark->add_option("--threads", bench_threads, "Worker threads (0 = hardware)");

    std::string report_records, report_out;
    auto* report = app.add_subcommand("report", "Summarize an existing records CSV");
    report->add_option("--records", report_records, "records.csv path")->required();
    report->add_option("--out", report_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return run_generate(gen);
        if (reconstruct->parsed()) return run_reconstruct(rec);
        if (benchmark->parsed()) return run_benchmark(bench_config, bench_out, bench_threads);
        if (report->parsed()) return run_report(report_records, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
