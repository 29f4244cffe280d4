#include "tvg/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tvg/hashing.hpp"
#include "tvg/io_util.hpp"
#include "tvg/rng.hpp"

namespace tvg::bench {

using nlohmann::json;

Method method_from_string(const std::string& name) {
    if (name == "tgsr") return Method::tgsr;
    if (name == "graphtrss") return Method::graphtrss;
    if (name == "timegnn") return Method::timegnn;
    if (name == "gcn") return Method::gcn;
    throw std::invalid_argument("unknown method '" + name +
                                "' (expected tgsr|graphtrss|timegnn|gcn)");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::tgsr: return "tgsr";
        case Method::graphtrss: return "graphtrss";
        case Method::timegnn: return "timegnn";
        case Method::gcn: return "gcn";
    }
    return "?";
}

std::string NnParams::describe() const {
    return "layers=" + std::to_string(layers) + " hidden=" + std::to_string(hidden) +
           " alpha=" + std::to_string(alpha) + " lr=" + format_double(learning_rate) +
           " weight_decay=" + format_double(weight_decay) + " lambda=" + format_double(lambda) +
           " epsilon=" + format_double(epsilon) + " epochs=" + std::to_string(epochs) +
           " activation=" + gnn::to_string(activation);
}

namespace {

std::string describe(const SolverConfig& c) {
    return "upsilon=" + format_double(c.upsilon) + " epsilon=" + format_double(c.epsilon) +
           " cg_tol=" + format_double(c.cg_tol) + " cg_max_iter=" + std::to_string(c.cg_max_iter);
}

std::vector<double> number_list(const json& j, const char* field,
                                const std::vector<double>& def) {
    if (!j.contains(field)) return def;
    const auto& v = j.at(field);
    if (v.is_array()) {
        auto out = v.get<std::vector<double>>();
        if (out.empty()) throw std::invalid_argument(std::string("config: empty list for '") +
                                                     field + "'");
        return out;
    }
    return {v.get<double>()};
}

MethodGrid default_solver_grid(bool sobolev) {
    MethodGrid grid;
    for (double ups : {0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0}) {
        SolverConfig c;
        c.upsilon = ups;
        c.epsilon = sobolev ? 0.05 : 0.0;
        grid.solver_candidates.push_back(c);
    }
    return grid;
}

MethodGrid solver_grid_from_json(const json& j, bool sobolev) {
    if (j.is_null()) return default_solver_grid(sobolev);
    MethodGrid grid;
    const auto upsilons = number_list(j, "upsilon", {0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0});
    const auto epsilons = number_list(j, "epsilon", {sobolev ? 0.05 : 0.0});
    if (!sobolev) {
        for (double e : epsilons) {
            if (e != 0.0) {
                throw std::invalid_argument("config: tgsr has epsilon fixed at 0; "
                                            "use graphtrss for the Sobolev variant");
            }
        }
    }
    const double cg_tol = j.value("cg_tol", 1e-8);
    const int cg_max_iter = j.value("cg_max_iter", 2000);
    for (double ups : upsilons) {
        for (double eps : epsilons) {
            SolverConfig c;
            c.upsilon = ups;
            c.epsilon = eps;
            c.cg_tol = cg_tol;
            c.cg_max_iter = cg_max_iter;
            c.validate();
            grid.solver_candidates.push_back(c);
        }
    }
    return grid;
}

MethodGrid default_nn_grid(Method m) {
    MethodGrid grid;
    NnParams p;  // defaults match the README-documented configuration
    if (m == Method::gcn) {
        p.alpha = 1;
        p.layers = 2;
    }
    grid.nn_candidates.push_back(p);
    return grid;
}

MethodGrid nn_grid_from_json(const json& j, Method m) {
    if (j.is_null()) return default_nn_grid(m);
    MethodGrid grid;
    const NnParams def = default_nn_grid(m).nn_candidates[0];
    const auto layers = number_list(j, "layers", {static_cast<double>(def.layers)});
    const auto hidden = number_list(j, "hidden", {static_cast<double>(def.hidden)});
    const auto alpha = number_list(j, "alpha", {static_cast<double>(def.alpha)});
    const auto lr = number_list(j, "learning_rate", {def.learning_rate});
    const auto wd = number_list(j, "weight_decay", {def.weight_decay});
    const auto lambda = number_list(j, "lambda", {def.lambda});
    const double epsilon = j.value("epsilon", def.epsilon);
    const int epochs = j.value("epochs", def.epochs);
    const auto activation = gnn::activation_from_string(j.value("activation", "relu"));
    for (double nl : layers)
        for (double h : hidden)
            for (double a : alpha)
                for (double r : lr)
                    for (double w : wd)
                        for (double lm : lambda) {
                            NnParams p;
                            p.layers = static_cast<std::size_t>(nl);
                            p.hidden = static_cast<std::size_t>(h);
                            p.alpha = static_cast<std::size_t>(a);
                            p.learning_rate = r;
                            p.weight_decay = w;
                            p.lambda = lm;
                            p.epsilon = epsilon;
                            p.epochs = epochs;
                            p.activation = activation;
                            grid.nn_candidates.push_back(p);
                        }
    if (grid.nn_candidates.size() > 256) {
        throw std::invalid_argument("config: hyperparameter grid has " +
                                    std::to_string(grid.nn_candidates.size()) +
                                    " candidates; cap is 256");
    }
    return grid;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    if (!j.contains("dataset")) throw std::invalid_argument("config: missing field 'dataset'");
    cfg.dataset_ref = j.at("dataset").get<std::string>();
    if (j.contains("synthetic")) {
        const auto& s = j.at("synthetic");
        cfg.synthetic.n_nodes = s.value("n_nodes", cfg.synthetic.n_nodes);
        cfg.synthetic.n_times = s.value("n_times", cfg.synthetic.n_times);
        cfg.synthetic.area_side = s.value("area_side", cfg.synthetic.area_side);
        cfg.synthetic.knn_k = s.value("knn_k", cfg.synthetic.knn_k);
        cfg.synthetic.energy = s.value("energy", cfg.synthetic.energy);
        cfg.synthetic.low_freq_count = s.value("low_freq_count", cfg.synthetic.low_freq_count);
        cfg.synthetic.noise_scale = s.value("noise_scale", cfg.synthetic.noise_scale);
        cfg.synthetic.seed = s.value("seed", cfg.synthetic.seed);
    }
    if (!j.contains("methods")) throw std::invalid_argument("config: missing field 'methods'");
    for (const auto& m : j.at("methods")) {
        cfg.methods.push_back(method_from_string(m.get<std::string>()));
    }
    if (!j.contains("densities")) throw std::invalid_argument("config: missing field 'densities'");
    cfg.densities = j.at("densities").get<std::vector<double>>();
    cfg.repetitions = j.value("repetitions", 50);
    cfg.base_seed = j.value("base_seed", std::uint64_t{42});
    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.threads = j.value("threads", 0);
    if (j.contains("tuning")) {
        cfg.tuning_val_fraction = j.at("tuning").value("val_fraction", 0.25);
    }
    for (Method m : cfg.methods) {
        const std::string key = to_string(m);
        const json sub = j.contains(key) ? j.at(key) : json();
        if (m == Method::tgsr || m == Method::graphtrss) {
            cfg.grids[m] = solver_grid_from_json(sub, m == Method::graphtrss);
        } else {
            cfg.grids[m] = nn_grid_from_json(sub, m);
        }
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (methods.empty()) throw std::invalid_argument("config: methods must be non-empty");
    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t k = i + 1; k < methods.size(); ++k) {
            if (methods[i] == methods[k]) {
                throw std::invalid_argument("config: duplicate method '" + to_string(methods[i]) +
                                            "'");
            }
        }
    }
    if (densities.empty()) throw std::invalid_argument("config: densities must be non-empty");
    for (double d : densities) {
        if (!(d > 0.0) || d > 1.0) {
            throw std::invalid_argument("config: density " + format_double(d) +
                                        " outside (0, 1]");
        }
    }
    if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
    if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
    if (!(tuning_val_fraction > 0.0) || tuning_val_fraction >= 1.0) {
        throw std::invalid_argument("config: tuning.val_fraction must be in (0, 1)");
    }
    if (dataset_ref.empty()) throw std::invalid_argument("config: dataset must be non-empty");
}

// ---------------------------------------------------------------------------
// Method execution
// ---------------------------------------------------------------------------

namespace {

struct MethodRun {
    Matrix x_hat;
    bool converged = true;
};

struct ChosenParams {
    std::map<Method, std::size_t> index;  // into the method's candidate list
};

MethodRun run_one(Method method, const ExperimentConfig& cfg, const ChosenParams& chosen,
                  const data::Dataset& dataset, const LaplacianBundle& lap,
                  const SamplingMask& mask, const Matrix& observed, std::uint64_t seed) {
    const MethodGrid& grid = cfg.grids.at(method);
    const std::size_t ci = chosen.index.at(method);
    MethodRun out;
    switch (method) {
        case Method::tgsr:
        case Method::graphtrss: {
            const auto result = solve(observed, mask, lap.laplacian, grid.solver_candidates[ci]);
            out.x_hat = result.x;
            out.converged = result.converged;
            break;
        }
        case Method::timegnn: {
            const NnParams& p = grid.nn_candidates[ci];
            gnn::CascadeConfig mc;
            mc.signal_times = observed.cols();
            mc.layer_count = p.layers;
            mc.hidden_dim = p.hidden;
            mc.alpha = p.alpha;
            mc.activation = p.activation;
            gnn::TrainConfig tc;
            tc.learning_rate = p.learning_rate;
            tc.weight_decay = p.weight_decay;
            tc.lambda = p.lambda;
            tc.epsilon = p.epsilon;
            tc.epochs = p.epochs;
            tc.seed = derive_seed(seed, "timegnn");
            const auto result = train_cascade(observed, mask, lap, mc, tc);
            out.x_hat = result.reconstruction;
            break;
        }
        case Method::gcn: {
            const NnParams& p = grid.nn_candidates[ci];
            gnn::GcnConfig mc;
            mc.signal_times = observed.cols();
            mc.layer_count = p.layers;
            mc.hidden_dim = p.hidden;
            mc.activation = p.activation;
            gnn::TrainConfig tc;
            tc.learning_rate = p.learning_rate;
            tc.weight_decay = p.weight_decay;
            tc.lambda = p.lambda;
            tc.epsilon = p.epsilon;
            tc.epochs = p.epochs;
            tc.seed = derive_seed(seed, "gcn");
            const auto result = train_gcn(observed, mask, lap, dataset.graph, mc, tc);
            out.x_hat = result.reconstruction;
            break;
        }
    }
    return out;
}

// Tuning masks and the train/validation split share one seed stream per
// density, independent of the Monte Carlo cells.
struct TuningInstance {
    SamplingMask full_mask;
    SamplingMask train_mask;
    Matrix observed_train;
    IndexSet val_indices;
};

TuningInstance make_tuning_instance(const data::Dataset& dataset, double density,
                                    std::uint64_t seed, double val_fraction) {
    const std::size_t n = dataset.signal.nodes();
    const std::size_t m = dataset.signal.times();
    TuningInstance inst;
    inst.full_mask = random_sampling_mask(n, m, density, seed);

    auto support = inst.full_mask.sampled_indices;
    Rng rng(derive_seed(seed, "val-split"));
    for (std::size_t i = support.size(); i-- > 1;) {
        std::swap(support[i], support[rng.below(i + 1)]);
    }
    std::size_t val_count = static_cast<std::size_t>(
        val_fraction * static_cast<double>(support.size()));
    val_count = std::max<std::size_t>(1, std::min(val_count, support.size() - 1));

    Matrix train = inst.full_mask.mask;
    inst.val_indices.assign(support.begin(), support.begin() + static_cast<long>(val_count));
    std::sort(inst.val_indices.begin(), inst.val_indices.end());
    for (const auto& [i, j] : inst.val_indices) train(i, j) = 0.0;
    inst.train_mask = SamplingMask::from_matrix(std::move(train));
    inst.observed_train = hadamard(inst.train_mask.mask, dataset.signal.values);
    return inst;
}

ChosenParams tune_hyperparameters(const ExperimentConfig& cfg, const data::Dataset& dataset,
                                  const LaplacianBundle& lap,
                                  const std::vector<double>& densities,
                                  std::map<std::string, std::string>& chosen_desc) {
    ChosenParams chosen;
    const std::uint64_t tuning_base = derive_seed(cfg.base_seed, "tuning");

    std::vector<Method> to_tune;
    for (Method m : cfg.methods) {
        const auto& grid = cfg.grids.at(m);
        const std::size_t count =
            std::max(grid.solver_candidates.size(), grid.nn_candidates.size());
        if (count > 1) {
            to_tune.push_back(m);
        } else {
            chosen.index[m] = 0;
        }
    }
    if (!to_tune.empty()) {
        std::map<Method, std::vector<double>> scores;
        for (Method m : to_tune) {
            const auto& grid = cfg.grids.at(m);
            scores[m].assign(std::max(grid.solver_candidates.size(), grid.nn_candidates.size()),
                             0.0);
        }
        for (double density : densities) {
            const auto inst = make_tuning_instance(dataset, density,
                                                   cell_seed(tuning_base, density, 0),
                                                   cfg.tuning_val_fraction);
            ChosenParams probe;
            for (Method m : to_tune) {
                auto& s = scores[m];
                for (std::size_t ci = 0; ci < s.size(); ++ci) {
                    probe.index[m] = ci;
                    double rmse = 1e30;  // failed candidates rank last
                    try {
                        const auto run = run_one(m, cfg, probe, dataset, lap, inst.train_mask,
                                                 inst.observed_train,
                                                 derive_seed(cell_seed(tuning_base, density, 0),
                                                             "tuning-" + to_string(m)));
                        const auto metrics = compute_metrics(run.x_hat, dataset.signal.values,
                                                             inst.val_indices);
                        if (std::isfinite(metrics.rmse)) rmse = metrics.rmse;
                    } catch (const std::exception&) {
                    }
                    s[ci] += rmse;
                }
            }
        }
        for (Method m : to_tune) {
            const auto& s = scores[m];
            chosen.index[m] = static_cast<std::size_t>(
                std::min_element(s.begin(), s.end()) - s.begin());
        }
    }
    for (Method m : cfg.methods) {
        const auto& grid = cfg.grids.at(m);
        const std::size_t ci = chosen.index.at(m);
        chosen_desc[to_string(m)] = grid.solver_candidates.empty()
                                        ? grid.nn_candidates[ci].describe()
                                        : describe(grid.solver_candidates[ci]);
    }
    return chosen;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

// ---------------------------------------------------------------------------
// Monte Carlo runner
// ---------------------------------------------------------------------------

MonteCarloResult run_monte_carlo(const ExperimentConfig& cfg) {
    cfg.validate();

    data::Dataset dataset = cfg.dataset_ref == "synthetic"
                                ? data::generate_synthetic(cfg.synthetic)
                                : data::load_from_manifest(cfg.dataset_ref);
    const LaplacianBundle lap = normalized_laplacian(dataset.graph);
    const std::size_t n = dataset.signal.nodes();

    std::vector<double> densities = cfg.densities;
    std::sort(densities.begin(), densities.end());
    densities.erase(std::unique(densities.begin(), densities.end()), densities.end());
    for (double d : densities) {
        if (std::llround(d * static_cast<double>(n)) < 1) {
            throw std::invalid_argument("config: density " + format_double(d) +
                                        " samples zero nodes per time step");
        }
    }

    MonteCarloResult result;
    const ChosenParams chosen =
        tune_hyperparameters(cfg, dataset, lap, densities, result.chosen_params);

    const std::size_t reps = static_cast<std::size_t>(cfg.repetitions);
    const std::size_t cell_count = densities.size() * reps;

    std::optional<std::ofstream> records_out;
    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        const auto path = std::filesystem::path(cfg.output_dir) / "records.csv";
        records_out.emplace(path);
        if (!*records_out) throw std::runtime_error("cannot write " + path.string());
        *records_out << kRecordsHeader << "\n";
        records_out->flush();
    }

    auto compute_cell = [&](std::size_t cell) {
        const double density = densities[cell / reps];
        const int rep = static_cast<int>(cell % reps);
        const std::uint64_t seed = cell_seed(cfg.base_seed, density, static_cast<std::uint64_t>(rep));
        const SamplingMask mask =
            random_sampling_mask(n, dataset.signal.times(), density, seed);
        const Matrix observed = hadamard(mask.mask, dataset.signal.values);
        IndexSet eval = mask.unsampled_indices();
        if (eval.empty()) {
            // fully-sampled cell: evaluate the fit over all entries
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < dataset.signal.times(); ++j) eval.emplace_back(i, j);
        }
        const std::uint64_t mask_hash = mask.hash();

        std::vector<ResultRecord> records;
        records.reserve(cfg.methods.size());
        for (Method method : cfg.methods) {
            ResultRecord rec;
            rec.method = to_string(method);
            rec.dataset = dataset.name;
            rec.density = density;
            rec.repetition = rep;
            rec.mask_hash = mask_hash;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const auto run =
                    run_one(method, cfg, chosen, dataset, lap, mask, observed, seed);
                const auto metrics = compute_metrics(run.x_hat, dataset.signal.values, eval);
                rec.rmse = metrics.rmse;
                rec.mae = metrics.mae;
                rec.mape = metrics.mape;
                rec.converged = run.converged;
            } catch (const std::exception&) {
                rec.rmse = nan_value();
                rec.mae = nan_value();
                rec.mape = nan_value();
                rec.converged = false;
            }
            rec.wall_time_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            records.push_back(std::move(rec));
        }
        return records;
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t worker_count =
        std::min<std::size_t>(cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads) : hw,
                              cell_count);

    std::vector<std::optional<std::vector<ResultRecord>>> done(cell_count);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next_cell{0};
    std::exception_ptr worker_error;

    auto worker = [&]() {
        for (;;) {
            const std::size_t cell = next_cell.fetch_add(1);
            if (cell >= cell_count) return;
            try {
                auto records = compute_cell(cell);
                std::lock_guard<std::mutex> lock(mu);
                done[cell] = std::move(records);
                cv.notify_all();
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!worker_error) worker_error = std::current_exception();
                done[cell] = std::vector<ResultRecord>{};
                cv.notify_all();
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (std::size_t t = 0; t < worker_count; ++t) pool.emplace_back(worker);

    // Flush cells in canonical order as soon as they complete.
    for (std::size_t cell = 0; cell < cell_count; ++cell) {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait(lock, [&] { return done[cell].has_value(); });
        auto records = std::move(*done[cell]);
        done[cell].reset();
        lock.unlock();
        for (auto& rec : records) {
            if (records_out) {
                *records_out << record_to_csv_line(rec) << "\n";
                records_out->flush();
            }
            result.records.push_back(std::move(rec));
        }
    }
    for (auto& t : pool) t.join();
    if (worker_error) std::rethrow_exception(worker_error);
    return result;
}

// ---------------------------------------------------------------------------
// Summaries and CSV I/O
// ---------------------------------------------------------------------------

namespace {

struct Accumulator {
    double rmse = 0.0, mae = 0.0, mape = 0.0;
    std::size_t n = 0, n_mape = 0;
    void add(const ResultRecord& r) {
        if (std::isfinite(r.rmse)) {
            rmse += r.rmse;
            mae += r.mae;
            ++n;
        }
        if (std::isfinite(r.mape)) {
            mape += r.mape;
            ++n_mape;
        }
    }
};

}  // namespace

Summary summarize(const std::vector<ResultRecord>& records) {
    if (records.empty()) throw std::invalid_argument("summarize: no records");
    // (dataset, method) -> density -> accumulator; std::map keeps the output
    // ordering canonical.
    std::map<std::pair<std::string, std::string>, std::map<double, Accumulator>> cells;
    for (const auto& r : records) {
        cells[{r.dataset, r.method}][r.density].add(r);
    }
    Summary out;
    for (const auto& [key, by_density] : cells) {
        double rmse_sum = 0.0, mae_sum = 0.0, mape_sum = 0.0;
        std::size_t rmse_n = 0, mape_n = 0;
        for (const auto& [density, acc] : by_density) {
            CurveRow row;
            row.dataset = key.first;
            row.method = key.second;
            row.density = density;
            row.mean_rmse = acc.n ? acc.rmse / static_cast<double>(acc.n) : nan_value();
            row.mean_mae = acc.n ? acc.mae / static_cast<double>(acc.n) : nan_value();
            row.mean_mape =
                acc.n_mape ? acc.mape / static_cast<double>(acc.n_mape) : nan_value();
            out.curve.push_back(row);
            if (acc.n) {
                rmse_sum += row.mean_rmse;
                mae_sum += row.mean_mae;
                ++rmse_n;
            }
            if (acc.n_mape) {
                mape_sum += row.mean_mape;
                ++mape_n;
            }
        }
        SummaryRow srow;
        srow.dataset = key.first;
        srow.method = key.second;
        srow.mean_rmse = rmse_n ? rmse_sum / static_cast<double>(rmse_n) : nan_value();
        srow.mean_mae = rmse_n ? mae_sum / static_cast<double>(rmse_n) : nan_value();
        srow.mean_mape = mape_n ? mape_sum / static_cast<double>(mape_n) : nan_value();
        out.per_method.push_back(srow);
    }
    return out;
}

const char* const kRecordsHeader =
    "method,dataset,density,repetition,rmse,mae,mape,wall_time_seconds,converged,mask_hash";

std::string record_to_csv_line(const ResultRecord& r) {
    return r.method + "," + r.dataset + "," + format_double(r.density) + "," +
           std::to_string(r.repetition) + "," + format_double(r.rmse) + "," +
           format_double(r.mae) + "," + format_double(r.mape) + "," +
           format_double(r.wall_time_seconds) + "," + (r.converged ? "1" : "0") + "," +
           hex16(r.mask_hash);
}

void write_records_csv(const std::vector<ResultRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << kRecordsHeader << "\n";
    for (const auto& r : records) out << record_to_csv_line(r) << "\n";
}

std::vector<ResultRecord> read_records_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines[0] != kRecordsHeader) {
        throw std::invalid_argument(path + ": missing or wrong records header");
    }
    std::vector<ResultRecord> records;
    records.reserve(lines.size() - 1);
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const auto f = split_csv_line(lines[ln]);
        if (f.size() != 10) {
            throw std::invalid_argument(path + ": row " + std::to_string(ln + 1) +
                                        " has " + std::to_string(f.size()) + " fields");
        }
        const std::string ctx = path + " row " + std::to_string(ln + 1);
        ResultRecord r;
        r.method = f[0];
        r.dataset = f[1];
        r.density = parse_double(f[2], ctx);
        r.repetition = static_cast<int>(parse_int(f[3], ctx));
        r.rmse = parse_double(f[4], ctx);
        r.mae = parse_double(f[5], ctx);
        r.mape = parse_double(f[6], ctx);
        r.wall_time_seconds = parse_double(f[7], ctx);
        if (f[8] != "0" && f[8] != "1") {
            throw std::invalid_argument(ctx + ": converged flag must be 0/1");
        }
        r.converged = f[8] == "1";
        r.mask_hash = std::stoull(f[9], nullptr, 16);
        records.push_back(std::move(r));
    }
    return records;
}

void write_summary_csv(const Summary& summary, const std::string& summary_path,
                       const std::string& curve_path) {
    {
        std::ofstream out(summary_path);
        if (!out) throw std::runtime_error("cannot write " + summary_path);
        out << "method,dataset,mean_rmse,mean_mae,mean_mape\n";
        for (const auto& r : summary.per_method) {
            out << r.method << "," << r.dataset << "," << format_double(r.mean_rmse) << ","
                << format_double(r.mean_mae) << "," << format_double(r.mean_mape) << "\n";
        }
    }
    {
        std::ofstream out(curve_path);
        if (!out) throw std::runtime_error("cannot write " + curve_path);
        out << "method,dataset,density,mean_rmse,mean_mae,mean_mape\n";
        for (const auto& r : summary.curve) {
            out << r.method << "," << r.dataset << "," << format_double(r.density) << ","
                << format_double(r.mean_rmse) << "," << format_double(r.mean_mae) << ","
                << format_double(r.mean_mape) << "\n";
        }
    }
}

}  // namespace tvg::bench
