#include "eqa/sweep.hpp"

#include "eqa/error.hpp"
#include "eqa/rng.hpp"
#include "eqa/svm.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <thread>

namespace eqa {

void SweepConfig::validate() const {
    if (feature_counts.empty() || sample_counts.empty()) {
        throw Error("sweep config: feature_counts and sample_counts must be non-empty");
    }
    for (int f : feature_counts) {
        if (f < 1) throw Error("sweep config: feature counts must be >= 1");
        if (f > k_pool) throw Error("sweep config: feature count exceeds k_pool");
    }
    for (int s : sample_counts) {
        if (s < 2) throw Error("sweep config: sample counts must be >= 2");
    }
    if (repetitions < 1) throw Error("sweep config: repetitions must be >= 1");
    if (svm_c <= 0.0) throw Error("sweep config: svm_c must be > 0");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error("sweep config: test_fraction must be in (0, 1)");
    }
    if (k_pool < 1) throw Error("sweep config: k_pool must be >= 1");
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("config parse error: " + std::string(e.what()));
    }
    SweepConfig cfg;
    static const std::set<std::string> known = {
        "feature_counts", "sample_counts", "selection_method", "map_kind", "repetitions",
        "svm_c",          "test_fraction", "seed",             "k_pool"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) throw Error("config: unknown key '" + key + "'");
    }
    try {
        if (j.contains("feature_counts")) cfg.feature_counts = j["feature_counts"].get<std::vector<int>>();
        if (j.contains("sample_counts")) cfg.sample_counts = j["sample_counts"].get<std::vector<int>>();
        if (j.contains("selection_method")) {
            cfg.selection_method = selection_method_from_string(j["selection_method"].get<std::string>());
        }
        if (j.contains("map_kind")) cfg.map_kind = feature_map_from_string(j["map_kind"].get<std::string>());
        if (j.contains("repetitions")) cfg.repetitions = j["repetitions"].get<int>();
        if (j.contains("svm_c")) cfg.svm_c = j["svm_c"].get<double>();
        if (j.contains("test_fraction")) cfg.test_fraction = j["test_fraction"].get<double>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("k_pool")) cfg.k_pool = j["k_pool"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("config field error: " + std::string(e.what()));
    }
    cfg.validate();
    return cfg;
}

namespace {

nlohmann::json config_json(const SweepConfig& cfg) {
    nlohmann::json j;
    j["feature_counts"] = cfg.feature_counts;
    j["sample_counts"] = cfg.sample_counts;
    j["selection_method"] = to_string(cfg.selection_method);
    j["map_kind"] = to_string(cfg.map_kind);
    j["repetitions"] = cfg.repetitions;
    j["svm_c"] = cfg.svm_c;
    j["test_fraction"] = cfg.test_fraction;
    j["seed"] = cfg.seed;
    j["k_pool"] = cfg.k_pool;
    return j;
}

std::uint64_t cell_seed(std::uint64_t base, int f, int m) {
    return Rng::mix(Rng::mix(base, static_cast<std::uint64_t>(f)),
                    static_cast<std::uint64_t>(m));
}

std::vector<int> to_pm1(const std::vector<int>& labels01) {
    std::vector<int> y;
    y.reserve(labels01.size());
    for (int l : labels01) y.push_back(l == 1 ? 1 : -1);
    return y;
}

struct CellScores {
    double f1_classical, f1_quantum;
    double ba_classical, ba_quantum;
    double geo_diff;
};

CellScores run_cell(const ExpressionDataset& train_ds, const ExpressionDataset& test_ds,
                    const std::vector<int>& cols, const std::vector<int>& sub_local,
                    const SweepConfig& cfg) {
    Eigen::MatrixXd x_train(static_cast<int>(sub_local.size()), static_cast<int>(cols.size()));
    std::vector<int> y_train;
    for (std::size_t i = 0; i < sub_local.size(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            x_train(static_cast<int>(i), static_cast<int>(c)) =
                train_ds.values(sub_local[i], cols[c]);
        }
        y_train.push_back(train_ds.labels[static_cast<std::size_t>(sub_local[i])]);
    }
    Eigen::MatrixXd x_test(test_ds.n_samples(), static_cast<int>(cols.size()));
    for (int i = 0; i < test_ds.n_samples(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            x_test(i, static_cast<int>(c)) = test_ds.values(i, cols[c]);
        }
    }

    const ScalingParams scaling = fit_minmax(x_train, 0.0, std::numbers::pi);
    const Eigen::MatrixXd train_angles = apply_minmax(x_train, scaling);
    const Eigen::MatrixXd test_angles = apply_minmax(x_test, scaling);

    const std::vector<int> y_train_pm = to_pm1(y_train);
    const std::vector<int> y_test_pm = to_pm1(test_ds.labels);

    const KernelMatrix k_classical = linear_kernel(train_angles);
    const KernelMatrix k_classical_cross = linear_kernel(test_angles, train_angles);
    const KernelMatrix k_quantum =
        quantum_kernel_matrix(train_angles, cfg.map_kind, cfg.repetitions);
    const KernelMatrix k_quantum_cross =
        quantum_kernel_matrix(test_angles, train_angles, cfg.map_kind, cfg.repetitions);

    const SvmModel model_c = smo_train(k_classical, y_train_pm, cfg.svm_c);
    const SvmModel model_q = smo_train(k_quantum, y_train_pm, cfg.svm_c);
    const auto [pred_c, dec_c] = predict(model_c, k_classical_cross);
    const auto [pred_q, dec_q] = predict(model_q, k_quantum_cross);

    CellScores scores{};
    scores.f1_classical = f1_score(y_test_pm, pred_c, 1);
    scores.f1_quantum = f1_score(y_test_pm, pred_q, 1);
    scores.ba_classical = balanced_accuracy(y_test_pm, pred_c);
    scores.ba_quantum = balanced_accuracy(y_test_pm, pred_q);
    scores.geo_diff = geometric_difference(k_classical, k_quantum);
    return scores;
}

MetricSurface make_surface(const SweepConfig& cfg, const std::string& metric,
                           const std::string& kernel) {
    MetricSurface s;
    s.feature_axis = cfg.feature_counts;
    s.sample_axis = cfg.sample_counts;
    s.values.setZero(static_cast<int>(cfg.feature_counts.size()),
                     static_cast<int>(cfg.sample_counts.size()));
    s.metric_name = metric;
    s.kernel_name = kernel;
    return s;
}

} // namespace

bool leakage_audit(const SweepProvenance& prov) {
    const std::set<int> test(prov.test_rows.begin(), prov.test_rows.end());
    const std::set<int> train(prov.train_rows.begin(), prov.train_rows.end());
    for (int r : prov.selection_rows) {
        if (test.count(r) || !train.count(r)) return false;
    }
    for (const auto& cell : prov.cells) {
        for (int r : cell.train_rows_used) {
            if (test.count(r) || !train.count(r)) return false;
        }
    }
    return true;
}

SweepResult run_sweep(const ExpressionDataset& ds, const SweepConfig& cfg, int jobs) {
    cfg.validate();
    ds.validate();

    SweepResult res;
    res.config = cfg;

    auto [train_idx, test_idx] = stratified_split_indices(ds.labels, cfg.test_fraction, cfg.seed);
    for (int m : cfg.sample_counts) {
        if (m > static_cast<int>(train_idx.size())) {
            throw Error("sweep config: sample count " + std::to_string(m) +
                        " exceeds training-set size " + std::to_string(train_idx.size()));
        }
    }
    const ExpressionDataset train_ds = take_rows(ds, train_idx);
    const ExpressionDataset test_ds = take_rows(ds, test_idx);
    res.provenance.train_rows = train_idx;
    res.provenance.test_rows = test_idx;
    res.provenance.selection_rows = train_idx; // selection sees the whole training split

    Eigen::VectorXd y_train(train_ds.n_samples());
    for (int i = 0; i < train_ds.n_samples(); ++i) {
        y_train[i] = train_ds.labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
    }

    FeatureSelection pool;
    if (cfg.selection_method == SelectionMethod::lasso) {
        pool = lasso_select_k(train_ds.values, y_train, cfg.k_pool);
    } else {
        AnnealSchedule schedule;
        schedule.seed = Rng::mix(cfg.seed, 0x5e1ec7u);
        pool = qubo_select_k(train_ds.values, y_train, cfg.k_pool, schedule);
    }
    res.provenance.pool_indices = pool.indices;
    for (int i : pool.indices) {
        res.provenance.pool_feature_ids.push_back(ds.feature_ids[static_cast<std::size_t>(i)]);
    }

    const int nf = static_cast<int>(cfg.feature_counts.size());
    const int ns = static_cast<int>(cfg.sample_counts.size());
    res.provenance.cells.resize(static_cast<std::size_t>(nf) * ns);

    const auto run_one = [&](int cell_index) {
        const int fi = cell_index / ns;
        const int sj = cell_index % ns;
        const int f = cfg.feature_counts[static_cast<std::size_t>(fi)];
        const int m = cfg.sample_counts[static_cast<std::size_t>(sj)];
        CellProvenance& cell = res.provenance.cells[static_cast<std::size_t>(cell_index)];
        cell.feature_count = f;
        cell.sample_count = m;
        try {
            if (f > static_cast<int>(pool.indices.size())) {
                throw Error("cell needs " + std::to_string(f) + " features but the pool has " +
                            std::to_string(pool.indices.size()));
            }
            const std::vector<int> cols(pool.indices.begin(), pool.indices.begin() + f);
            const std::vector<int> sub_local =
                stratified_subsample_indices(train_ds.labels, m, cell_seed(cfg.seed, f, m));
            cell.feature_indices = cols;
            for (int c : cols) {
                cell.feature_ids.push_back(ds.feature_ids[static_cast<std::size_t>(c)]);
            }
            for (int local : sub_local) {
                cell.train_rows_used.push_back(train_idx[static_cast<std::size_t>(local)]);
            }
            const CellScores scores = run_cell(train_ds, test_ds, cols, sub_local, cfg);
            cell.f1_classical = scores.f1_classical;
            cell.f1_quantum = scores.f1_quantum;
            cell.balanced_accuracy_classical = scores.ba_classical;
            cell.balanced_accuracy_quantum = scores.ba_quantum;
            cell.geometric_difference = scores.geo_diff;
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
    };

    const int n_cells = nf * ns;
    if (jobs <= 1) {
        for (int i = 0; i < n_cells; ++i) run_one(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> workers;
        const int n_workers = std::min(jobs, n_cells);
        workers.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) {
            workers.emplace_back([&] {
                for (int i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) {
                    run_one(i);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    MetricSurface f1_c = make_surface(cfg, "f1", "classical");
    MetricSurface f1_q = make_surface(cfg, "f1", "quantum");
    MetricSurface ba_c = make_surface(cfg, "balanced_accuracy", "classical");
    MetricSurface ba_q = make_surface(cfg, "balanced_accuracy", "quantum");
    res.geometric_diff = make_surface(cfg, "geometric_difference", "classical_vs_quantum");

    bool all_ok = true;
    for (int i = 0; i < n_cells; ++i) {
        const CellProvenance& cell = res.provenance.cells[static_cast<std::size_t>(i)];
        const int fi = i / ns;
        const int sj = i % ns;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        f1_c.values(fi, sj) = cell.ok ? cell.f1_classical : nan;
        f1_q.values(fi, sj) = cell.ok ? cell.f1_quantum : nan;
        ba_c.values(fi, sj) = cell.ok ? cell.balanced_accuracy_classical : nan;
        ba_q.values(fi, sj) = cell.ok ? cell.balanced_accuracy_quantum : nan;
        res.geometric_diff.values(fi, sj) = cell.ok ? cell.geometric_difference : nan;
        all_ok = all_ok && cell.ok;
    }
    res.surfaces = {f1_c, f1_q, ba_c, ba_q};

    if (nf < 2 || ns < 2) {
        res.ptri_skipped = true;
        res.ptri_skip_reason = "grid too small";
    } else if (!all_ok) {
        res.ptri_skipped = true;
        res.ptri_skip_reason = "grid has failed cells";
    } else {
        auto [f1_tri_c, f1_tri_q, f1_tri_d] = ptri_comparison(f1_c, f1_q);
        auto [ba_tri_c, ba_tri_q, ba_tri_d] = ptri_comparison(ba_c, ba_q);
        res.ptri = {f1_tri_c, f1_tri_q, f1_tri_d, ba_tri_c, ba_tri_q, ba_tri_d};
    }

    res.provenance.leakage_audit_passed = leakage_audit(res.provenance);
    return res;
}

namespace {

nlohmann::json surface_json(const MetricSurface& s) {
    nlohmann::json j;
    j["metric"] = s.metric_name;
    j["kernel"] = s.kernel_name;
    j["feature_axis"] = s.feature_axis;
    j["sample_axis"] = s.sample_axis;
    auto rows = nlohmann::json::array();
    for (int i = 0; i < s.values.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (int j2 = 0; j2 < s.values.cols(); ++j2) {
            if (std::isfinite(s.values(i, j2))) {
                row.push_back(s.values(i, j2));
            } else {
                row.push_back(nullptr);
            }
        }
        rows.push_back(row);
    }
    j["values"] = rows;
    return j;
}

std::string surface_file_name(const MetricSurface& s) {
    return s.metric_name + "_" + s.kernel_name + ".csv";
}

} // namespace

ExportManifest export_result(const SweepResult& res, const std::string& dir, bool csv_format,
                             bool json_format) {
    ExportManifest manifest;
    if (!csv_format && !json_format) {
        std::cerr << "export_result: no formats requested, nothing written\n";
        return manifest;
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory: " + dir);

    std::vector<const MetricSurface*> all;
    for (const auto& s : res.surfaces) all.push_back(&s);
    all.push_back(&res.geometric_diff);
    for (const auto& s : res.ptri) all.push_back(&s);

    if (csv_format) {
        for (const auto* s : all) {
            const std::string name = surface_file_name(*s);
            write_surface_csv(*s, (std::filesystem::path(dir) / name).string());
            manifest.files.push_back(name);
        }
    }
    if (json_format) {
        nlohmann::json j;
        j["config"] = config_json(res.config);
        auto surfaces = nlohmann::json::array();
        for (const auto* s : all) surfaces.push_back(surface_json(*s));
        j["surfaces"] = surfaces;
        j["ptri_skipped"] = res.ptri_skipped;
        if (res.ptri_skipped) j["ptri_skip_reason"] = res.ptri_skip_reason;

        nlohmann::json prov;
        prov["train_rows"] = res.provenance.train_rows;
        prov["test_rows"] = res.provenance.test_rows;
        prov["selection_rows"] = res.provenance.selection_rows;
        prov["pool_indices"] = res.provenance.pool_indices;
        prov["pool_feature_ids"] = res.provenance.pool_feature_ids;
        prov["leakage_audit_passed"] = res.provenance.leakage_audit_passed;
        auto cells = nlohmann::json::array();
        for (const auto& cell : res.provenance.cells) {
            nlohmann::json cj;
            cj["feature_count"] = cell.feature_count;
            cj["sample_count"] = cell.sample_count;
            cj["ok"] = cell.ok;
            if (!cell.ok) cj["error"] = cell.error;
            cj["feature_indices"] = cell.feature_indices;
            cj["feature_ids"] = cell.feature_ids;
            cj["train_rows_used"] = cell.train_rows_used;
            if (cell.ok) {
                cj["f1_classical"] = cell.f1_classical;
                cj["f1_quantum"] = cell.f1_quantum;
                cj["balanced_accuracy_classical"] = cell.balanced_accuracy_classical;
                cj["balanced_accuracy_quantum"] = cell.balanced_accuracy_quantum;
                cj["geometric_difference"] = cell.geometric_difference;
            }
            cells.push_back(cj);
        }
        prov["cells"] = cells;
        j["provenance"] = prov;

        std::ofstream out(std::filesystem::path(dir) / "result.json", std::ios::binary);
        if (!out) throw Error("cannot write result.json under " + dir);
        out << j.dump(2) << '\n';
        manifest.files.push_back("result.json");
    }

    std::sort(manifest.files.begin(), manifest.files.end());
    nlohmann::json mj;
    mj["files"] = manifest.files;
    std::ofstream mout(std::filesystem::path(dir) / "manifest.json", std::ios::binary);
    if (!mout) throw Error("cannot write manifest.json under " + dir);
    mout << mj.dump(2) << '\n';
    return manifest;
}

} // namespace eqa
