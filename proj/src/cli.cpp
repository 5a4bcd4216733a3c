#include "eqa/cli.hpp"

#include "eqa/csv.hpp"
#include "eqa/dataset.hpp"
#include "eqa/error.hpp"
#include "eqa/feature_select.hpp"
#include "eqa/kernels.hpp"
#include "eqa/metrics.hpp"
#include "eqa/svm.hpp"
#include "eqa/sweep.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace eqa {

namespace {

constexpr const char* kVersion = "0.1.0";

// One label per line; an optional "label" header is skipped.
std::vector<int> load_labels_file(const std::string& path) {
    const auto rows = read_csv(path);
    std::vector<int> labels;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string cell = trim(rows[r][0]);
        if (r == 0) {
            std::string lower = cell;
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            if (lower == "label" || lower == "labels") continue;
        }
        if (cell == "0" || cell == "ALL") {
            labels.push_back(0);
        } else if (cell == "1" || cell == "AML") {
            labels.push_back(1);
        } else {
            throw Error("label file '" + path + "': unrecognized label '" + cell + "' at line " +
                        std::to_string(r + 1));
        }
    }
    if (labels.empty()) throw Error("label file '" + path + "' has no labels");
    return labels;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
}

struct PreprocessOpts {
    std::vector<std::string> inputs;
    std::string format = "tidy";
    std::string labels_path;
    std::string output;
    bool no_quantile = false;
    bool scale = false;
    double scale_lo = 0.0;
    double scale_hi = std::numbers::pi;
};

int cmd_preprocess(const PreprocessOpts& o) {
    const CsvFormat fmt = o.format == "golub-wide" ? CsvFormat::golub_wide : CsvFormat::tidy;
    ExpressionDataset ds = load_expression_csv(o.inputs[0], fmt, o.labels_path);
    for (std::size_t i = 1; i < o.inputs.size(); ++i) {
        ds = concat_samples(ds, load_expression_csv(o.inputs[i], fmt, o.labels_path));
    }
    if (!o.no_quantile) ds.values = quantile_normalize(ds.values);
    if (o.scale) {
        const ScalingParams params = fit_minmax(ds.values, o.scale_lo, o.scale_hi);
        ds.values = apply_minmax(ds.values, params);
    }
    write_tidy_csv(ds, o.output);
    std::cerr << "wrote " << ds.n_samples() << " samples x " << ds.n_features()
              << " features to " << o.output << "\n";
    return 0;
}

struct SelectOpts {
    std::string input;
    std::string method;
    int k = 20;
    std::uint64_t seed = 0;
    double alpha = 0.5;
    double penalty = 0.0;
    double t_start = 10.0;
    double t_end = 0.01;
    int sweeps = 2000;
    int restarts = 8;
    std::string output;
    bool json_stdout = false;
};

int cmd_select(const SelectOpts& o) {
    const ExpressionDataset ds = load_expression_csv(o.input, CsvFormat::tidy);
    Eigen::VectorXd y(ds.n_samples());
    for (int i = 0; i < ds.n_samples(); ++i) {
        y[i] = ds.labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
    }
    FeatureSelection sel;
    if (selection_method_from_string(o.method) == SelectionMethod::lasso) {
        sel = lasso_select_k(ds.values, y, o.k);
        if (!sel.exact_count) {
            std::cerr << "warning: requested " << o.k << " features, lambda path delivered "
                      << sel.indices.size() << "\n";
        }
    } else {
        AnnealSchedule schedule{o.t_start, o.t_end, o.sweeps, o.restarts, o.seed};
        sel = qubo_select_k(ds.values, y, o.k, schedule, o.alpha, o.penalty);
    }
    const std::string doc = selection_to_json(sel, ds.feature_ids);
    if (!o.output.empty()) write_text_file(o.output, doc);
    if (o.json_stdout || o.output.empty()) std::cout << doc << "\n";
    return 0;
}

struct KernelOpts {
    std::string input;
    std::string against;
    std::string map = "zz";
    int reps = 2;
    std::string output;
};

int cmd_kernel(const KernelOpts& o) {
    const ExpressionDataset a = load_expression_csv(o.input, CsvFormat::tidy);
    KernelMatrix k;
    if (o.map == "linear") {
        k = o.against.empty()
                ? linear_kernel(a.values)
                : linear_kernel(a.values,
                                load_expression_csv(o.against, CsvFormat::tidy).values);
    } else {
        const FeatureMapKind map = feature_map_from_string(o.map);
        k = o.against.empty()
                ? quantum_kernel_matrix(a.values, map, o.reps)
                : quantum_kernel_matrix(a.values,
                                        load_expression_csv(o.against, CsvFormat::tidy).values,
                                        map, o.reps);
    }
    write_kernel_csv(k, o.output);
    std::cerr << "wrote " << k.values.rows() << "x" << k.values.cols() << " " << to_string(k.kind)
              << " kernel to " << o.output << "\n";
    return 0;
}

struct TrainEvalOpts {
    std::string train_kernel;
    std::string train_labels;
    std::string test_kernel;
    std::string test_labels;
    double c = 1.0;
    double tol = 1e-3;
    std::string output;
    std::string model_out;
    bool json_stdout = false;
};

int cmd_train_eval(const TrainEvalOpts& o) {
    const KernelMatrix k_train = read_kernel_csv(o.train_kernel);
    const std::vector<int> y_train = load_labels_file(o.train_labels);
    const SvmModel model = smo_train(k_train, y_train, o.c, o.tol);

    nlohmann::json j;
    j["c"] = o.c;
    j["n_train"] = y_train.size();
    j["n_support"] = model.support_indices.size();
    if (!o.test_kernel.empty()) {
        const KernelMatrix k_cross = read_kernel_csv(o.test_kernel);
        const std::vector<int> y_test_01 = load_labels_file(o.test_labels);
        std::vector<int> y_test;
        for (int l : y_test_01) y_test.push_back(l == 1 ? 1 : -1);
        const auto [pred, dec] = predict(model, k_cross);
        j["f1"] = f1_score(y_test, pred, 1);
        j["balanced_accuracy"] = balanced_accuracy(y_test, pred);
        j["n_test"] = y_test.size();
        j["decision_values"] = dec;
    }
    const std::string doc = j.dump(2);
    if (!o.model_out.empty()) write_text_file(o.model_out, model_to_json(model));
    if (!o.output.empty()) write_text_file(o.output, doc);
    if (o.json_stdout || o.output.empty()) std::cout << doc << "\n";
    return 0;
}

struct SweepOpts {
    std::string data;
    std::string config;
    std::string out_dir;
    int jobs = 1;
    std::string formats = "csv,json";
    bool quantile = false;
};

int cmd_sweep(const SweepOpts& o) {
    ExpressionDataset ds = load_expression_csv(o.data, CsvFormat::tidy);
    if (o.quantile) ds.values = quantile_normalize(ds.values);
    const SweepConfig cfg = load_sweep_config(o.config);
    const SweepResult res = run_sweep(ds, cfg, o.jobs);

    const bool csv = o.formats.find("csv") != std::string::npos;
    const bool json = o.formats.find("json") != std::string::npos;
    const ExportManifest manifest = export_result(res, o.out_dir, csv, json);
    std::cerr << "wrote " << manifest.files.size() << " files to " << o.out_dir << "\n";
    if (!res.provenance.leakage_audit_passed) {
        std::cerr << "error: leakage audit failed\n";
        return 2;
    }
    for (const auto& cell : res.provenance.cells) {
        if (!cell.ok) {
            std::cerr << "cell (" << cell.feature_count << ", " << cell.sample_count
                      << ") failed: " << cell.error << "\n";
        }
    }
    return 0;
}

struct GeodiffOpts {
    std::string classical;
    std::string quantum;
    double reg = 1e-7;
    bool json_stdout = false;
};

int cmd_geodiff(const GeodiffOpts& o) {
    const KernelMatrix kc = read_kernel_csv(o.classical);
    const KernelMatrix kq = read_kernel_csv(o.quantum);
    const double g = geometric_difference(kc, kq, o.reg);
    if (o.json_stdout) {
        nlohmann::json j;
        j["geometric_difference"] = g;
        j["reg"] = o.reg;
        j["size"] = kc.values.rows();
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << format_double(g) << "\n";
    }
    return 0;
}

struct PtriOpts {
    std::string input;
    std::string classical;
    std::string quantum;
    std::string output;
    std::string out_dir;
};

int cmd_ptri(const PtriOpts& o) {
    if (!o.input.empty()) {
        MetricSurface s = read_surface_csv(o.input);
        s.metric_name = std::filesystem::path(o.input).stem().string();
        const MetricSurface tri = tri_surface(s);
        write_surface_csv(tri, o.output);
        std::cerr << "wrote " << o.output << "\n";
        return 0;
    }
    if (o.classical.empty() || o.quantum.empty()) {
        throw Error("ptri: provide either --input or both --classical and --quantum");
    }
    const MetricSurface sc = read_surface_csv(o.classical);
    const MetricSurface sq = read_surface_csv(o.quantum);
    const auto [tri_c, tri_q, tri_d] = ptri_comparison(sc, sq);
    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec) throw Error("cannot create output directory: " + o.out_dir);
    const auto dir = std::filesystem::path(o.out_dir);
    write_surface_csv(tri_c, (dir / "tri_classical.csv").string());
    write_surface_csv(tri_q, (dir / "tri_quantum.csv").string());
    write_surface_csv(tri_d, (dir / "tri_difference.csv").string());
    std::cerr << "wrote tri_classical.csv, tri_quantum.csv, tri_difference.csv to " << o.out_dir
              << "\n";
    return 0;
}

struct ResourceOpts {
    std::string map = "zz";
    int qubits = 0;
    int reps = 0;
    bool table = false;
};

std::string render_depth_table(FeatureMapKind map) {
    std::ostringstream out;
    out << "depth (" << to_string(map) << ", linear entanglement)\n";
    out << "  n\\r";
    for (int r = 1; r <= 4; ++r) out << "\t" << r;
    out << "\n";
    for (int n = 2; n <= 6; ++n) {
        out << "  " << n;
        for (int r = 1; r <= 4; ++r) {
            out << "\t" << estimate_resources(map, n, r).depth;
        }
        out << "\n";
    }
    return out.str();
}

std::string render_gate_table() {
    std::ostringstream out;
    out << "gate counts per map (n qubits, r repetitions)\n";
    out << "  zz:      H = n*r, P = r*(2n-1), CX = 2*(n-1)*r\n";
    out << "  pauli_z: H = n*r, P = n*r,      CX = 0\n";
    out << "  map\tn\tr\tH\tP\tCX\n";
    for (int n = 2; n <= 6; ++n) {
        for (int r = 1; r <= 4; ++r) {
            const auto zz = estimate_resources(FeatureMapKind::zz, n, r);
            out << "  zz\t" << n << "\t" << r << "\t" << zz.h_count << "\t" << zz.p_count << "\t"
                << zz.cx_count << "\n";
        }
    }
    for (int n = 1; n <= 6; ++n) {
        for (int r = 1; r <= 4; ++r) {
            const auto pz = estimate_resources(FeatureMapKind::pauli_z, n, r);
            out << "  pauli_z\t" << n << "\t" << r << "\t" << pz.h_count << "\t" << pz.p_count
                << "\t" << pz.cx_count << "\n";
        }
    }
    return out.str();
}

int cmd_resources(const ResourceOpts& o) {
    const FeatureMapKind map = feature_map_from_string(o.map);
    if (o.table) {
        std::cout << render_depth_table(map) << "\n" << render_gate_table();
        return 0;
    }
    if (o.qubits < 1 || o.reps < 1) {
        throw Error("resources: --qubits and --reps are required unless --table is given");
    }
    std::cout << resource_estimate_json(estimate_resources(map, o.qubits, o.reps)) << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Quantum-vs-classical kernel analysis pipeline for expression data"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    PreprocessOpts pre;
    auto* sub_pre = app.add_subcommand(
        "preprocess", "Load expression CSVs, quantile-normalize, optionally min-max scale");
    sub_pre->add_option("--input", pre.inputs, "Input CSV (repeat for a train/test pair)")
        ->required();
    sub_pre->add_option("--format", pre.format, "Input layout")
        ->check(CLI::IsMember({"golub-wide", "tidy"}));
    sub_pre->add_option("--labels", pre.labels_path, "Companion label CSV (golub-wide)");
    sub_pre->add_option("--output", pre.output, "Output tidy CSV")->required();
    sub_pre->add_flag("--no-quantile", pre.no_quantile, "Skip quantile normalization");
    sub_pre->add_flag("--scale", pre.scale, "Min-max scale all rows into [lo, hi]");
    sub_pre->add_option("--scale-lo", pre.scale_lo, "Scale target low (radians)");
    sub_pre->add_option("--scale-hi", pre.scale_hi, "Scale target high (radians)");

    SelectOpts sel;
    auto* sub_sel = app.add_subcommand("select", "Select k features by lasso or QUBO annealing");
    sub_sel->add_option("--input", sel.input, "Tidy data CSV")->required();
    sub_sel->add_option("--method", sel.method, "Selection method")
        ->check(CLI::IsMember({"lasso", "qubo"}))
        ->required();
    sub_sel->add_option("--k", sel.k, "Number of features")->required();
    sub_sel->add_option("--seed", sel.seed, "Annealer seed");
    sub_sel->add_option("--alpha", sel.alpha, "QUBO redundancy weight");
    sub_sel->add_option("--penalty", sel.penalty, "QUBO cardinality penalty (0 = auto)");
    sub_sel->add_option("--t-start", sel.t_start, "Annealer start temperature");
    sub_sel->add_option("--t-end", sel.t_end, "Annealer end temperature");
    sub_sel->add_option("--sweeps", sel.sweeps, "Annealer sweeps");
    sub_sel->add_option("--restarts", sel.restarts, "Annealer restarts");
    sub_sel->add_option("--output", sel.output, "Selection JSON path (stdout if omitted)");
    sub_sel->add_flag("--json", sel.json_stdout, "Also print JSON to stdout");

    KernelOpts ker;
    auto* sub_ker = app.add_subcommand("kernel", "Compute a Gram matrix CSV from a data CSV");
    sub_ker->add_option("--input", ker.input, "Tidy data CSV (rows)")->required();
    sub_ker->add_option("--against", ker.against, "Second tidy CSV (columns; default = input)");
    sub_ker->add_option("--map", ker.map, "Kernel map")
        ->check(CLI::IsMember({"zz", "pauli_z", "linear"}));
    sub_ker->add_option("--reps", ker.reps, "Feature map repetitions");
    sub_ker->add_option("--output", ker.output, "Kernel CSV path")->required();

    TrainEvalOpts te;
    auto* sub_te = app.add_subcommand("train-eval", "Train an SVM on a kernel, score a test block");
    sub_te->add_option("--train-kernel", te.train_kernel, "Square train kernel CSV")->required();
    sub_te->add_option("--train-labels", te.train_labels, "Train labels file")->required();
    sub_te->add_option("--test-kernel", te.test_kernel, "Test x train kernel CSV");
    sub_te->add_option("--test-labels", te.test_labels, "Test labels file");
    sub_te->add_option("--c", te.c, "Soft-margin parameter");
    sub_te->add_option("--tol", te.tol, "KKT tolerance");
    sub_te->add_option("--output", te.output, "Metrics JSON path (stdout if omitted)");
    sub_te->add_option("--model-out", te.model_out, "Model JSON path");
    sub_te->add_flag("--json", te.json_stdout, "Also print JSON to stdout");

    SweepOpts sw;
    auto* sub_sw = app.add_subcommand("sweep", "Run the full configuration-grid experiment");
    sub_sw->add_option("--data", sw.data, "Tidy data CSV (preprocessed)")->required();
    sub_sw->add_option("--config", sw.config, "Sweep config JSON")->required();
    sub_sw->add_option("--out", sw.out_dir, "Output directory")->required();
    sub_sw->add_option("--jobs", sw.jobs, "Concurrent cells")->check(CLI::PositiveNumber);
    sub_sw->add_option("--formats", sw.formats, "Comma list of csv,json");
    sub_sw->add_flag("--quantile", sw.quantile, "Quantile-normalize before sweeping");

    GeodiffOpts gd;
    auto* sub_gd = app.add_subcommand("geodiff", "Geometric difference of two kernel CSVs");
    sub_gd->add_option("classical", gd.classical, "Classical kernel CSV")->required();
    sub_gd->add_option("quantum", gd.quantum, "Quantum kernel CSV")->required();
    sub_gd->add_option("--reg", gd.reg, "Ridge added to the inverted kernel");
    sub_gd->add_flag("--json", gd.json_stdout, "JSON output");

    PtriOpts pt;
    auto* sub_pt = app.add_subcommand("ptri", "Terrain ruggedness of metric surfaces");
    sub_pt->add_option("--input", pt.input, "Single surface CSV");
    sub_pt->add_option("--output", pt.output, "TRI CSV path (single-surface mode)");
    sub_pt->add_option("--classical", pt.classical, "Classical surface CSV");
    sub_pt->add_option("--quantum", pt.quantum, "Quantum surface CSV");
    sub_pt->add_option("--out-dir", pt.out_dir, "Output directory (pair mode)");

    ResourceOpts rs;
    auto* sub_rs = app.add_subcommand("resources", "Depth and gate counts for a feature map");
    sub_rs->add_option("--map", rs.map, "Feature map")->check(CLI::IsMember({"zz", "pauli_z"}));
    sub_rs->add_option("--qubits", rs.qubits, "Number of qubits");
    sub_rs->add_option("--reps", rs.reps, "Repetitions");
    sub_rs->add_flag("--table", rs.table, "Render the full depth and gate tables");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (sub_pre->parsed()) return cmd_preprocess(pre);
        if (sub_sel->parsed()) return cmd_select(sel);
        if (sub_ker->parsed()) return cmd_kernel(ker);
        if (sub_te->parsed()) return cmd_train_eval(te);
        if (sub_sw->parsed()) return cmd_sweep(sw);
        if (sub_gd->parsed()) return cmd_geodiff(gd);
        if (sub_pt->parsed()) return cmd_ptri(pt);
        if (sub_rs->parsed()) return cmd_resources(rs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

} // namespace eqa
