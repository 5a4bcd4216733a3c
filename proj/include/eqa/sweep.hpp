#pragma once

#include "eqa/dataset.hpp"
#include "eqa/feature_select.hpp"
#include "eqa/metrics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace eqa {

struct SweepConfig {
    std::vector<int> feature_counts{2, 8, 14};
    std::vector<int> sample_counts{25, 41, 57};
    SelectionMethod selection_method = SelectionMethod::lasso;
    FeatureMapKind map_kind = FeatureMapKind::zz;
    int repetitions = 2;
    double svm_c = 1.0;
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    int k_pool = 20;

    void validate() const;
};

SweepConfig load_sweep_config(const std::string& path);
std::string sweep_config_to_json(const SweepConfig& cfg);

struct CellProvenance {
    int feature_count = 0;
    int sample_count = 0;
    bool ok = false;
    std::string error;
    std::vector<int> feature_indices;       // columns into the input dataset
    std::vector<std::string> feature_ids;
    std::vector<int> train_rows_used;       // global row ids fed to scaling/Gram/SVM
    double f1_classical = 0.0, f1_quantum = 0.0;
    double balanced_accuracy_classical = 0.0, balanced_accuracy_quantum = 0.0;
    double geometric_difference = 0.0;
};

struct SweepProvenance {
    std::vector<int> train_rows;     // split, global row ids
    std::vector<int> test_rows;
    std::vector<int> selection_rows; // rows the feature selector saw
    std::vector<int> pool_indices;   // the k_pool selection, score order
    std::vector<std::string> pool_feature_ids;
    std::vector<CellProvenance> cells;
    bool leakage_audit_passed = false;
};

struct SweepResult {
    SweepConfig config;
    std::vector<MetricSurface> surfaces; // f1/balanced_accuracy x classical/quantum
    MetricSurface geometric_diff;
    std::vector<MetricSurface> ptri; // 3 per metric when the grid allows it
    bool ptri_skipped = false;
    std::string ptri_skip_reason;
    SweepProvenance provenance;
};

/// Checks that test rows never reach selection, subsampling, scaling, or the
/// training Gram blocks.
bool leakage_audit(const SweepProvenance& prov);

/// Runs the full grid: split once, select a k_pool feature pool on the
/// training split, then per cell (f, m) take the top-f pool prefix, subsample
/// m training rows (seed derived from (seed, f, m)), fit [0, pi] scaling on
/// those rows, build linear and quantum Grams, train both SVMs, and score the
/// held-out test split. Cell failures are recorded and do not abort the rest.
SweepResult run_sweep(const ExpressionDataset& ds, const SweepConfig& cfg, int jobs = 1);

struct ExportManifest {
    std::vector<std::string> files; // relative to the output directory
};

/// Writes one tidy CSV per surface and/or a result.json bundle with full
/// provenance, plus manifest.json. Output is byte-deterministic.
ExportManifest export_result(const SweepResult& res, const std::string& dir, bool csv_format,
                             bool json_format);

} // namespace eqa
