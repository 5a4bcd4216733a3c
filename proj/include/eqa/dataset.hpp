#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace eqa {

/// Labeled expression matrix, samples as rows. Labels are 0 (ALL) / 1 (AML);
/// AML is the positive class throughout.
struct ExpressionDataset {
    Eigen::MatrixXd values; // samples x features
    std::vector<std::string> feature_ids;
    std::vector<int> labels;
    std::vector<std::string> sample_ids;

    int n_samples() const { return static_cast<int>(values.rows()); }
    int n_features() const { return static_cast<int>(values.cols()); }

    /// Throws if shapes, label values, or feature-id uniqueness are violated.
    void validate() const;
};

enum class CsvFormat { golub_wide, tidy };

/// Loads an expression CSV.
///
/// golub_wide: genes as rows, a "Gene Accession Number" column carries the
/// feature id, per-sample value columns are interleaved with "call" columns
/// (dropped). Labels come from `labels_path`, a two-column CSV mapping sample
/// id to ALL/AML (or 0/1). The result is transposed to samples x features.
///
/// tidy: samples as rows, header = feature ids, final column = label.
ExpressionDataset load_expression_csv(const std::string& path, CsvFormat format,
                                      const std::string& labels_path = "");

/// Row-wise concatenation; feature id lists must match exactly.
ExpressionDataset concat_samples(const ExpressionDataset& a, const ExpressionDataset& b);

/// Writes samples x features + trailing label column (the tidy layout).
void write_tidy_csv(const ExpressionDataset& ds, const std::string& path);

/// Maps every row's empirical distribution to the mean distribution: rank k
/// receives the mean of all rows' k-th order statistics, ties receive the
/// average of their rank means.
Eigen::MatrixXd quantile_normalize(const Eigen::MatrixXd& values);

struct ScalingParams {
    Eigen::VectorXd per_feature_min;
    Eigen::VectorXd per_feature_max;
    double target_lo = 0.0;
    double target_hi = 0.0;
    std::vector<bool> degenerate; // min == max
};

ScalingParams fit_minmax(const Eigen::MatrixXd& train_values, double target_lo, double target_hi);

/// Linear map into [lo, hi], clamped; degenerate features map to the midpoint.
Eigen::MatrixXd apply_minmax(const Eigen::MatrixXd& values, const ScalingParams& params);

/// Index-level split/subsample primitives. The dataset-level operations wrap
/// these; the sweep uses them directly so it can audit which rows each stage
/// touched. Returned index lists are sorted ascending.
std::pair<std::vector<int>, std::vector<int>>
stratified_split_indices(const std::vector<int>& labels, double test_fraction, std::uint64_t seed);

std::vector<int> stratified_subsample_indices(const std::vector<int>& labels, int m,
                                              std::uint64_t seed);

ExpressionDataset take_rows(const ExpressionDataset& ds, const std::vector<int>& rows);

std::pair<ExpressionDataset, ExpressionDataset>
train_test_split(const ExpressionDataset& ds, double test_fraction, std::uint64_t seed);

ExpressionDataset stratified_subsample(const ExpressionDataset& ds, int m, std::uint64_t seed);

} // namespace eqa
