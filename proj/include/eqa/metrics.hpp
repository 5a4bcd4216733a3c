#pragma once

#include "eqa/kernels.hpp"

#include <Eigen/Core>
#include <string>
#include <tuple>
#include <vector>

namespace eqa {

/// 2*TP / (2*TP + FP + FN); 0 when the denominator vanishes.
double f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred, int positive);

/// (TPR + TNR) / 2. The larger of the two label values in y_true is treated
/// as the positive class; y_true must contain exactly two distinct values.
double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

/// g = sqrt(||sqrt(K_Q) (K_C + reg*I)^-1 sqrt(K_Q)||_spectral). Both inputs
/// are symmetrized and trace-normalized to trace(K) = m first; sqrt(K_Q) via
/// eigendecomposition with negative eigenvalues clamped to zero.
double geometric_difference(const KernelMatrix& k_classical, const KernelMatrix& k_quantum,
                            double reg = 1e-7);

/// Metric values over the (feature count x sample count) configuration grid.
struct MetricSurface {
    std::vector<int> feature_axis;
    std::vector<int> sample_axis;
    Eigen::MatrixXd values; // rows follow feature_axis, cols follow sample_axis
    std::string metric_name;
    std::string kernel_name;
};

/// Terrain ruggedness: TRI(i,j) = sqrt(sum over existing 8-neighbors of
/// (v_nb - v_ij)^2). Edge and corner cells use only the neighbors they have.
/// Grids smaller than 2x2 are rejected.
MetricSurface tri_surface(const MetricSurface& surface);

/// (TRI_classical, TRI_quantum, TRI_quantum - TRI_classical).
std::tuple<MetricSurface, MetricSurface, MetricSurface>
ptri_comparison(const MetricSurface& classical, const MetricSurface& quantum);

/// Tidy CSV: header "feature_count,sample_count,value", one row per cell.
void write_surface_csv(const MetricSurface& surface, const std::string& path);
MetricSurface read_surface_csv(const std::string& path);

} // namespace eqa
