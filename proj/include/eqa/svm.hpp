#pragma once

#include "eqa/kernels.hpp"

#include <string>
#include <utility>
#include <vector>

namespace eqa {

/// Soft-margin dual solution over a precomputed kernel.
struct SvmModel {
    std::vector<double> alphas; // one per training sample, in [0, c]
    double bias = 0.0;
    std::vector<int> support_indices;
    std::vector<int> labels; // training labels in {-1, +1}
    double c = 1.0;
};

/// Optional per-iteration diagnostics from smo_train.
struct SmoTrace {
    std::vector<double> dual_objective; // monotone non-decreasing
    int iterations = 0;
    bool converged = false;
};

/// Sequential minimal optimization on the dual: repeatedly picks the maximal
/// KKT violator and a second-order partner, solves the two-variable
/// subproblem exactly, and stops when every violation is below `tol`.
/// Accepts labels in {-1,+1} or {0,1} (0 maps to -1). Requires a square PSD
/// kernel (minimum eigenvalue >= -1e-6) and both classes present.
SvmModel smo_train(const KernelMatrix& kernel, const std::vector<int>& labels, double c,
                   double tol = 1e-3, SmoTrace* trace = nullptr);

/// Decision function f(t) = sum_i alpha_i y_i K(t, i) + bias over a
/// test x train kernel block. Labels are sign(f) with ties going to +1.
std::pair<std::vector<int>, std::vector<double>> predict(const SvmModel& model,
                                                         const KernelMatrix& kernel_cross);

/// Dual objective sum(alpha) - 0.5 * alpha' Q alpha at the model's solution.
double dual_objective(const SvmModel& model, const KernelMatrix& kernel);

std::string model_to_json(const SvmModel& model);
SvmModel model_from_json(const std::string& text);

} // namespace eqa
