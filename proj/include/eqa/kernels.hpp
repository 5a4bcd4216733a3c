#pragma once

#include "eqa/circuit.hpp"

#include <Eigen/Core>
#include <span>
#include <string>
#include <vector>

namespace eqa {

enum class KernelKind { quantum_zz, quantum_pauli_z, linear };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& s);
KernelKind kernel_kind_for_map(FeatureMapKind map);

/// Gram matrix plus the sample ids its rows/columns refer to. Square single-
/// set matrices are symmetric with unit diagonal (quantum kinds) and PSD.
struct KernelMatrix {
    Eigen::MatrixXd values;
    KernelKind kind = KernelKind::linear;
    std::vector<int> row_ids;
    std::vector<int> col_ids;
};

/// Fidelity kernel |<Phi(y)|Phi(x)>|^2 from exact statevectors.
double quantum_kernel_entry(std::span<const double> x, std::span<const double> y,
                            FeatureMapKind map, int repetitions);

/// Square Gram over one sample set: each row's statevector is simulated once,
/// the upper triangle is computed and mirrored, the diagonal is exactly 1.
KernelMatrix quantum_kernel_matrix(const Eigen::MatrixXd& a, FeatureMapKind map, int repetitions);

/// Cross Gram (rows of `a` against rows of `b`).
KernelMatrix quantum_kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                   FeatureMapKind map, int repetitions);

KernelMatrix linear_kernel(const Eigen::MatrixXd& a);
KernelMatrix linear_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Smallest eigenvalue of the symmetrized matrix (PSD checks).
double min_eigenvalue(const Eigen::MatrixXd& m);

/// CSV round trip. The top-left header cell carries the kernel kind, the rest
/// of the header the column ids; each row starts with its row id.
void write_kernel_csv(const KernelMatrix& k, const std::string& path);
KernelMatrix read_kernel_csv(const std::string& path);

} // namespace eqa
