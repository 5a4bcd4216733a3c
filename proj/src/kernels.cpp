#include "eqa/kernels.hpp"

#include "eqa/csv.hpp"
#include "eqa/error.hpp"
#include "eqa/statevector.hpp"

#include <Eigen/Eigenvalues>

#include <complex>
#include <fstream>
#include <numeric>

namespace eqa {

std::string to_string(KernelKind kind) {
    switch (kind) {
    case KernelKind::quantum_zz: return "quantum_zz";
    case KernelKind::quantum_pauli_z: return "quantum_pauli_z";
    case KernelKind::linear: return "linear";
    }
    return "linear";
}

KernelKind kernel_kind_from_string(const std::string& s) {
    if (s == "quantum_zz") return KernelKind::quantum_zz;
    if (s == "quantum_pauli_z") return KernelKind::quantum_pauli_z;
    if (s == "linear") return KernelKind::linear;
    throw Error("unknown kernel kind '" + s + "'");
}

KernelKind kernel_kind_for_map(FeatureMapKind map) {
    return map == FeatureMapKind::zz ? KernelKind::quantum_zz : KernelKind::quantum_pauli_z;
}

namespace {

Circuit build_map(std::span<const double> x, FeatureMapKind map, int repetitions) {
    return map == FeatureMapKind::zz ? build_zz_feature_map(x, repetitions)
                                     : build_pauli_z_feature_map(x, repetitions);
}

std::vector<Statevector> simulate_rows(const Eigen::MatrixXd& a, FeatureMapKind map,
                                       int repetitions) {
    std::vector<Statevector> states;
    states.reserve(a.rows());
    std::vector<double> x(a.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) x[static_cast<std::size_t>(c)] = a(r, c);
        states.push_back(simulate(build_map(x, map, repetitions)));
    }
    return states;
}

std::vector<int> iota_ids(int n) {
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

} // namespace

double quantum_kernel_entry(std::span<const double> x, std::span<const double> y,
                            FeatureMapKind map, int repetitions) {
    if (x.size() != y.size()) throw Error("quantum_kernel_entry: vector lengths differ");
    const Statevector sx = simulate(build_map(x, map, repetitions));
    const Statevector sy = simulate(build_map(y, map, repetitions));
    return std::norm(inner_product(sy, sx));
}

KernelMatrix quantum_kernel_matrix(const Eigen::MatrixXd& a, FeatureMapKind map,
                                   int repetitions) {
    const auto states = simulate_rows(a, map, repetitions);
    const int m = static_cast<int>(states.size());
    KernelMatrix k;
    k.kind = kernel_kind_for_map(map);
    k.row_ids = iota_ids(m);
    k.col_ids = k.row_ids;
    k.values.resize(m, m);
    for (int i = 0; i < m; ++i) {
        k.values(i, i) = 1.0;
        for (int j = i + 1; j < m; ++j) {
            const double v = std::norm(inner_product(states[j], states[i]));
            k.values(i, j) = v;
            k.values(j, i) = v;
        }
    }
    return k;
}

KernelMatrix quantum_kernel_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                   FeatureMapKind map, int repetitions) {
    if (a.cols() != b.cols()) throw Error("quantum_kernel_matrix: feature counts differ");
    const auto sa = simulate_rows(a, map, repetitions);
    const auto sb = simulate_rows(b, map, repetitions);
    KernelMatrix k;
    k.kind = kernel_kind_for_map(map);
    k.row_ids = iota_ids(static_cast<int>(sa.size()));
    k.col_ids = iota_ids(static_cast<int>(sb.size()));
    k.values.resize(static_cast<int>(sa.size()), static_cast<int>(sb.size()));
    for (std::size_t i = 0; i < sa.size(); ++i) {
        for (std::size_t j = 0; j < sb.size(); ++j) {
            k.values(static_cast<int>(i), static_cast<int>(j)) =
                std::norm(inner_product(sb[j], sa[i]));
        }
    }
    return k;
}

KernelMatrix linear_kernel(const Eigen::MatrixXd& a) { return linear_kernel(a, a); }

KernelMatrix linear_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.cols() != b.cols()) throw Error("linear_kernel: feature counts differ");
    KernelMatrix k;
    k.kind = KernelKind::linear;
    k.row_ids = iota_ids(static_cast<int>(a.rows()));
    k.col_ids = iota_ids(static_cast<int>(b.rows()));
    k.values = a * b.transpose();
    return k;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw Error("min_eigenvalue: matrix not square");
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void write_kernel_csv(const KernelMatrix& k, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << to_string(k.kind);
    for (int id : k.col_ids) out << ',' << id;
    out << '\n';
    for (int i = 0; i < k.values.rows(); ++i) {
        out << k.row_ids[static_cast<std::size_t>(i)];
        for (int j = 0; j < k.values.cols(); ++j) {
            out << ',' << format_double(k.values(i, j));
        }
        out << '\n';
    }
}

KernelMatrix read_kernel_csv(const std::string& path) {
    const auto rows = read_csv(path);
    if (rows.size() < 2) throw Error("kernel CSV has no data rows: " + path);
    const auto& header = rows[0];
    KernelMatrix k;
    k.kind = kernel_kind_from_string(trim(header[0]));
    for (std::size_t c = 1; c < header.size(); ++c) {
        k.col_ids.push_back(std::stoi(trim(header[c])));
    }
    const int n_cols = static_cast<int>(k.col_ids.size());
    const int n_rows = static_cast<int>(rows.size()) - 1;
    k.values.resize(n_rows, n_cols);
    for (int r = 0; r < n_rows; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r) + 1];
        if (static_cast<int>(row.size()) != n_cols + 1) {
            throw Error("kernel CSV row " + std::to_string(r + 2) + " has wrong cell count");
        }
        k.row_ids.push_back(std::stoi(trim(row[0])));
        for (int c = 0; c < n_cols; ++c) {
            double v = 0.0;
            if (!parse_double(row[static_cast<std::size_t>(c) + 1], v)) {
                throw Error("kernel CSV: non-numeric cell at row " + std::to_string(r + 2));
            }
            k.values(r, c) = v;
        }
    }
    return k;
}

} // namespace eqa
