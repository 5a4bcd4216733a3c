#pragma once

#include <span>
#include <string>
#include <vector>

namespace eqa {

enum class GateKind { H, P, CX };

struct Gate {
    GateKind kind;
    int q0;             // target (H, P) or control (CX)
    int q1 = -1;        // CX target
    double theta = 0.0; // P only, radians
};

enum class FeatureMapKind { zz, pauli_z };

std::string to_string(FeatureMapKind kind);
FeatureMapKind feature_map_from_string(const std::string& s);

struct Circuit {
    int n_qubits = 0;
    int repetitions = 1;
    FeatureMapKind map_kind = FeatureMapKind::zz;
    std::vector<Gate> gates;
};

/// Second-order map with linear entanglement. Per repetition: H on every
/// qubit, P(2*x_k) on every qubit, then for each adjacent pair (i, i+1)
/// the two-qubit phase block CX, P(2*(pi-x_i)*(pi-x_j)) on i+1, CX.
Circuit build_zz_feature_map(std::span<const double> x, int repetitions);

/// First-order map, no entanglement: H then P(2*x_k) on every qubit,
/// repeated.
Circuit build_pauli_z_feature_map(std::span<const double> x, int repetitions);

/// As-soon-as-possible layering; every gate occupies one layer on its qubits.
int circuit_depth(const Circuit& c);

struct ResourceEstimate {
    FeatureMapKind map_kind = FeatureMapKind::zz;
    int n_qubits = 0;
    int repetitions = 0;
    int depth = 0;
    int closed_form_depth = 0; // zz: 5r (n=2), (3n-1)+8(r-1) (n>=3); pauli_z: 2r
    int h_count = 0;
    int p_count = 0;
    int cx_count = 0;
};

/// Builds the map with placeholder angles and measures depth and exact
/// per-kind gate counts.
ResourceEstimate estimate_resources(FeatureMapKind kind, int n_qubits, int repetitions);

std::string resource_estimate_json(const ResourceEstimate& est);

/// One-gate-per-line rendering for debugging.
std::string to_text(const Circuit& c);

} // namespace eqa
