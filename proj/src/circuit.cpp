#include "eqa/circuit.hpp"

#include "eqa/csv.hpp"
#include "eqa/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace eqa {

std::string to_string(FeatureMapKind kind) {
    return kind == FeatureMapKind::zz ? "zz" : "pauli_z";
}

FeatureMapKind feature_map_from_string(const std::string& s) {
    if (s == "zz") return FeatureMapKind::zz;
    if (s == "pauli_z") return FeatureMapKind::pauli_z;
    throw Error("unknown feature map '" + s + "' (expected zz or pauli_z)");
}

namespace {

void check_angles(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) throw Error("feature map: non-finite angle");
    }
}

void append_zz_repetition(Circuit& c, std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    constexpr double pi = std::numbers::pi;
    for (int q = 0; q < n; ++q) c.gates.push_back({GateKind::H, q});
    for (int q = 0; q < n; ++q) c.gates.push_back({GateKind::P, q, -1, 2.0 * x[q]});
    for (int q = 0; q + 1 < n; ++q) {
        const double pair_angle = (pi - x[q]) * (pi - x[q + 1]);
        c.gates.push_back({GateKind::CX, q, q + 1});
        c.gates.push_back({GateKind::P, q + 1, -1, 2.0 * pair_angle});
        c.gates.push_back({GateKind::CX, q, q + 1});
    }
}

} // namespace

Circuit build_zz_feature_map(std::span<const double> x, int repetitions) {
    const int n = static_cast<int>(x.size());
    if (n < 2) throw Error("zz feature map needs at least 2 qubits (no entangling pair)");
    if (repetitions < 1) throw Error("feature map: repetitions must be >= 1");
    check_angles(x);
    Circuit c;
    c.n_qubits = n;
    c.repetitions = repetitions;
    c.map_kind = FeatureMapKind::zz;
    c.gates.reserve(static_cast<std::size_t>(repetitions) * (4 * n - 2));
    for (int r = 0; r < repetitions; ++r) append_zz_repetition(c, x);
    return c;
}

Circuit build_pauli_z_feature_map(std::span<const double> x, int repetitions) {
    const int n = static_cast<int>(x.size());
    if (n < 1) throw Error("pauli_z feature map needs at least 1 qubit");
    if (repetitions < 1) throw Error("feature map: repetitions must be >= 1");
    check_angles(x);
    Circuit c;
    c.n_qubits = n;
    c.repetitions = repetitions;
    c.map_kind = FeatureMapKind::pauli_z;
    c.gates.reserve(static_cast<std::size_t>(repetitions) * 2 * n);
    for (int r = 0; r < repetitions; ++r) {
        for (int q = 0; q < n; ++q) c.gates.push_back({GateKind::H, q});
        for (int q = 0; q < n; ++q) c.gates.push_back({GateKind::P, q, -1, 2.0 * x[q]});
    }
    return c;
}

int circuit_depth(const Circuit& c) {
    std::vector<int> finish(c.n_qubits, 0);
    int depth = 0;
    for (const Gate& g : c.gates) {
        int layer = finish[g.q0] + 1;
        if (g.kind == GateKind::CX) layer = std::max(layer, finish[g.q1] + 1);
        finish[g.q0] = layer;
        if (g.kind == GateKind::CX) finish[g.q1] = layer;
        depth = std::max(depth, layer);
    }
    return depth;
}

ResourceEstimate estimate_resources(FeatureMapKind kind, int n_qubits, int repetitions) {
    std::vector<double> dummy(static_cast<std::size_t>(n_qubits), std::numbers::pi / 2.0);
    Circuit c = kind == FeatureMapKind::zz ? build_zz_feature_map(dummy, repetitions)
                                           : build_pauli_z_feature_map(dummy, repetitions);
    ResourceEstimate est;
    est.map_kind = kind;
    est.n_qubits = n_qubits;
    est.repetitions = repetitions;
    est.depth = circuit_depth(c);
    for (const Gate& g : c.gates) {
        switch (g.kind) {
        case GateKind::H: ++est.h_count; break;
        case GateKind::P: ++est.p_count; break;
        case GateKind::CX: ++est.cx_count; break;
        }
    }
    if (kind == FeatureMapKind::zz) {
        est.closed_form_depth = n_qubits == 2 ? 5 * repetitions
                                              : (3 * n_qubits - 1) + 8 * (repetitions - 1);
    } else {
        est.closed_form_depth = 2 * repetitions;
    }
    return est;
}

std::string resource_estimate_json(const ResourceEstimate& est) {
    nlohmann::json j;
    j["map"] = to_string(est.map_kind);
    j["n_qubits"] = est.n_qubits;
    j["repetitions"] = est.repetitions;
    j["depth"] = est.depth;
    j["closed_form_depth"] = est.closed_form_depth;
    j["h_count"] = est.h_count;
    j["p_count"] = est.p_count;
    j["cx_count"] = est.cx_count;
    return j.dump(2);
}

std::string to_text(const Circuit& c) {
    std::ostringstream out;
    out << to_string(c.map_kind) << " n=" << c.n_qubits << " reps=" << c.repetitions << "\n";
    for (const Gate& g : c.gates) {
        switch (g.kind) {
        case GateKind::H: out << "H q" << g.q0 << "\n"; break;
        case GateKind::P: out << "P(" << format_double(g.theta) << ") q" << g.q0 << "\n"; break;
        case GateKind::CX: out << "CX q" << g.q0 << " -> q" << g.q1 << "\n"; break;
        }
    }
    return out.str();
}

} // namespace eqa
