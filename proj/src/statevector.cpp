#include "eqa/statevector.hpp"

#include "eqa/error.hpp"

#include <cmath>
#include <numbers>

namespace eqa {

namespace {

constexpr int kMaxQubits = 24;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

void apply_h(std::vector<std::complex<double>>& amp, int q) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t size = amp.size();
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const auto a0 = amp[i];
            const auto a1 = amp[i + stride];
            amp[i] = (a0 + a1) * kInvSqrt2;
            amp[i + stride] = (a0 - a1) * kInvSqrt2;
        }
    }
}

void apply_p(std::vector<std::complex<double>>& amp, int q, double theta) {
    const std::complex<double> phase(std::cos(theta), std::sin(theta));
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t size = amp.size();
    for (std::size_t base = stride; base < size; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            amp[i] *= phase;
        }
    }
}

void apply_cx(std::vector<std::complex<double>>& amp, int control, int target) {
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    const std::size_t size = amp.size();
    for (std::size_t i = 0; i < size; ++i) {
        if ((i & cmask) && !(i & tmask)) {
            std::swap(amp[i], amp[i | tmask]);
        }
    }
}

} // namespace

double Statevector::norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
}

Statevector simulate(const Circuit& c) {
    if (c.n_qubits < 1) throw Error("simulate: circuit has no qubits");
    if (c.n_qubits > kMaxQubits) {
        throw Error("simulate: " + std::to_string(c.n_qubits) + " qubits exceeds the " +
                    std::to_string(kMaxQubits) + "-qubit memory guard");
    }
    Statevector sv;
    sv.n_qubits = c.n_qubits;
    sv.amplitudes.assign(std::size_t{1} << c.n_qubits, {0.0, 0.0});
    sv.amplitudes[0] = {1.0, 0.0};
    for (const Gate& g : c.gates) {
        if (g.q0 < 0 || g.q0 >= c.n_qubits ||
            (g.kind == GateKind::CX && (g.q1 < 0 || g.q1 >= c.n_qubits || g.q1 == g.q0))) {
            throw Error("simulate: gate qubit index out of range");
        }
        switch (g.kind) {
        case GateKind::H: apply_h(sv.amplitudes, g.q0); break;
        case GateKind::P: apply_p(sv.amplitudes, g.q0, g.theta); break;
        case GateKind::CX: apply_cx(sv.amplitudes, g.q0, g.q1); break;
        }
    }
    return sv;
}

std::complex<double> inner_product(const Statevector& a, const Statevector& b) {
    if (a.amplitudes.size() != b.amplitudes.size()) {
        throw Error("inner_product: statevector sizes differ");
    }
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    }
    return acc;
}

} // namespace eqa
