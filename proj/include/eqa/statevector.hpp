#pragma once

#include "eqa/circuit.hpp"

#include <complex>
#include <vector>

namespace eqa {

struct Statevector {
    std::vector<std::complex<double>> amplitudes; // length 2^n, qubit q = bit q
    int n_qubits = 0;

    double norm() const;
};

/// Applies the circuit to |0...0>. Exact dense simulation: H and P update
/// amplitude pairs with stride 2^q, CX permutes indices. Qubit counts above
/// 24 are refused (the buffer would exceed 256 MiB).
Statevector simulate(const Circuit& c);

/// <a|b>.
std::complex<double> inner_product(const Statevector& a, const Statevector& b);

} // namespace eqa
