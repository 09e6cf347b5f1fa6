#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "cqed/noise_channels.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = std::vector<cd>;  // row-major dim x dim

/// Single-qubit Pauli index: 0 I, 1 X, 2 Y, 3 Z.
inline cd pauli_entry(int p, int row, int col) {
    switch (p) {
        case 0: return row == col ? 1.0 : 0.0;
        case 1: return row != col ? 1.0 : 0.0;
        case 2: return row == col ? cd(0) : (row == 0 ? cd(0, -1) : cd(0, 1));
        default: return row == col ? (row == 0 ? 1.0 : -1.0) : 0.0;
    }
}

/// Dense n-qubit Pauli from base-4 digits (qubit i = digit i = bit i of the basis index).
inline Mat pauli_matrix(std::uint32_t code, int n) {
    const std::uint32_t dim = 1u << n;
    Mat m(dim * dim);
    for (std::uint32_t r = 0; r < dim; ++r) {
        for (std::uint32_t c = 0; c < dim; ++c) {
            cd v = 1.0;
            std::uint32_t k = code;
            for (int q = 0; q < n && v != cd(0); ++q, k >>= 2) v *= pauli_entry(k & 3, r >> q & 1, c >> q & 1);
            m[r * dim + c] = v;
        }
    }
    return m;
}

/// Pauli-channel probabilities of a Schur-multiplier channel E(rho) = N o rho,
/// obtained from the Pauli-transfer-matrix diagonal over all 4^n Paulis.
/// Result indexed by base-4 Pauli code.
inline std::vector<double> dense_twirl(const std::vector<double>& n_mat, int n) {
    const std::uint32_t dim = 1u << n, np = 1u << (2 * n);
    std::vector<Mat> paulis(np);
    for (std::uint32_t p = 0; p < np; ++p) paulis[p] = pauli_matrix(p, n);
    std::vector<double> r(np);
    for (std::uint32_t p = 0; p < np; ++p) {
        cd tr = 0;
        for (std::uint32_t a = 0; a < dim; ++a) {
            for (std::uint32_t b = 0; b < dim; ++b) tr += paulis[p][a * dim + b] * n_mat[b * dim + a] * paulis[p][b * dim + a];
        }
        r[p] = tr.real() / dim;
    }
    auto commutes = [&](std::uint32_t a, std::uint32_t b) {
        int anti = 0;
        for (int q = 0; q < n; ++q) {
            const int x = a >> (2 * q) & 3, y = b >> (2 * q) & 3;
            if (x && y && x != y) anti ^= 1;
        }
        return anti == 0;
    };
    std::vector<double> prob(np);
    for (std::uint32_t qq = 0; qq < np; ++qq) {
        double s = 0;
        for (std::uint32_t p = 0; p < np; ++p) s += commutes(p, qq) ? r[p] : -r[p];
        prob[qq] = s / np;
    }
    return prob;
}

/// Base-4 code of the Z-string with the given bit mask.
inline std::uint32_t z_code(std::uint32_t mask, int n) {
    std::uint32_t code = 0;
    for (int q = 0; q < n; ++q) {
        if (mask >> q & 1) code |= 3u << (2 * q);
    }
    return code;
}

/// Minimum total cost over all pairings where each element pairs with another
/// or with the boundary.
inline double brute_force_matching(int m, const std::function<double(int, int)>& cost,
                                   const std::function<double(int)>& boundary) {
    std::vector<char> used(m, 0);
    std::function<double()> rec = [&]() -> double {
        int i = 0;
        while (i < m && used[i]) ++i;
        if (i == m) return 0.0;
        used[i] = 1;
        double best = boundary(i) + rec();
        for (int j = i + 1; j < m; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            best = std::min(best, cost(i, j) + rec());
            used[j] = 0;
        }
        used[i] = 0;
        return best;
    };
    return rec();
}

}  // namespace oracle
