// Copyright 2026 The collspin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reference implementations used only by the tests. Nothing here calls the
// library code paths it is meant to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "collspin/spin_algebra.hpp"

namespace oracle {

using collspin::Complex;
using collspin::Index;
using collspin::Matrix;
using collspin::Vector;

inline Matrix random_hermitian(Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix a(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index k = 0; k < d; ++k) a(i, k) = Complex(g(rng), g(rng));
    return 0.5 * (a + a.adjoint());
}

/// Random full-rank density matrix G G^dag / tr.
inline Matrix random_density(Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix a(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index k = 0; k < d; ++k) a(i, k) = Complex(g(rng), g(rng));
    Matrix rho = a * a.adjoint();
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

/// Random pure state as a density matrix.
inline Matrix random_pure(Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vector v(d);
    for (Index i = 0; i < d; ++i) v(i) = Complex(g(rng), g(rng));
    v.normalize();
    return v * v.adjoint();
}

/// Dicke vector |j, j - k> embedded in the 2^N product space. Qubit q is bit
/// (N - 1 - q) of the index; bit value 1 means spin down.
inline Vector embed_dicke(int n, int k) {
    const Index dim = Index{1} << n;
    Vector v = Vector::Zero(dim);
    double count = 0.0;
    for (Index s = 0; s < dim; ++s) {
        int downs = 0;
        for (int b = 0; b < n; ++b) downs += static_cast<int>((s >> b) & 1);
        if (downs == k) {
            v(s) = 1.0;
            count += 1.0;
        }
    }
    return v / std::sqrt(count);
}

/// Embeds a Dicke-basis density matrix into the full 2^N space.
inline Matrix embed(const Matrix& rho) {
    const int n = static_cast<int>(rho.rows()) - 1;
    std::vector<Vector> basis;
    for (int k = 0; k <= n; ++k) basis.push_back(embed_dicke(n, k));
    const Index dim = Index{1} << n;
    Matrix full = Matrix::Zero(dim, dim);
    for (int r = 0; r <= n; ++r)
        for (int c = 0; c <= n; ++c) full += rho(r, c) * basis[r] * basis[c].adjoint();
    return full;
}

/// Reduced state of qubits 0 and 1 by explicit partial trace.
inline Eigen::Matrix4cd partial_trace_first_two(const Matrix& full, int n) {
    Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
    const Index rest = Index{1} << (n - 2);
    for (Index a = 0; a < 4; ++a)
        for (Index b = 0; b < 4; ++b)
            for (Index e = 0; e < rest; ++e) out(a, b) += full(a * rest + e, b * rest + e);
    return out;
}

/// Direct dense evaluation of -i[H, rho] + sum_k rate_k D[A_k] rho.
inline Matrix lindblad_rhs(const Matrix& h, const std::vector<std::pair<double, Matrix>>& jumps,
                           const Matrix& rho) {
    const Complex i{0.0, 1.0};
    Matrix out = -i * (h * rho - rho * h);
    for (const auto& [rate, a] : jumps) {
        const Matrix ada = a.adjoint() * a;
        out += rate * (2.0 * a * rho * a.adjoint() - ada * rho - rho * ada);
    }
    return out;
}

/// Wootters concurrence via the non-Hermitian product rho * rho_tilde.
inline double concurrence_direct(const Eigen::Matrix4cd& rho) {
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = yy(3, 0) = -1.0;
    yy(1, 2) = yy(2, 1) = 1.0;
    const Eigen::Matrix4cd prod = rho * yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(prod);
    std::vector<double> l;
    for (int k = 0; k < 4; ++k) l.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(k).real())));
    std::sort(l.begin(), l.end(), std::greater<>());
    return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

}  // namespace oracle
