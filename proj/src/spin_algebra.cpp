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

#include "collspin/spin_algebra.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "collspin/errors.hpp"

namespace collspin {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_same_dim(Index a, Index b, const char* where) {
    if (a != b) {
        throw ShapeError(std::string(where) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
    }
}

// Tr(a * b) without forming the product.
Complex trace_of_product(const Matrix& a, const Matrix& b) {
    return (a.transpose().array() * b.array()).sum();
}

}  // namespace

DickeOperatorSet build_operators(int n) {
    if (n < 1) {
        throw InvalidParameter("build_operators: atom count must be >= 1, got " + std::to_string(n));
    }
    DickeOperatorSet ops;
    ops.n = n;
    ops.j = 0.5 * n;
    const Index d = ops.dim();
    const double j = ops.j;

    ops.jz = Matrix::Zero(d, d);
    ops.jplus = Matrix::Zero(d, d);
    for (Index row = 0; row < d; ++row) {
        const double m = j - static_cast<double>(row);
        ops.jz(row, row) = m;
        if (row > 0) {
            // J_+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits one row up.
            ops.jplus(row - 1, row) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
        }
    }
    ops.jminus = ops.jplus.adjoint();
    ops.jx = 0.5 * (ops.jplus + ops.jminus);
    ops.jy = -0.5 * kI * (ops.jplus - ops.jminus);
    return ops;
}

Index dicke_index(int n, double m) {
    const double j = 0.5 * n;
    const double row = j - m;
    const double rounded = std::round(row);
    if (n < 1 || std::abs(row - rounded) > 1e-9 || rounded < 0 || rounded > n) {
        throw InvalidParameter("dicke_index: m = " + std::to_string(m) + " is not in the j = " +
                               std::to_string(j) + " multiplet");
    }
    return static_cast<Index>(rounded);
}

Vector dicke_state(int n, double m) {
    Vector v = Vector::Zero(static_cast<Index>(n) + 1);
    v(dicke_index(n, m)) = 1.0;
    return v;
}

Eigen::VectorXd coherent_magnitudes(int n, double theta) {
    if (n < 1) {
        throw InvalidParameter("coherent_magnitudes: atom count must be >= 1");
    }
    const double c = std::abs(std::cos(0.5 * theta));
    const double s = std::abs(std::sin(0.5 * theta));
    const double log_c = std::log(c);
    const double log_s = std::log(s);
    const double log_nfact = std::lgamma(n + 1.0);
    Eigen::VectorXd out(n + 1);
    for (int row = 0; row <= n; ++row) {
        const int ups = n - row;
        const int downs = row;
        // 0 * log(0) terms are exactly zero contributions (0^0 = 1).
        double log_mag = 0.5 * (log_nfact - std::lgamma(ups + 1.0) - std::lgamma(downs + 1.0));
        if (ups > 0) log_mag += ups * log_c;
        if (downs > 0) log_mag += downs * log_s;
        out(row) = std::exp(log_mag);
    }
    return out;
}

Vector spin_coherent_state(int n, double theta, double phi) {
    const Eigen::VectorXd mag = coherent_magnitudes(n, theta);
    Vector psi(n + 1);
    for (int row = 0; row <= n; ++row) {
        // Relative phase e^{i phi} per flipped spin: product of
        // cos(t/2)|up> + e^{i phi} sin(t/2)|down>.
        psi(row) = mag(row) * std::exp(kI * (static_cast<double>(row) * phi));
    }
    return psi;
}

double hermiticity_error(const Matrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw InvalidState("DensityMatrix: matrix must be square and non-empty");
    }
    if (!entries_.allFinite()) {
        throw InvalidState("DensityMatrix: non-finite entries");
    }
    const double herm = hermiticity_error(entries_);
    if (herm > kHermitianTol) {
        throw InvalidState("DensityMatrix: not Hermitian (max |rho - rho^dag| = " +
                           std::to_string(herm) + ")");
    }
    const Complex tr = entries_.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        throw InvalidState("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
    }
    const Matrix herm_part = 0.5 * (entries_ + entries_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm_part, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -kPositivityTol) {
        throw InvalidState("DensityMatrix: negative eigenvalue " + std::to_string(min_eig));
    }
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0)) {
        throw InvalidState("DensityMatrix::pure: zero vector");
    }
    const Vector unit = psi / norm;
    return DensityMatrix(unit * unit.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
    if (dim < 1) {
        throw InvalidParameter("DensityMatrix::maximally_mixed: dim must be >= 1");
    }
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

Complex expectation(const Matrix& op, const DensityMatrix& rho) {
    require_same_dim(op.rows(), rho.dim(), "expectation");
    require_same_dim(op.cols(), rho.dim(), "expectation");
    return trace_of_product(op, rho.matrix());
}

MomentSet moments(const DensityMatrix& rho, const DickeOperatorSet& ops) {
    require_same_dim(rho.dim(), ops.dim(), "moments");
    const Matrix& r = rho.matrix();
    const std::array<const Matrix*, 3> j{&ops.jx, &ops.jy, &ops.jz};

    MomentSet out;
    out.n = ops.n;
    for (int a = 0; a < 3; ++a) {
        out.first[a] = trace_of_product(*j[a], r).real();
    }
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            const Matrix prod = (*j[a]) * (*j[b]);
            // <(AB + BA)/2> = Re <AB> for Hermitian A, B.
            const double v = trace_of_product(prod, r).real();
            out.second(a, b) = v;
            out.second(b, a) = v;
        }
    }
    out.jplus = trace_of_product(ops.jplus, r);
    out.jplus_sq = trace_of_product(ops.jplus * ops.jplus, r);
    out.jplus_jminus = trace_of_product(ops.jplus * ops.jminus, r);
    out.jz_jminus = trace_of_product(ops.jz * ops.jminus, r);
    return out;
}

double trace_distance(const Matrix& a, const Matrix& b) {
    require_same_dim(a.rows(), b.rows(), "trace_distance");
    const Matrix diff = a - b;
    const Matrix herm = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    return trace_distance(a.matrix(), b.matrix());
}

double fidelity(const DensityMatrix& rho, const Vector& psi) {
    require_same_dim(rho.dim(), psi.size(), "fidelity");
    return (psi.adjoint() * rho.matrix() * psi)(0, 0).real();
}

}  // namespace collspin
