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

#include "collspin/liouvillian.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "collspin/errors.hpp"

namespace collspin {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw InvalidParameter(std::string(name) + " must be finite");
    }
}

void require_rate(double v, const char* name) {
    require_finite(v, name);
    if (v < 0.0) {
        throw InvalidParameter(std::string(name) + " must be >= 0, got " + std::to_string(v));
    }
}

void require_atoms(int n) {
    if (n < 1) {
        throw InvalidParameter("atom count must be >= 1, got " + std::to_string(n));
    }
}

void require_matching_ops(int n, const DickeOperatorSet& ops, const char* where) {
    if (n != ops.n) {
        throw ShapeError(std::string(where) + ": parameters are for N = " + std::to_string(n) +
                         " but operators are for N = " + std::to_string(ops.n));
    }
}

SparseMatrix to_sparse(const Matrix& m) {
    return m.sparseView(1.0, kSparseDropTolerance);
}

SparseMatrix sparse_identity(Index d) {
    SparseMatrix id(d, d);
    id.setIdentity();
    return id;
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out = Eigen::kroneckerProduct(a, b);
    return out;
}

void finalize(SparseMatrix& m) {
    m.prune([](Index, Index, const Complex& v) { return std::abs(v) > kSparseDropTolerance; });
    m.makeCompressed();
}

}  // namespace

void CrfParams::validate() const {
    require_rate(omega, "omega");
    require_rate(gamma, "gamma");
    require_atoms(n);
}

void LmgParams::validate() const {
    require_finite(h, "h");
    require_finite(lambda, "lambda");
    require_rate(gamma_a, "gamma_a");
    require_rate(gamma_b, "gamma_b");
    require_atoms(n);
}

const char* to_string(Model m) noexcept {
    switch (m) {
        case Model::crf: return "crf";
        case Model::lmg: return "lmg";
    }
    return "?";
}

namespace superop {

SparseMatrix commutator(const Matrix& h) {
    const Index d = h.rows();
    const SparseMatrix id = sparse_identity(d);
    const SparseMatrix hs = to_sparse(h);
    const SparseMatrix ht = to_sparse(h.transpose());
    SparseMatrix out = kron(id, hs) - kron(ht, id);
    out *= -kI;
    return out;
}

SparseMatrix dissipator(const Matrix& a) {
    const Index d = a.rows();
    const SparseMatrix id = sparse_identity(d);
    const Matrix ada = a.adjoint() * a;
    SparseMatrix out = 2.0 * kron(to_sparse(a.conjugate()), to_sparse(a));
    out -= kron(id, to_sparse(ada));
    out -= kron(to_sparse(ada.transpose()), id);
    return out;
}

}  // namespace superop

Liouvillian build_crf(const CrfParams& params, const DickeOperatorSet& ops) {
    params.validate();
    require_matching_ops(params.n, ops, "build_crf");

    SparseMatrix l = superop::commutator(params.omega * ops.jx);
    if (params.gamma != 0.0) {
        l += (params.gamma / params.n) * superop::dissipator(ops.jminus);
    }
    finalize(l);
    return Liouvillian{Model::crf, params.n, params, std::move(l)};
}

Matrix lmg_hamiltonian(const LmgParams& params, const DickeOperatorSet& ops) {
    require_matching_ops(params.n, ops, "lmg_hamiltonian");
    return -2.0 * params.h * ops.jz - (2.0 * params.lambda / params.n) * (ops.jx * ops.jx);
}

Liouvillian build_lmg(const LmgParams& params, const DickeOperatorSet& ops) {
    params.validate();
    require_matching_ops(params.n, ops, "build_lmg");

    SparseMatrix l = superop::commutator(lmg_hamiltonian(params, ops));
    if (params.gamma_a != 0.0) {
        const Matrix two_jx = 2.0 * ops.jx;
        l += (params.gamma_a / params.n) * superop::dissipator(two_jx);
    }
    if (params.gamma_b != 0.0) {
        l += (params.gamma_b / params.n) * superop::dissipator(ops.jplus);
    }
    finalize(l);
    return Liouvillian{Model::lmg, params.n, params, std::move(l)};
}

Matrix apply(const Liouvillian& l, const Matrix& rho) {
    const Index d = l.hilbert_dim();
    if (rho.rows() != d || rho.cols() != d) {
        throw ShapeError("apply: state is " + std::to_string(rho.rows()) + "x" +
                         std::to_string(rho.cols()) + ", Liouvillian acts on " +
                         std::to_string(d) + "x" + std::to_string(d));
    }
    const Eigen::Map<const Vector> v(rho.data(), d * d);
    const Vector out = l.matrix * v;
    return Eigen::Map<const Matrix>(out.data(), d, d);
}

Matrix apply(const Liouvillian& l, const DensityMatrix& rho) {
    return apply(l, rho.matrix());
}

}  // namespace collspin
