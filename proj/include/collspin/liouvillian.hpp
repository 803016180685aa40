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

#pragma once

#include <variant>

#include <Eigen/Sparse>

#include "collspin/spin_algebra.hpp"

namespace collspin {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Cooperative resonance fluorescence:
///   drho/dt = -i[omega J_x, rho] + (gamma/N) D[J_-] rho
struct CrfParams {
    double omega = 0.0;
    double gamma = 0.0;
    int n = 1;

    void validate() const;
};

/// Dissipative LMG model:
///   drho/dt = -i[H, rho] + (gamma_a/N) D[2 J_x] rho + (gamma_b/N) D[J_+] rho
///   H = -2 h J_z - (2 lambda / N) J_x^2
struct LmgParams {
    double h = 0.0;
    double lambda = 0.0;
    double gamma_a = 0.0;
    double gamma_b = 0.0;
    int n = 1;

    void validate() const;
};

enum class Model { crf, lmg };

const char* to_string(Model m) noexcept;

/// Superoperator on column-stacked density matrices, vec(rho)[i + d*j] = rho(i, j).
struct Liouvillian {
    Model model = Model::crf;
    int n = 0;
    std::variant<CrfParams, LmgParams> params;
    SparseMatrix matrix;

    Index dim() const noexcept { return matrix.rows(); }
    Index hilbert_dim() const noexcept { return static_cast<Index>(n) + 1; }
};

/// Entries with magnitude at or below this are dropped after assembly.
inline constexpr double kSparseDropTolerance = 1e-14;

Liouvillian build_crf(const CrfParams& params, const DickeOperatorSet& ops);
Liouvillian build_lmg(const LmgParams& params, const DickeOperatorSet& ops);

/// H_LMG = -2 h J_z - (2 lambda / N) J_x^2.
Matrix lmg_hamiltonian(const LmgParams& params, const DickeOperatorSet& ops);

/// unvec(L vec(rho)).
Matrix apply(const Liouvillian& l, const Matrix& rho);
Matrix apply(const Liouvillian& l, const DensityMatrix& rho);

/// Building blocks, exposed for tests and for assembling other models.
namespace superop {

/// -i (I (x) H - H^T (x) I): vec(-i[H, rho]).
SparseMatrix commutator(const Matrix& h);
/// vec(D[A] rho) with D[A] rho = 2 A rho A^dag - A^dag A rho - rho A^dag A.
SparseMatrix dissipator(const Matrix& a);

}  // namespace superop

}  // namespace collspin
