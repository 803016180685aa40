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

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace collspin {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Collective angular momentum in the symmetric (j = N/2) sector.
//
// Basis ordering is m = +j, +j-1, ..., -j: row 0 is the "all spins up" Dicke
// state. Units: hbar = 1.
// ---------------------------------------------------------------------------

struct DickeOperatorSet {
    int n = 0;       ///< atom count N
    double j = 0.0;  ///< N / 2
    Matrix jx, jy, jz, jplus, jminus;

    Index dim() const noexcept { return static_cast<Index>(n) + 1; }
};

/// Dense J_x, J_y, J_z, J_+, J_- for N atoms. Throws InvalidParameter for n < 1.
DickeOperatorSet build_operators(int n);

/// Row index of |j, m> in the m = +j ... -j ordering.
Index dicke_index(int n, double m);

/// Unit vector |j, m>.
Vector dicke_state(int n, double m);

/// Spin coherent state pointing along (sin t cos p, sin t sin p, cos t),
/// with t measured from the m = +j pole.
Vector spin_coherent_state(int n, double theta, double phi);

/// |<j,m|theta,phi>| for every row, evaluated with log-binomials so that
/// large N neither overflows nor underflows prematurely.
Eigen::VectorXd coherent_magnitudes(int n, double theta);

/// Hermitian, unit-trace, positive-semidefinite matrix over the Dicke basis.
/// Construction validates all three properties and throws InvalidState.
class DensityMatrix {
public:
    static constexpr double kHermitianTol = 1e-10;
    static constexpr double kTraceTol = 1e-10;
    static constexpr double kPositivityTol = 1e-8;

    explicit DensityMatrix(Matrix entries);

    static DensityMatrix pure(const Vector& psi);
    static DensityMatrix maximally_mixed(Index dim);

    const Matrix& matrix() const noexcept { return entries_; }
    Index dim() const noexcept { return entries_.rows(); }
    /// N = dim - 1 for a Dicke-sector state.
    int atom_count() const noexcept { return static_cast<int>(entries_.rows()) - 1; }

private:
    Matrix entries_;
};

/// trace(op * rho). Throws ShapeError on dimension mismatch.
Complex expectation(const Matrix& op, const DensityMatrix& rho);

/// First and second collective moments of a state.
struct MomentSet {
    int n = 0;
    std::array<double, 3> first{};  ///< <J_x>, <J_y>, <J_z>
    /// Symmetrized second moments <(J_a J_b + J_b J_a) / 2>, a,b in {x,y,z}.
    Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
    Complex jplus{};         ///< <J_+>
    Complex jplus_sq{};      ///< <J_+^2>
    Complex jplus_jminus{};  ///< <J_+ J_->
    Complex jz_jminus{};     ///< <J_z J_->

    double j() const noexcept { return 0.5 * n; }
};

/// Throws ShapeError when rho and ops have different dimensions.
MomentSet moments(const DensityMatrix& rho, const DickeOperatorSet& ops);

/// 1/2 * || a - b ||_1 for Hermitian a, b.
double trace_distance(const Matrix& a, const Matrix& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// <psi| rho |psi> for normalized psi.
double fidelity(const DensityMatrix& rho, const Vector& psi);

/// max_ij |m_ij - conj(m_ji)|.
double hermiticity_error(const Matrix& m);

}  // namespace collspin
