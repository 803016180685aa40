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

#include <vector>

#include <Eigen/Dense>

#include "collspin/liouvillian.hpp"
#include "collspin/spin_algebra.hpp"

namespace collspin {

/// Two-spin state in the product basis (uu, ud, du, dd).
class PairState {
public:
    static constexpr double kTol = 1e-10;
    static constexpr double kPositivityTol = 1e-8;

    /// Throws InvalidState unless the matrix is Hermitian, unit-trace,
    /// exchange-symmetric and positive semidefinite.
    explicit PairState(const Eigen::Matrix4cd& entries);

    const Eigen::Matrix4cd& matrix() const noexcept { return entries_; }

private:
    Eigen::Matrix4cd entries_;
};

/// Reduced state of any two spins of a symmetric N-spin state, assembled from
/// collective moments. Throws InvalidParameter for N < 2 and
/// InconsistentMoments when the result is not a valid PairState.
PairState pair_rdm(const MomentSet& m);

/// Wootters concurrence in [0, 1].
double concurrence(const PairState& p);
/// Validates first; throws InvalidState for unphysical input.
double concurrence(const Eigen::Matrix4cd& rho);

/// (N - 1) C of the two-spin reduced state.
double rescaled_concurrence(const DensityMatrix& rho, const DickeOperatorSet& ops);
double rescaled_concurrence(const MomentSet& m);

/// 1 - (4/N) Var(J_phi) - (4/N^2) <J_phi>^2 with J_phi = sin(phi) J_x + cos(phi) J_y.
/// Signed; callers clamp at zero for presentation.
double c_phi(const MomentSet& m, double phi);
/// Same quantity evaluated from rho with an explicitly built J_phi.
double c_phi(const DensityMatrix& rho, const DickeOperatorSet& ops, double phi);

struct PhiSweep {
    std::vector<double> phis;  ///< k pi / resolution, k = 0 .. resolution-1
    std::vector<double> values;
    double max_value = 0.0;    ///< refined maximum
    double argmax_phi = 0.0;   ///< in [0, pi)
};

/// Grid scan over [0, pi) plus golden-section refinement of the best cell
/// to 1e-10 in phi. Throws InvalidParameter for resolution < 8.
PhiSweep phi_sweep(const MomentSet& m, int resolution = 64);

struct HpCrfResult {
    double gamma_plus = 0.0;
    double gamma_minus = 0.0;
    double nbar = 0.0;  ///< <c^dag c>
    Complex csq{};      ///< <c^2>
    double c_r = 0.0;
};

/// Linearized fluctuations of the driven collective-decay model above
/// threshold. Rates gamma_(+/-) = (gamma/4)(1 -/+ sqrt(1 - omega^2/gamma^2))^2
/// with two-photon coupling omega^2 / (4 gamma); the steady moments follow
/// from the closed moment equations and C_R = 2(|<c^2>| - <c^dag c>).
/// Throws BelowThreshold for gamma <= omega and std::logic_error if the
/// moment route disagrees with 1 - sqrt(1 - omega^2/gamma^2) beyond 1e-10.
HpCrfResult hp_crf(const CrfParams& params);

}  // namespace collspin
