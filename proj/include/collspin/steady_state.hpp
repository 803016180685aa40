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

#include <functional>

#include "collspin/liouvillian.hpp"
#include "collspin/spin_algebra.hpp"

namespace collspin {

enum class SteadyMethod { nullspace, exact, evolved };

const char* to_string(SteadyMethod m) noexcept;

struct SteadyStateResult {
    DensityMatrix rho;
    double residual = 0.0;  ///< max-abs of L(rho)
    int null_dim = 1;
    SteadyMethod method = SteadyMethod::nullspace;
    /// Smallest nonzero |eigenvalue| of L when estimated (0 if not computed).
    double gap = 0.0;
    /// gap / ||L||_max; small values flag near-degenerate (bistable) spectra.
    double gap_ratio = 0.0;
};

enum class NullspaceRoute {
    automatic,  ///< sparse bordered solve, dense SVD when that fails and dim permits
    sparse,
    dense,
};

struct SteadyOptions {
    double tol = 1e-10;  ///< required max-abs residual of L(rho)
    NullspaceRoute route = NullspaceRoute::automatic;
    /// Largest superoperator dimension for which a dense SVD is attempted.
    Index dense_limit = 1024;
    /// Singular values (or the spectral gap) below this times ||L||_max
    /// count as kernel directions.
    double degeneracy_tol = 1e-12;
    /// Inverse iterations used for the spectral-gap estimate (0 disables it).
    int gap_iterations = 30;
};

/// Unique steady state of l.
///
/// The sparse route solves (L + e_0 w^T) x = e_0 with w = vec(identity), which
/// is nonsingular exactly when ker L is one-dimensional; the trace row pins
/// tr(rho) = 1. The returned state is Hermitized, eigenvalues below -1e-10 are
/// clipped, and it is renormalized.
///
/// Throws NoSteadyState when no acceptable kernel vector exists and
/// DegenerateSteadyState when the kernel has more than one dimension.
SteadyStateResult steady_state(const Liouvillian& l, const SteadyOptions& opts = {});

/// Closed-form steady state rho ~ Jt_-^{-1} Jt_+^{-1} with
/// Jt_(+/-) = J_(+/-) -/+ i omega N / (2 gamma).
///
/// Since Jt_- = Jt_+^dag, rho = B^dag B with B = Jt_+^{-1}; B is obtained from
/// a pivoted LU factorization of the rescaled operator (2 gamma / (omega N)) Jt_+.
/// Throws InvalidParameter for gamma = 0 and ConditioningError when the
/// inverse overflows.
SteadyStateResult crf_exact_steady_state(const CrfParams& params, const DickeOperatorSet& ops);

struct EvolveOptions {
    /// Step-doubling error tolerance per unit time (max-abs entry).
    double tol = 1e-10;
    double min_dt = 1e-12;
    /// Invariant breach (trace or Hermiticity) that aborts the run.
    double max_invariant_error = 1e-6;
    /// Called after every accepted step with (t, rho(t)).
    std::function<void(double, const Matrix&)> observer;
};

/// Classical RK4 with step-halving error control and local extrapolation.
/// Throws StiffnessError when dt underflows min_dt and IntegrationError when
/// trace or Hermiticity drift exceeds max_invariant_error.
DensityMatrix evolve(const Liouvillian& l, const DensityMatrix& rho0, double t_final,
                     double dt_max, const EvolveOptions& opts = {});

/// Hermitize, clip eigenvalues below -clip, renormalize to unit trace.
Matrix sanitize_state(const Matrix& rho, double clip = 1e-10);

}  // namespace collspin
