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
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "collspin/liouvillian.hpp"

namespace collspin::semiclassics {

using Vec3 = Eigen::Vector3d;

/// Normalized Bloch vector (<J_x>, <J_y>, <J_z>) / j.
struct BlochState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 vec() const { return {x, y, z}; }
    static BlochState from(const Vec3& v) { return {v(0), v(1), v(2)}; }
    double norm() const { return vec().norm(); }
};

using Rhs = std::function<Vec3(const Vec3&)>;

/// (gamma Z X, -omega Z + gamma Z Y, omega Y - gamma (X^2 + Y^2)).
Vec3 crf_rhs(const BlochState& s, const CrfParams& p);

/// (2hY - Gb Z X, -2hX + 2 lambda Z X - Gb Z Y, -2 lambda X Y + Gb (X^2 + Y^2)).
/// gamma_a does not enter.
Vec3 lmg_rhs(const BlochState& s, const LmgParams& p);

Rhs crf_field(const CrfParams& p);
Rhs lmg_field(const LmgParams& p);

enum class Stability { stable_node, stable_focus, unstable, saddle };
enum class Branch { crf, trivial, broken_plus, broken_minus, unstable_plus, unstable_minus };

const char* to_string(Stability s) noexcept;
const char* to_string(Branch b) noexcept;

struct BlochFixedPoint {
    BlochState state;
    Stability stability = Stability::unstable;
    std::array<std::complex<double>, 2> eigenvalues{};  ///< mu_+, mu_- (Re mu_+ >= Re mu_-)
    Branch branch = Branch::trivial;
};

/// Real parts within this band of zero count as marginal.
inline constexpr double kStabilityEps = 1e-12;

Stability classify(const std::array<std::complex<double>, 2>& mu);

/// Central-difference Jacobian of rhs at s.
Eigen::Matrix3d numeric_jacobian(const Rhs& rhs, const Vec3& s, double step = 1e-6);

/// The two eigenvalues of a Jacobian restricted to the tangent plane at s
/// (the radial direction carries the trivial zero eigenvalue of the
/// conserved length), ordered by decreasing real part.
std::array<std::complex<double>, 2> tangent_eigenvalues(const Eigen::Matrix3d& jac, const Vec3& s);

struct CrfFixedPoints {
    std::vector<BlochFixedPoint> points;
    bool below_threshold = false;
    double gamma_c = 0.0;  ///< = omega
};

/// The stable point (0, omega/gamma, -sqrt(1 - omega^2/gamma^2)) for gamma > omega;
/// empty with below_threshold set otherwise.
CrfFixedPoints crf_fixed_points(const CrfParams& p);

enum class AsymptoticMode { corrected, strict_literal };

/// Large-N Bloch vector below threshold (0 < gamma < omega): X = Z = 0 and
/// Y = omega/gamma - sqrt(1 - (gamma/omega)^2) / asin(gamma/omega).
/// strict_literal evaluates sqrt(1 - (omega/gamma)^2) as printed in the
/// literature and throws ComplexValueError because it is imaginary there.
BlochState crf_asymptotic_below(const CrfParams& p, AsymptoticMode mode = AsymptoticMode::corrected);

/// Trivial point (0,0,1), broken pair with Lambda = lambda + sqrt(lambda^2 - Gb^2)
/// and unstable pair with Lambda' = lambda - sqrt(lambda^2 - Gb^2), each when it
/// lies on the sphere; stability from numeric Jacobian eigenvalues.
std::vector<BlochFixedPoint> lmg_fixed_points(const LmgParams& p);

/// Closed-form tangent eigenvalues (mu_+, mu_-).
///   trivial:          -Gb +/- 2 sqrt(h (lambda - h))
///   broken/unstable:  -2 Gb h / L +/- sqrt(2 (2h^2 + Gb^2 - lambda L)),  L = Lambda or Lambda'
/// Throws InvalidBranch when the branch does not exist for p.
std::array<std::complex<double>, 2> lmg_eigenvalues_analytic(const LmgParams& p, Branch branch);

enum class TransitionOrder { none, second, first };

const char* to_string(TransitionOrder o) noexcept;

struct PhaseDiagnostics {
    double h = 0.0;
    double lambda = 0.0;
    TransitionOrder order = TransitionOrder::none;
    double gamma_b_crit = 0.0;            ///< 2 sqrt(h (lambda - h))
    std::optional<double> gamma_b_dd;     ///< real/complex crossover of the broken branch
    double upper_crit = 0.0;              ///< = lambda, upper first-order boundary
    std::optional<std::pair<double, double>> bistable_window;
    double jump_lower = 0.0;              ///< 1 - Z_broken at gamma_b_crit
    double jump_upper = 0.0;              ///< 1 - Z_broken at lambda
    /// lambda > (h/2)(3 + sqrt 5), where lambda > gamma_b_dd > gamma_b_crit.
    bool dd_above_crit = false;
};

/// Closed-form transition data; order == none when lambda <= h or h <= 0.
PhaseDiagnostics critical_points(double h, double lambda);

struct TrajectoryPoint {
    double t = 0.0;
    BlochState s;
};
using Trajectory = std::vector<TrajectoryPoint>;

struct IntegrateOptions {
    double tol = 1e-10;            ///< step-doubling error per unit time
    double min_dt = 1e-12;
    double max_norm_drift = 1e-6;  ///< abort threshold
    bool renormalize = false;
    bool record = true;            ///< keep every accepted step (else only the ends)
    /// Checked after each accepted step; returning true ends the run early.
    std::function<bool(double, const Vec3&)> stop;
};

/// Adaptive RK4 (step doubling with local extrapolation) from a unit s0.
/// Throws InvalidParameter when |s0| != 1 to 1e-9 and IntegrationError when
/// the norm drifts by more than max_norm_drift.
Trajectory integrate(const Rhs& rhs, const BlochState& s0, double t_final, double dt_max,
                     const IntegrateOptions& opts = {});

struct ProjectedPoint {
    double u = 0.0;  ///< in [-pi, pi]
    double v = 0.0;  ///< in [-pi/2, pi/2]
};

/// Sinusoidal projection: theta = acos Z, phi = atan2(Y, X) in [0, 2 pi),
/// V = pi/2 - theta, U = (phi - pi) cos(theta - pi/2).
ProjectedPoint project(const BlochState& s);

struct BasinSample {
    BlochState initial;
    ProjectedPoint initial_uv;
    BlochState terminal;
    std::optional<Branch> attractor;  ///< empty when not converged by t_final
};

struct BasinOptions {
    double t_final = 500.0;
    double dt_max = 0.5;
    double tol = 1e-10;
    double convergence_radius = 1e-6;
    unsigned workers = 0;  ///< 0 = all available cores
};

struct BasinMap {
    std::vector<BlochFixedPoint> attractors;
    std::vector<BasinSample> samples;

    std::size_t count(std::optional<Branch> b) const;
};

/// Equal-area stratified starting points: `resolution` bands of equal height in z,
/// each split into 2 * resolution azimuthal cells, one point at each cell centre.
std::vector<BlochState> equal_area_samples(int resolution);

/// Integrates every equal-area sample and labels it with the stable fixed point
/// it reaches. Throws InvalidParameter when resolution < 4.
BasinMap basin_map(const LmgParams& p, int resolution, const BasinOptions& opts = {});

/// Label for a single initial state against given attractors.
BasinSample classify_initial(const Rhs& rhs, const std::vector<BlochFixedPoint>& attractors,
                             const BlochState& s0, const BasinOptions& opts = {});

}  // namespace collspin::semiclassics
