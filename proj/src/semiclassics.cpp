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

#include "collspin/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "collspin/errors.hpp"
#include "collspin/parallel.hpp"

namespace collspin::semiclassics {

namespace {

using cplx = std::complex<double>;
using std::numbers::pi;

// Marks a pair as complex rather than real when |Im| exceeds this.
constexpr double kFocusImagTol = 1e-8;

std::array<cplx, 2> ordered(cplx a, cplx b) {
    if (a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag())) std::swap(a, b);
    return {a, b};
}

std::array<cplx, 2> eigen_pair(double half_trace, cplx disc) {
    const cplx root = std::sqrt(disc);
    return ordered(half_trace + root, half_trace - root);
}

BlochFixedPoint make_point(const Rhs& field, const Vec3& s, Branch branch) {
    BlochFixedPoint fp;
    fp.state = BlochState::from(s);
    fp.branch = branch;
    fp.eigenvalues = tangent_eigenvalues(numeric_jacobian(field, s), s);
    fp.stability = classify(fp.eigenvalues);
    return fp;
}

// Broken (sign = +1) or unstable (sign = -1) Lambda.
double lambda_branch(const LmgParams& p, int sign) {
    return p.lambda + sign * std::sqrt(p.lambda * p.lambda - p.gamma_b * p.gamma_b);
}

bool branch_on_sphere(const LmgParams& p, double big_lambda) {
    return p.gamma_b <= p.lambda && big_lambda > 0.0 && big_lambda >= 2.0 * p.h;
}

Vec3 branch_point(const LmgParams& p, double big_lambda, double x_sign) {
    const double z = 2.0 * p.h / big_lambda;
    const double x2 = (big_lambda * big_lambda - 4.0 * p.h * p.h) / (2.0 * p.lambda * big_lambda);
    const double x = x_sign * std::sqrt(std::max(0.0, x2));
    const double y = p.gamma_b / (2.0 * p.h) * x * z;
    return {x, y, z};
}

void require_lmg_domain(const LmgParams& p, const char* where) {
    p.validate();
    if (!(p.h > 0.0) || !(p.lambda > 0.0)) {
        throw InvalidParameter(std::string(where) + ": requires h > 0 and lambda > 0");
    }
}

}  // namespace

const char* to_string(Stability s) noexcept {
    switch (s) {
        case Stability::stable_node: return "stable-node";
        case Stability::stable_focus: return "stable-focus";
        case Stability::unstable: return "unstable";
        case Stability::saddle: return "saddle";
    }
    return "?";
}

const char* to_string(Branch b) noexcept {
    switch (b) {
        case Branch::crf: return "crf";
        case Branch::trivial: return "trivial";
        case Branch::broken_plus: return "broken-plus";
        case Branch::broken_minus: return "broken-minus";
        case Branch::unstable_plus: return "unstable-plus";
        case Branch::unstable_minus: return "unstable-minus";
    }
    return "?";
}

const char* to_string(TransitionOrder o) noexcept {
    switch (o) {
        case TransitionOrder::none: return "none";
        case TransitionOrder::second: return "second";
        case TransitionOrder::first: return "first";
    }
    return "?";
}

Vec3 crf_rhs(const BlochState& s, const CrfParams& p) {
    const double g = p.gamma;
    const double w = p.omega;
    return {g * s.z * s.x, -w * s.z + g * s.z * s.y, w * s.y - g * (s.x * s.x + s.y * s.y)};
}

Vec3 lmg_rhs(const BlochState& s, const LmgParams& p) {
    const double h = p.h;
    const double l = p.lambda;
    const double g = p.gamma_b;
    return {2.0 * h * s.y - g * s.z * s.x,
            -2.0 * h * s.x + 2.0 * l * s.z * s.x - g * s.z * s.y,
            -2.0 * l * s.x * s.y + g * (s.x * s.x + s.y * s.y)};
}

Rhs crf_field(const CrfParams& p) {
    return [p](const Vec3& v) { return crf_rhs(BlochState::from(v), p); };
}

Rhs lmg_field(const LmgParams& p) {
    return [p](const Vec3& v) { return lmg_rhs(BlochState::from(v), p); };
}

Stability classify(const std::array<cplx, 2>& mu) {
    const double a = mu[0].real();
    const double b = mu[1].real();
    if (a < -kStabilityEps && b < -kStabilityEps) {
        const bool complex_pair =
            std::abs(mu[0].imag()) > kFocusImagTol || std::abs(mu[1].imag()) > kFocusImagTol;
        return complex_pair ? Stability::stable_focus : Stability::stable_node;
    }
    if ((a > kStabilityEps && b < -kStabilityEps) || (b > kStabilityEps && a < -kStabilityEps)) {
        return Stability::saddle;
    }
    // Both repelling, or marginal: not asymptotically stable.
    return Stability::unstable;
}

Eigen::Matrix3d numeric_jacobian(const Rhs& rhs, const Vec3& s, double step) {
    Eigen::Matrix3d jac;
    for (int k = 0; k < 3; ++k) {
        Vec3 plus = s;
        Vec3 minus = s;
        plus(k) += step;
        minus(k) -= step;
        jac.col(k) = (rhs(plus) - rhs(minus)) / (2.0 * step);
    }
    return jac;
}

std::array<cplx, 2> tangent_eigenvalues(const Eigen::Matrix3d& jac, const Vec3& s) {
    const Vec3 n = s.normalized();
    int least = 0;
    n.cwiseAbs().minCoeff(&least);
    const Vec3 axis = Vec3::Unit(least);
    const Vec3 e1 = axis.cross(n).normalized();
    const Vec3 e2 = n.cross(e1);
    Eigen::Matrix<double, 3, 2> basis;
    basis << e1, e2;
    const Eigen::Matrix2d m = basis.transpose() * jac * basis;
    const double half_trace = 0.5 * m.trace();
    return eigen_pair(half_trace, cplx(half_trace * half_trace - m.determinant(), 0.0));
}

CrfFixedPoints crf_fixed_points(const CrfParams& p) {
    p.validate();
    if (!(p.gamma > 0.0)) {
        throw InvalidParameter("crf_fixed_points: gamma must be > 0");
    }
    CrfFixedPoints out;
    out.gamma_c = p.omega;
    if (p.gamma <= p.omega) {
        out.below_threshold = true;
        return out;
    }
    const double r = p.omega / p.gamma;
    const Vec3 s{0.0, r, -std::sqrt(1.0 - r * r)};
    out.points.push_back(make_point(crf_field(p), s, Branch::crf));
    return out;
}

BlochState crf_asymptotic_below(const CrfParams& p, AsymptoticMode mode) {
    p.validate();
    if (!(p.gamma > 0.0) || !(p.gamma < p.omega)) {
        throw InvalidParameter("crf_asymptotic_below: requires 0 < gamma < omega");
    }
    const double ratio = p.gamma / p.omega;
    if (mode == AsymptoticMode::strict_literal) {
        const double radicand = 1.0 - (p.omega / p.gamma) * (p.omega / p.gamma);
        if (radicand < 0.0) {
            throw ComplexValueError(
                "crf_asymptotic_below: sqrt(1 - (omega/gamma)^2) is imaginary for gamma < omega");
        }
        return {0.0, p.omega / p.gamma - std::sqrt(radicand) / std::asin(ratio), 0.0};
    }
    const double y = p.omega / p.gamma - std::sqrt(1.0 - ratio * ratio) / std::asin(ratio);
    return {0.0, y, 0.0};
}

std::vector<BlochFixedPoint> lmg_fixed_points(const LmgParams& p) {
    require_lmg_domain(p, "lmg_fixed_points");
    const Rhs field = lmg_field(p);
    std::vector<BlochFixedPoint> out;
    out.push_back(make_point(field, Vec3{0.0, 0.0, 1.0}, Branch::trivial));
    if (p.gamma_b <= p.lambda) {
        const double broken = lambda_branch(p, +1);
        if (branch_on_sphere(p, broken)) {
            out.push_back(make_point(field, branch_point(p, broken, +1.0), Branch::broken_plus));
            out.push_back(make_point(field, branch_point(p, broken, -1.0), Branch::broken_minus));
        }
        const double unstable = lambda_branch(p, -1);
        if (branch_on_sphere(p, unstable)) {
            out.push_back(make_point(field, branch_point(p, unstable, +1.0), Branch::unstable_plus));
            out.push_back(make_point(field, branch_point(p, unstable, -1.0), Branch::unstable_minus));
        }
    }
    return out;
}

std::array<cplx, 2> lmg_eigenvalues_analytic(const LmgParams& p, Branch branch) {
    require_lmg_domain(p, "lmg_eigenvalues_analytic");
    const double h = p.h;
    const double g = p.gamma_b;
    switch (branch) {
        case Branch::trivial:
            return eigen_pair(-g, cplx(4.0 * h * (p.lambda - h), 0.0));
        case Branch::broken_plus:
        case Branch::broken_minus:
        case Branch::unstable_plus:
        case Branch::unstable_minus: {
            const bool broken = branch == Branch::broken_plus || branch == Branch::broken_minus;
            if (p.gamma_b > p.lambda) {
                throw InvalidBranch("lmg_eigenvalues_analytic: no symmetry-broken points for "
                                    "gamma_b > lambda");
            }
            const double big = lambda_branch(p, broken ? +1 : -1);
            if (!branch_on_sphere(p, big)) {
                throw InvalidBranch(std::string("lmg_eigenvalues_analytic: ") + to_string(branch) +
                                    " branch does not exist for these parameters");
            }
            const double half_trace = -2.0 * g * h / big;
            return eigen_pair(half_trace, cplx(2.0 * (2.0 * h * h + g * g - p.lambda * big), 0.0));
        }
        case Branch::crf:
            break;
    }
    throw InvalidBranch("lmg_eigenvalues_analytic: not an LMG branch");
}

PhaseDiagnostics critical_points(double h, double lambda) {
    PhaseDiagnostics d;
    d.h = h;
    d.lambda = lambda;
    d.upper_crit = lambda;
    if (!std::isfinite(h) || !std::isfinite(lambda) || !(h > 0.0) || !(lambda > h)) {
        return d;
    }
    d.gamma_b_crit = 2.0 * std::sqrt(h * (lambda - h));
    const double dd2 =
        0.5 * (lambda * lambda - 4.0 * h * h) + 0.5 * lambda * std::sqrt(lambda * lambda + 8.0 * h * h);
    if (dd2 >= 0.0) d.gamma_b_dd = std::sqrt(dd2);
    if (lambda > 2.0 * h) {
        d.order = TransitionOrder::first;
        d.bistable_window = std::make_pair(d.gamma_b_crit, lambda);
        d.jump_lower = 1.0 - h / (lambda - h);
        d.jump_upper = 1.0 - 2.0 * h / lambda;
    } else {
        // Branches join continuously at gamma_b_crit; nothing jumps.
        d.order = TransitionOrder::second;
    }
    d.dd_above_crit = lambda > 0.5 * h * (3.0 + std::sqrt(5.0));
    return d;
}

Trajectory integrate(const Rhs& rhs, const BlochState& s0, double t_final, double dt_max,
                     const IntegrateOptions& opts) {
    if (std::abs(s0.norm() - 1.0) > 1e-9) {
        throw InvalidParameter("integrate: initial state is not on the unit sphere");
    }
    if (!(t_final >= 0.0) || !std::isfinite(t_final) || !(dt_max > 0.0)) {
        throw InvalidParameter("integrate: need finite t_final >= 0 and dt_max > 0");
    }
    auto rk4 = [&rhs](const Vec3& y, double h) {
        const Vec3 k1 = rhs(y);
        const Vec3 k2 = rhs(y + 0.5 * h * k1);
        const Vec3 k3 = rhs(y + 0.5 * h * k2);
        const Vec3 k4 = rhs(y + h * k3);
        return Vec3(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };

    Trajectory traj;
    Vec3 y = s0.vec();
    double t = 0.0;
    traj.push_back({t, s0});
    double dt = std::min(dt_max, t_final > 0.0 ? t_final : dt_max);
    bool stopped = false;
    while (t < t_final && !stopped) {
        const double h = std::min(dt, t_final - t);
        const Vec3 full = rk4(y, h);
        const Vec3 half = rk4(rk4(y, 0.5 * h), 0.5 * h);
        const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
        const double allowed = opts.tol * h;
        if (!std::isfinite(err)) {
            throw IntegrationError("integrate: non-finite state at t = " + std::to_string(t));
        }
        if (err <= allowed) {
            y = half + (half - full) / 15.0;
            t = (h == t_final - t) ? t_final : t + h;
            const double drift = std::abs(y.norm() - 1.0);
            if (drift > opts.max_norm_drift) {
                throw IntegrationError("integrate: norm drift " + std::to_string(drift) +
                                       " at t = " + std::to_string(t));
            }
            if (opts.renormalize) y.normalize();
            if (opts.record) traj.push_back({t, BlochState::from(y)});
            if (opts.stop && opts.stop(t, y)) stopped = true;
            const double grow = err > 0.0 ? 0.9 * std::pow(allowed / err, 0.2) : 2.0;
            dt = std::min(dt_max, h * std::min(2.0, grow));
        } else {
            dt = h * std::max(0.1, 0.9 * std::pow(allowed / err, 0.2));
            if (dt < opts.min_dt) {
                throw StiffnessError("integrate: step size underflow at t = " + std::to_string(t));
            }
        }
    }
    if (!opts.record && traj.back().t != t) traj.push_back({t, BlochState::from(y)});
    return traj;
}

ProjectedPoint project(const BlochState& s) {
    const double r = s.norm();
    const double z = std::clamp(s.z / r, -1.0, 1.0);
    const double theta = std::acos(z);
    double phi = std::atan2(s.y, s.x);
    if (phi < 0.0) phi += 2.0 * pi;
    // cos(theta - pi/2) = sin(theta), taken from the components so the poles
    // land exactly on U = 0.
    const double sin_theta = std::hypot(s.x, s.y) / r;
    return {(phi - pi) * sin_theta, 0.5 * pi - theta};
}

std::size_t BasinMap::count(std::optional<Branch> b) const {
    return static_cast<std::size_t>(std::count_if(
        samples.begin(), samples.end(), [&](const BasinSample& s) { return s.attractor == b; }));
}

std::vector<BlochState> equal_area_samples(int resolution) {
    if (resolution < 1) {
        throw InvalidParameter("equal_area_samples: resolution must be >= 1");
    }
    std::vector<BlochState> out;
    const int sectors = 2 * resolution;
    out.reserve(static_cast<std::size_t>(resolution) * sectors);
    for (int band = 0; band < resolution; ++band) {
        const double z = -1.0 + 2.0 * (band + 0.5) / resolution;
        const double rho = std::sqrt(1.0 - z * z);
        for (int k = 0; k < sectors; ++k) {
            const double phi = 2.0 * pi * (k + 0.5) / sectors;
            out.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
        }
    }
    return out;
}

BasinSample classify_initial(const Rhs& rhs, const std::vector<BlochFixedPoint>& attractors,
                             const BlochState& s0, const BasinOptions& opts) {
    BasinSample sample;
    sample.initial = s0;
    sample.initial_uv = project(s0);

    std::optional<Branch> hit;
    double last_speed = INFINITY;
    IntegrateOptions io;
    io.tol = opts.tol;
    io.record = false;
    io.stop = [&](double, const Vec3& y) {
        const double speed = rhs(y).norm();
        const bool slowing = speed < last_speed;
        last_speed = speed;
        for (const auto& a : attractors) {
            if ((y - a.state.vec()).norm() <= opts.convergence_radius && slowing) {
                hit = a.branch;
                return true;
            }
        }
        return false;
    };
    const Trajectory traj = integrate(rhs, s0, opts.t_final, opts.dt_max, io);
    sample.terminal = traj.back().s;
    sample.attractor = hit;
    return sample;
}

BasinMap basin_map(const LmgParams& p, int resolution, const BasinOptions& opts) {
    if (resolution < 4) {
        throw InvalidParameter("basin_map: grid resolution must be >= 4");
    }
    BasinMap map;
    for (const auto& fp : lmg_fixed_points(p)) {
        if (fp.stability == Stability::stable_node || fp.stability == Stability::stable_focus) {
            map.attractors.push_back(fp);
        }
    }
    const Rhs field = lmg_field(p);
    const std::vector<BlochState> starts = equal_area_samples(resolution);
    map.samples.resize(starts.size());
    parallel_for(starts.size(), opts.workers, [&](std::size_t i) {
        map.samples[i] = classify_initial(field, map.attractors, starts[i], opts);
    });
    return map;
}

}  // namespace collspin::semiclassics
