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

#include "collspin/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "collspin/errors.hpp"

namespace collspin {

namespace {

using Mat4 = Eigen::Matrix4cd;

constexpr double kPhiTol = 1e-10;

std::string check_pair(const Mat4& r) {
    const double herm = (r - r.adjoint()).cwiseAbs().maxCoeff();
    if (herm > PairState::kTol) return "not Hermitian (" + std::to_string(herm) + ")";
    const double tr = std::abs(r.trace() - 1.0);
    if (tr > PairState::kTol) return "trace differs from 1 by " + std::to_string(tr);
    // Exchange symmetry: invariant under swapping the two qubits.
    Eigen::PermutationMatrix<4> p;
    p.indices() << 0, 2, 1, 3;
    const double swap = (Mat4(p * r * p.transpose()) - r).cwiseAbs().maxCoeff();
    if (swap > PairState::kTol) return "not exchange-symmetric (" + std::to_string(swap) + ")";
    const Mat4 h = 0.5 * (r + r.adjoint());
    const double min_eig = Eigen::SelfAdjointEigenSolver<Mat4>(h, Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
    if (min_eig < -PairState::kPositivityTol) {
        return "negative eigenvalue " + std::to_string(min_eig);
    }
    return {};
}

Mat4 psd_sqrt(const Mat4& h) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (h + h.adjoint()));
    const Eigen::Vector4d root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

PairState::PairState(const Mat4& entries) : entries_(entries) {
    const std::string problem = check_pair(entries_);
    if (!problem.empty()) throw InvalidState("PairState: " + problem);
}

PairState pair_rdm(const MomentSet& m) {
    if (m.n < 2) {
        throw InvalidParameter("pair_rdm: need N >= 2, got " + std::to_string(m.n));
    }
    const double n = m.n;
    const double pairs = n * (n - 1.0);
    const double jz = m.first[2];
    const double jz2 = m.second(2, 2);
    const Complex jm = std::conj(m.jplus);
    const Complex jm2 = std::conj(m.jplus_sq);
    const Complex jzjm = m.jz_jminus;

    const double uu = (n * n - 2.0 * n + 4.0 * jz2 + 4.0 * (n - 1.0) * jz) / (4.0 * pairs);
    const double dd = (n * n - 2.0 * n + 4.0 * jz2 - 4.0 * (n - 1.0) * jz) / (4.0 * pairs);
    const double mid = (n * n - 4.0 * jz2) / (4.0 * pairs);
    const double exch = (m.second(0, 0) + m.second(1, 1) - 0.5 * n) / pairs;
    const Complex corner = jm2 / pairs;
    const Complex upper = (0.5 * n * jm + jzjm) / pairs;
    const Complex lower = ((0.5 * n - 1.0) * jm - jzjm) / pairs;

    Mat4 r = Mat4::Zero();
    r(0, 0) = uu;
    r(1, 1) = r(2, 2) = mid;
    r(1, 2) = r(2, 1) = exch;
    r(3, 3) = dd;
    r(0, 3) = corner;
    r(0, 1) = r(0, 2) = upper;
    r(1, 3) = r(2, 3) = lower;
    r(3, 0) = std::conj(corner);
    r(1, 0) = r(2, 0) = std::conj(upper);
    r(3, 1) = r(3, 2) = std::conj(lower);

    const std::string problem = check_pair(r);
    if (!problem.empty()) throw InconsistentMoments("pair_rdm: " + problem);
    return PairState(r);
}

double concurrence(const PairState& p) {
    const Mat4& r = p.matrix();
    Mat4 yy = Mat4::Zero();
    yy(0, 3) = yy(3, 0) = -1.0;
    yy(1, 2) = yy(2, 1) = 1.0;
    const Mat4 flipped = yy * r.conjugate() * yy;
    const Mat4 root = psd_sqrt(r);
    const Mat4 inner = root * flipped * root;
    Eigen::Vector4d lam = Eigen::SelfAdjointEigenSolver<Mat4>(0.5 * (inner + inner.adjoint()),
                                                              Eigen::EigenvaluesOnly)
                              .eigenvalues()
                              .cwiseMax(0.0)
                              .cwiseSqrt();
    std::sort(lam.data(), lam.data() + 4, std::greater<>());
    return std::clamp(lam(0) - lam(1) - lam(2) - lam(3), 0.0, 1.0);
}

double concurrence(const Mat4& rho) { return concurrence(PairState(rho)); }

double rescaled_concurrence(const MomentSet& m) {
    return (m.n - 1.0) * concurrence(pair_rdm(m));
}

double rescaled_concurrence(const DensityMatrix& rho, const DickeOperatorSet& ops) {
    return rescaled_concurrence(moments(rho, ops));
}

double c_phi(const MomentSet& m, double phi) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const double n = m.n;
    const double mean = s * m.first[0] + c * m.first[1];
    const double second = s * s * m.second(0, 0) + c * c * m.second(1, 1) + 2.0 * s * c * m.second(0, 1);
    const double var = second - mean * mean;
    return 1.0 - 4.0 / n * var - 4.0 / (n * n) * mean * mean;
}

double c_phi(const DensityMatrix& rho, const DickeOperatorSet& ops, double phi) {
    const Matrix jphi = std::sin(phi) * ops.jx + std::cos(phi) * ops.jy;
    const double n = ops.n;
    const double mean = expectation(jphi, rho).real();
    const double second = expectation(jphi * jphi, rho).real();
    return 1.0 - 4.0 / n * (second - mean * mean) - 4.0 / (n * n) * mean * mean;
}

PhiSweep phi_sweep(const MomentSet& m, int resolution) {
    if (resolution < 8) {
        throw InvalidParameter("phi_sweep: resolution must be >= 8, got " + std::to_string(resolution));
    }
    using std::numbers::pi;
    PhiSweep out;
    out.phis.resize(resolution);
    out.values.resize(resolution);
    const double step = pi / resolution;
    for (int k = 0; k < resolution; ++k) {
        out.phis[k] = k * step;
        out.values[k] = c_phi(m, out.phis[k]);
    }
    const auto best = std::max_element(out.values.begin(), out.values.end()) - out.values.begin();

    // C_phi has period pi, so the bracket may cross 0.
    double a = out.phis[best] - step;
    double b = out.phis[best] + step;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = c_phi(m, x1);
    double f2 = c_phi(m, x2);
    while (b - a > kPhiTol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = c_phi(m, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = c_phi(m, x2);
        }
    }
    double arg = 0.5 * (a + b);
    double val = c_phi(m, arg);
    if (out.values[best] > val) {
        arg = out.phis[best];
        val = out.values[best];
    }
    arg = std::fmod(arg, pi);
    if (arg < 0.0) arg += pi;
    out.max_value = val;
    out.argmax_phi = arg;
    return out;
}

HpCrfResult hp_crf(const CrfParams& params) {
    params.validate();
    if (!(params.gamma > params.omega)) {
        throw BelowThreshold("hp_crf: linearization requires gamma > omega (gamma = " +
                             std::to_string(params.gamma) + ", omega = " +
                             std::to_string(params.omega) + ")");
    }
    const double g = params.gamma;
    const double w = params.omega;
    const double root = std::sqrt(1.0 - (w / g) * (w / g));
    const double kappa = w * w / (4.0 * g);

    HpCrfResult r;
    r.gamma_plus = 0.25 * g * (1.0 - root) * (1.0 - root);
    r.gamma_minus = 0.25 * g * (1.0 + root) * (1.0 + root);
    // d<n>/dt   = 2(g+ - g-)<n> + 2 g+
    // d<c2>/dt  = 2(g+ - g-)<c2> - 2 kappa
    const double net = r.gamma_minus - r.gamma_plus;
    r.nbar = r.gamma_plus / net;
    r.csq = Complex(-kappa / net, 0.0);
    r.c_r = std::max(0.0, 2.0 * (std::abs(r.csq) - r.nbar));

    const double closed = 1.0 - root;
    if (std::abs(r.c_r - closed) > 1e-10) {
        throw std::logic_error("hp_crf: moment route gives " + std::to_string(r.c_r) +
                               ", closed form " + std::to_string(closed));
    }
    return r;
}

}  // namespace collspin
