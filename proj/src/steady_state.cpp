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

#include "collspin/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "collspin/errors.hpp"

namespace collspin {

namespace {

constexpr Complex kI{0.0, 1.0};

double max_abs(const SparseMatrix& m) {
    double out = 0.0;
    for (Index k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            out = std::max(out, std::abs(it.value()));
        }
    }
    return out;
}

Matrix unvec(const Vector& v, Index d) {
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

Complex vec_trace(const Vector& v, Index d) {
    Complex tr{0.0, 0.0};
    for (Index i = 0; i < d; ++i) tr += v(i + d * i);
    return tr;
}

// Candidate kernel vector plus diagnostics, before sanitizing.
struct KernelSolve {
    Vector x;
    int null_dim = 1;
    double gap = 0.0;
};

double residual_of(const Liouvillian& l, const Matrix& rho) {
    return apply(l, rho).cwiseAbs().maxCoeff();
}

// Estimate of the smallest |eigenvalue| of the bordered matrix by inverse
// iteration. Complex-conjugate pairs share a modulus, so the per-step growth
// oscillates; its geometric mean over the second half of the run converges.
template <typename Solver>
double inverse_iteration_modulus(const Solver& lu, Index dim, int iterations) {
    Vector x(dim);
    for (Index i = 0; i < dim; ++i) {
        x(i) = Complex(1.0 + 0.37 * std::sin(1.7 * static_cast<double>(i)),
                       0.5 * std::cos(0.9 * static_cast<double>(i)));
    }
    x.normalize();
    double log_growth = 0.0;
    int counted = 0;
    for (int k = 0; k < iterations; ++k) {
        Vector y = lu.solve(x);
        const double g = y.norm();
        if (!(g > 0.0) || !std::isfinite(g)) return 0.0;
        if (k >= iterations / 2) {
            log_growth += std::log(g);
            ++counted;
        }
        x = y / g;
    }
    return counted > 0 ? std::exp(-log_growth / counted) : 0.0;
}

std::optional<KernelSolve> sparse_kernel(const Liouvillian& l, const SteadyOptions& opts,
                                         double l_norm) {
    const Index d = l.hilbert_dim();
    const Index dim = l.dim();
    // Border row 0 with the trace functional, scaled to the operator so the
    // factorization stays balanced.
    const double scale = l_norm > 0.0 ? l_norm : 1.0;
    SparseMatrix a = l.matrix;
    SparseMatrix border(dim, dim);
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) trips.emplace_back(0, i + d * i, scale);
    border.setFromTriplets(trips.begin(), trips.end());
    a += border;
    a.makeCompressed();

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) return std::nullopt;

    Vector rhs = Vector::Zero(dim);
    rhs(0) = scale;
    Vector x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
    for (int refine = 0; refine < 2; ++refine) {
        const Vector r = rhs - a * x;
        x += lu.solve(r);
    }
    if (!x.allFinite()) return std::nullopt;

    KernelSolve out;
    out.x = std::move(x);
    if (opts.gap_iterations > 0) {
        out.gap = inverse_iteration_modulus(lu, dim, opts.gap_iterations);
        if (out.gap <= opts.degeneracy_tol * scale) out.null_dim = 2;  // lower bound
    }
    return out;
}

KernelSolve dense_kernel(const Liouvillian& l, const SteadyOptions& opts) {
    const Matrix dense = Matrix(l.matrix);
    Eigen::BDCSVD<Matrix> svd(dense, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Index dim = sv.size();
    const double smax = sv(0);
    const double cutoff = opts.degeneracy_tol * std::max(smax, 1e-300);
    int count = 0;
    for (Index k = 0; k < dim; ++k) {
        if (sv(k) <= cutoff) ++count;
    }
    KernelSolve out;
    out.x = svd.matrixV().col(dim - 1);
    out.null_dim = count;
    out.gap = dim >= 2 ? sv(dim - 2) : 0.0;
    return out;
}

SteadyStateResult finish(const Liouvillian& l, const KernelSolve& k, const SteadyOptions& opts,
                         double l_norm) {
    const Index d = l.hilbert_dim();
    const Complex tr = vec_trace(k.x, d);
    if (std::abs(tr) < 1e-300 || !std::isfinite(std::abs(tr))) {
        throw NoSteadyState("steady_state: kernel vector has zero trace");
    }
    const Matrix rho = sanitize_state(unvec(k.x / tr, d));
    const double residual = residual_of(l, rho);
    if (!(residual <= opts.tol)) {
        throw NoSteadyState("steady_state: residual " + std::to_string(residual) +
                            " exceeds tolerance " + std::to_string(opts.tol));
    }
    SteadyStateResult out{DensityMatrix(rho), residual, k.null_dim, SteadyMethod::nullspace,
                          k.gap, l_norm > 0.0 ? k.gap / l_norm : 0.0};
    return out;
}

}  // namespace

const char* to_string(SteadyMethod m) noexcept {
    switch (m) {
        case SteadyMethod::nullspace: return "nullspace";
        case SteadyMethod::exact: return "exact";
        case SteadyMethod::evolved: return "evolved";
    }
    return "?";
}

Matrix sanitize_state(const Matrix& rho, double clip) {
    Matrix herm = 0.5 * (rho + rho.adjoint());
    Complex tr = herm.trace();
    if (std::abs(tr) <= 0.0 || !std::isfinite(tr.real())) {
        throw InvalidState("sanitize_state: trace is zero or non-finite");
    }
    herm /= tr.real();
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    Eigen::VectorXd evals = es.eigenvalues();
    if (evals.minCoeff() < -clip) {
        for (Index i = 0; i < evals.size(); ++i) {
            if (evals(i) < -clip) evals(i) = 0.0;
        }
        herm = es.eigenvectors() * evals.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
        herm = 0.5 * (herm + herm.adjoint());
        herm /= herm.trace().real();
    }
    return herm;
}

SteadyStateResult steady_state(const Liouvillian& l, const SteadyOptions& opts) {
    if (!(opts.tol > 0.0)) {
        throw InvalidParameter("steady_state: tol must be > 0");
    }
    const double l_norm = max_abs(l.matrix);
    if (l_norm == 0.0) {
        throw DegenerateSteadyState("steady_state: Liouvillian is identically zero",
                                    static_cast<int>(l.dim()));
    }
    const bool dense_ok = l.dim() <= opts.dense_limit;

    auto run_dense = [&]() {
        KernelSolve k = dense_kernel(l, opts);
        if (k.null_dim == 0) {
            throw NoSteadyState("steady_state: Liouvillian has no kernel at working precision");
        }
        if (k.null_dim > 1) {
            throw DegenerateSteadyState("steady_state: kernel dimension " +
                                            std::to_string(k.null_dim),
                                        k.null_dim);
        }
        return finish(l, k, opts, l_norm);
    };

    if (opts.route == NullspaceRoute::dense) {
        return run_dense();
    }

    std::optional<KernelSolve> k = sparse_kernel(l, opts, l_norm);
    if (k && k->null_dim == 1) {
        try {
            return finish(l, *k, opts, l_norm);
        } catch (const NoSteadyState&) {
            if (opts.route == NullspaceRoute::sparse || !dense_ok) throw;
        }
    }
    if (opts.route == NullspaceRoute::automatic && dense_ok) {
        return run_dense();
    }
    throw DegenerateSteadyState(
        "steady_state: bordered Liouvillian is singular; kernel dimension >= 2", 2);
}

SteadyStateResult crf_exact_steady_state(const CrfParams& params, const DickeOperatorSet& ops) {
    params.validate();
    if (params.n != ops.n) {
        throw ShapeError("crf_exact_steady_state: parameters and operators disagree on N");
    }
    if (params.gamma == 0.0) {
        throw InvalidParameter("crf_exact_steady_state: gamma = 0 (division by zero)");
    }
    const Index d = ops.dim();
    const Liouvillian l = build_crf(params, ops);

    Matrix rho;
    if (params.omega == 0.0) {
        // a -> 0 limit of B^dag B is the lowest Dicke state.
        rho = Matrix::Zero(d, d);
        rho(d - 1, d - 1) = 1.0;
    } else {
        const double a = params.omega * params.n / (2.0 * params.gamma);
        const Matrix scaled = ops.jplus / a - kI * Matrix::Identity(d, d);
        Eigen::PartialPivLU<Matrix> lu(scaled);
        const double rcond = lu.rcond();
        const double cond = rcond > 0.0 ? 1.0 / rcond : INFINITY;
        Matrix b = lu.inverse();
        const double bmax = b.allFinite() ? b.cwiseAbs().maxCoeff() : INFINITY;
        if (!std::isfinite(bmax) || !(bmax > 0.0)) {
            throw ConditioningError("crf_exact_steady_state: inverse of the shifted ladder "
                                    "operator overflowed (condition estimate " +
                                        std::to_string(cond) + ")",
                                    cond);
        }
        b /= bmax;
        rho = b.adjoint() * b;
        const double tr = rho.trace().real();
        if (!std::isfinite(tr) || !(tr > 0.0)) {
            throw ConditioningError("crf_exact_steady_state: state lost all precision", cond);
        }
    }
    rho = sanitize_state(rho);
    const double residual = residual_of(l, rho);
    return SteadyStateResult{DensityMatrix(rho), residual, 1, SteadyMethod::exact, 0.0, 0.0};
}

DensityMatrix evolve(const Liouvillian& l, const DensityMatrix& rho0, double t_final,
                     double dt_max, const EvolveOptions& opts) {
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
        throw InvalidParameter("evolve: t_final must be finite and >= 0");
    }
    if (!(dt_max > 0.0)) {
        throw InvalidParameter("evolve: dt_max must be > 0");
    }
    const Index d = l.hilbert_dim();
    if (rho0.dim() != d) {
        throw ShapeError("evolve: initial state dimension does not match the Liouvillian");
    }
    if (t_final == 0.0) return rho0;

    const SparseMatrix& lm = l.matrix;
    auto rk4 = [&lm](const Vector& y, double h) {
        const Vector k1 = lm * y;
        const Vector k2 = lm * (y + (0.5 * h) * k1);
        const Vector k3 = lm * (y + (0.5 * h) * k2);
        const Vector k4 = lm * (y + h * k3);
        return Vector(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };

    Vector y = Eigen::Map<const Vector>(rho0.matrix().data(), d * d);
    double t = 0.0;
    double dt = std::min(dt_max, t_final);
    while (t < t_final) {
        const double h = std::min(dt, t_final - t);
        const Vector full = rk4(y, h);
        const Vector half = rk4(rk4(y, 0.5 * h), 0.5 * h);
        const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
        const double allowed = opts.tol * h;
        if (!std::isfinite(err)) {
            throw IntegrationError("evolve: non-finite state at t = " + std::to_string(t));
        }
        if (err <= allowed) {
            y = half + (half - full) / 15.0;
            t = (h == t_final - t) ? t_final : t + h;
            const Matrix rho = unvec(y, d);
            const double tr_err = std::abs(rho.trace() - 1.0);
            const double herm_err = hermiticity_error(rho);
            if (tr_err > opts.max_invariant_error || herm_err > opts.max_invariant_error) {
                throw IntegrationError("evolve: invariant breach at t = " + std::to_string(t) +
                                       " (trace error " + std::to_string(tr_err) +
                                       ", Hermiticity error " + std::to_string(herm_err) + ")");
            }
            if (opts.observer) opts.observer(t, rho);
            const double grow = err > 0.0 ? 0.9 * std::pow(allowed / err, 0.2) : 2.0;
            dt = std::min(dt_max, h * std::min(2.0, grow));
        } else {
            dt = h * std::max(0.1, 0.9 * std::pow(allowed / err, 0.2));
            if (dt < opts.min_dt) {
                throw StiffnessError("evolve: step size underflow at t = " + std::to_string(t));
            }
        }
    }
    return DensityMatrix(sanitize_state(unvec(y, d), INFINITY));
}

}  // namespace collspin
