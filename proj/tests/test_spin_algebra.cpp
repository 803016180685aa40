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

#include <cmath>
#include <random>

#include "collspin/errors.hpp"
#include "collspin/spin_algebra.hpp"
#include "collspin/steady_state.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace collspin;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("single spin operators") {
    const auto ops = build_operators(1);
    CHECK(ops.j == 0.5);
    CHECK(ops.jz(0, 0).real() == doctest::Approx(0.5));
    CHECK(ops.jz(1, 1).real() == doctest::Approx(-0.5));
    CHECK(std::abs(ops.jz(0, 1)) == 0.0);
}

TEST_CASE("j = 1 ladder coefficients") {
    const auto ops = build_operators(2);
    CHECK(ops.jplus(0, 1).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(ops.jplus(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    Matrix off = ops.jplus;
    off(0, 1) = off(1, 2) = 0.0;
    CHECK(max_abs(off) == 0.0);
}

TEST_CASE("build_operators rejects empty systems") {
    CHECK_THROWS_AS(build_operators(0), InvalidParameter);
    CHECK_THROWS_AS(build_operators(-3), InvalidParameter);
}

TEST_CASE("angular momentum algebra for N = 1..100") {
    const Complex i{0.0, 1.0};
    for (int n = 1; n <= 100; ++n) {
        const auto ops = build_operators(n);
        const Index d = ops.dim();
        CHECK(max_abs(ops.jx * ops.jy - ops.jy * ops.jx - i * ops.jz) <= 1e-12);
        CHECK(max_abs(ops.jy * ops.jz - ops.jz * ops.jy - i * ops.jx) <= 1e-12);
        CHECK(max_abs(ops.jz * ops.jx - ops.jx * ops.jz - i * ops.jy) <= 1e-12);
        const Matrix casimir = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
        CHECK(max_abs(casimir - ops.j * (ops.j + 1.0) * Matrix::Identity(d, d)) <= 1e-10);
        CHECK(max_abs(ops.jplus - ops.jminus.adjoint()) == 0.0);
        CHECK(max_abs(ops.jx + i * ops.jy - ops.jplus) <= 1e-15);
        CHECK(max_abs(ops.jx - i * ops.jy - ops.jminus) <= 1e-15);
        for (Index r = 0; r < d; ++r) {
            CHECK(ops.jz(r, r).real() == doctest::Approx(ops.j - r));
            CHECK(ops.jz(r, r).imag() == 0.0);
        }
    }
}

TEST_CASE("dicke index and states") {
    CHECK(dicke_index(4, 2.0) == 0);
    CHECK(dicke_index(4, -2.0) == 4);
    CHECK(dicke_index(3, 0.5) == 1);
    CHECK_THROWS_AS(dicke_index(4, 0.5), InvalidParameter);
    CHECK_THROWS_AS(dicke_index(4, 3.0), InvalidParameter);
    const Vector v = dicke_state(6, -1.0);
    CHECK(std::abs(v(4) - 1.0) == 0.0);
    CHECK(v.norm() == doctest::Approx(1.0));
}

TEST_CASE("coherent states point along their direction") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n : {1, 7, 40, 300}) {
        const auto ops = build_operators(n);
        for (int trial = 0; trial < 5; ++trial) {
            const double theta = std::acos(1.0 - 2.0 * u(rng));
            const double phi = 2.0 * M_PI * u(rng);
            const Vector psi = spin_coherent_state(n, theta, phi);
            CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
            const auto rho = DensityMatrix::pure(psi);
            const double j = ops.j;
            CHECK(expectation(ops.jx, rho).real() ==
                  doctest::Approx(j * std::sin(theta) * std::cos(phi)).epsilon(1e-9));
            CHECK(expectation(ops.jy, rho).real() ==
                  doctest::Approx(j * std::sin(theta) * std::sin(phi)).epsilon(1e-9));
            CHECK(expectation(ops.jz, rho).real() ==
                  doctest::Approx(j * std::cos(theta)).epsilon(1e-9));
        }
    }
}

TEST_CASE("density matrix validation") {
    Matrix m = Matrix::Identity(3, 3) / 3.0;
    CHECK_NOTHROW(DensityMatrix{m});
    Matrix bad_trace = m * 1.1;
    CHECK_THROWS_AS(DensityMatrix{bad_trace}, InvalidState);
    Matrix non_herm = m;
    non_herm(0, 1) = 0.01;
    CHECK_THROWS_AS(DensityMatrix{non_herm}, InvalidState);
    Matrix negative = Matrix::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{negative}, InvalidState);
    CHECK(DensityMatrix::maximally_mixed(5).matrix().trace().real() == doctest::Approx(1.0));
}

TEST_CASE("expectation values") {
    const auto ops = build_operators(6);
    std::mt19937_64 rng(3);
    const DensityMatrix rho(oracle::random_density(7, rng));
    const Complex one = expectation(Matrix::Identity(7, 7), rho);
    CHECK(one.real() == doctest::Approx(1.0));
    CHECK(std::abs(expectation(ops.jx, rho).imag()) <= 1e-10);
    const auto top = DensityMatrix::pure(dicke_state(6, 3.0));
    CHECK(expectation(ops.jz, top).real() == doctest::Approx(3.0));
    CHECK_THROWS_AS(expectation(Matrix::Identity(4, 4), rho), ShapeError);
}

TEST_CASE("moments of simple states") {
    {
        const auto ops = build_operators(10);
        const auto m = moments(DensityMatrix::pure(dicke_state(10, 5.0)), ops);
        CHECK(m.first[2] == doctest::Approx(5.0));
        CHECK(m.second(2, 2) == doctest::Approx(25.0));
        CHECK(m.second(0, 0) == doctest::Approx(2.5));
        CHECK(m.second(1, 1) == doctest::Approx(2.5));
    }
    {
        const auto ops = build_operators(2);
        const auto m = moments(DensityMatrix::pure(dicke_state(2, 0.0)), ops);
        CHECK(std::abs(m.first[2]) <= 1e-15);
        CHECK(m.second(0, 0) == doctest::Approx(1.0));
        CHECK(m.second(1, 1) == doctest::Approx(1.0));
        CHECK(std::abs(m.second(2, 2)) <= 1e-15);
    }
    const auto ops = build_operators(4);
    CHECK_THROWS_AS(moments(DensityMatrix::maximally_mixed(3), ops), ShapeError);
}

TEST_CASE("moment invariants for random states") {
    std::mt19937_64 rng(5);
    for (int n : {1, 2, 5, 12}) {
        const auto ops = build_operators(n);
        for (int trial = 0; trial < 10; ++trial) {
            const DensityMatrix rho(trial % 2 ? oracle::random_pure(n + 1, rng)
                                              : oracle::random_density(n + 1, rng));
            const auto m = moments(rho, ops);
            const double j = m.j();
            for (int a = 0; a < 3; ++a) {
                CHECK(std::abs(m.first[a]) <= j + 1e-12);
                CHECK(m.second(a, a) >= -1e-12);
                CHECK(m.second(a, a) <= j * j + 1e-12);
            }
            CHECK(m.second.trace() == doctest::Approx(j * (j + 1.0)).epsilon(1e-10));
            CHECK((m.second - m.second.transpose()).cwiseAbs().maxCoeff() == 0.0);
            const Complex jp = expectation(ops.jplus, rho);
            CHECK(std::abs(m.jplus - jp) <= 1e-12);
            CHECK(std::abs(m.jplus - Complex(m.first[0], m.first[1])) <= 1e-12);
        }
    }
}

TEST_CASE("moments of Dicke states follow ladder algebra") {
    for (int n : {3, 8}) {
        const auto ops = build_operators(n);
        const double j = ops.j;
        for (int k = 0; k <= n; ++k) {
            const double mz = j - k;
            const auto m = moments(DensityMatrix::pure(dicke_state(n, mz)), ops);
            CHECK(m.first[2] == doctest::Approx(mz));
            CHECK(m.second(0, 0) == doctest::Approx(0.5 * (j * (j + 1) - mz * mz)));
            CHECK(std::abs(m.jplus_jminus - Complex(j * (j + 1) - mz * mz + mz, 0.0)) <= 1e-10);
            CHECK(std::abs(m.jplus_sq) <= 1e-12);
        }
    }
}

TEST_CASE("trace distance and fidelity") {
    const auto a = DensityMatrix::pure(dicke_state(3, 1.5));
    const auto b = DensityMatrix::pure(dicke_state(3, -1.5));
    CHECK(trace_distance(a, b) == doctest::Approx(1.0));
    CHECK(trace_distance(a, a) <= 1e-15);
    CHECK(fidelity(a, dicke_state(3, 1.5)) == doctest::Approx(1.0));
    CHECK(fidelity(a, dicke_state(3, 0.5)) == doctest::Approx(0.0));
}

TEST_CASE("Jx vanishes on the driven steady state") {
    const auto ops = build_operators(100);
    const auto ss = crf_exact_steady_state(CrfParams{0.2, 0.4, 100}, ops);
    CHECK(std::abs(expectation(ops.jx, ss.rho)) <= 0.02 * ops.j);
}
