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

#include "collspin/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>

#include <gsl/gsl_integration.h>

#include "collspin/errors.hpp"

namespace collspin {

namespace {

using std::numbers::pi;

struct GlTableDeleter {
    void operator()(gsl_integration_glfixed_table* t) const { gsl_integration_glfixed_table_free(t); }
};

// Neighbour cells of (i, k); the first and last rows also see their whole row.
template <typename Visit>
void for_each_neighbour(int i, int k, int rows, int cols, Visit&& visit) {
    for (int di = -1; di <= 1; ++di) {
        const int r = i + di;
        if (r < 0 || r >= rows) continue;
        for (int dk = -1; dk <= 1; ++dk) {
            if (di == 0 && dk == 0) continue;
            visit(r, ((k + dk) % cols + cols) % cols);
        }
    }
    if (i == 0 || i == rows - 1) {
        for (int c = 0; c < cols; ++c) {
            if (c != k) visit(i, c);
        }
    }
}

int find_root(std::vector<int>& parent, int x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}  // namespace

double QGrid::normalization() const {
    const double dphi = 2.0 * pi / phi_res();
    double total = 0.0;
    for (int i = 0; i < theta_res(); ++i) {
        total += theta_weights[i] * values.row(i).sum() * dphi;
    }
    return (n + 1.0) / (4.0 * pi) * total;
}

int default_theta_res(int n) { return std::max(64, n + 2); }
int default_phi_res(int n) { return std::max(128, 2 * n + 2); }

QGrid q_function(const DensityMatrix& rho, int theta_res, int phi_res) {
    if (theta_res < 8 || phi_res < 8) {
        throw InvalidParameter("q_function: resolutions must be >= 8, got " +
                               std::to_string(theta_res) + " x " + std::to_string(phi_res));
    }
    const int n = rho.atom_count();
    const Index d = rho.dim();
    const Matrix& r = rho.matrix();

    QGrid q;
    q.n = n;
    q.theta.resize(theta_res);
    q.theta_weights.resize(theta_res);
    q.phi.resize(phi_res);
    q.values.resize(theta_res, phi_res);

    std::unique_ptr<gsl_integration_glfixed_table, GlTableDeleter> table(
        gsl_integration_glfixed_table_alloc(static_cast<size_t>(theta_res)));
    for (int i = 0; i < theta_res; ++i) {
        double x = 0.0;
        double w = 0.0;
        // Nodes come out ascending in cos(theta); reverse for ascending theta.
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(theta_res - 1 - i), &x, &w,
                                      table.get());
        q.theta[i] = std::acos(std::clamp(x, -1.0, 1.0));
        q.theta_weights[i] = w;
    }
    for (int k = 0; k < phi_res; ++k) q.phi[k] = 2.0 * pi * k / phi_res;

    // Q = sum_{r,s} a_r a_s rho_rs e^{i (s - r) phi}; collect each diagonal offset once.
    std::vector<Complex> offset_sum(static_cast<size_t>(d));
    for (int i = 0; i < theta_res; ++i) {
        const Eigen::VectorXd a = coherent_magnitudes(n, q.theta[i]);
        for (Index delta = 0; delta < d; ++delta) {
            Complex acc{};
            for (Index row = 0; row + delta < d; ++row) {
                acc += a(row) * a(row + delta) * r(row, row + delta);
            }
            offset_sum[delta] = acc;
        }
        for (int k = 0; k < phi_res; ++k) {
            const Complex step = std::polar(1.0, q.phi[k]);
            Complex phase{1.0, 0.0};
            double value = offset_sum[0].real();
            for (Index delta = 1; delta < d; ++delta) {
                phase *= step;
                value += 2.0 * (offset_sum[delta] * phase).real();
            }
            q.values(i, k) = std::clamp(value, 0.0, 1.0);
        }
    }
    return q;
}

QGrid q_function(const DensityMatrix& rho) {
    const int n = rho.atom_count();
    return q_function(rho, default_theta_res(n), default_phi_res(n));
}

std::vector<QPeak> peak_census(const QGrid& q, double threshold_fraction) {
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
        throw InvalidParameter("peak_census: threshold_fraction must lie in (0, 1)");
    }
    const int rows = q.theta_res();
    const int cols = q.phi_res();
    const double cutoff = threshold_fraction * q.values.maxCoeff();

    std::vector<char> is_max(static_cast<size_t>(rows) * cols, 0);
    auto cell = [cols](int i, int k) { return i * cols + k; };
    for (int i = 0; i < rows; ++i) {
        for (int k = 0; k < cols; ++k) {
            const double v = q.values(i, k);
            if (v < cutoff) continue;
            bool top = true;
            for_each_neighbour(i, k, rows, cols, [&](int r, int c) {
                if (q.values(r, c) > v) top = false;
            });
            is_max[cell(i, k)] = top;
        }
    }

    std::vector<int> parent(is_max.size());
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < rows; ++i) {
        for (int k = 0; k < cols; ++k) {
            if (!is_max[cell(i, k)]) continue;
            for_each_neighbour(i, k, rows, cols, [&](int r, int c) {
                if (is_max[cell(r, c)]) {
                    parent[find_root(parent, cell(r, c))] = find_root(parent, cell(i, k));
                }
            });
        }
    }

    std::vector<QPeak> peaks;
    for (int i = 0; i < rows; ++i) {
        for (int k = 0; k < cols; ++k) {
            if (is_max[cell(i, k)] && find_root(parent, cell(i, k)) == cell(i, k)) {
                peaks.push_back({i, k, q.theta[i], q.phi[k], q.values(i, k)});
            }
        }
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const QPeak& a, const QPeak& b) { return a.value > b.value; });
    return peaks;
}

}  // namespace collspin
