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

#include "collspin/spin_algebra.hpp"

namespace collspin {

/// Spin Q-function sampled on Gauss-Legendre nodes in cos(theta) and a
/// uniform azimuth grid. theta is measured from the <J_z> = +j pole and phi
/// from the +x axis towards +y.
struct QGrid {
    int n = 0;
    std::vector<double> theta;          ///< ascending, theta_res entries
    std::vector<double> theta_weights;  ///< Gauss-Legendre weights in cos(theta)
    std::vector<double> phi;            ///< 2 pi k / phi_res
    Eigen::MatrixXd values;             ///< theta_res x phi_res

    int theta_res() const noexcept { return static_cast<int>(theta.size()); }
    int phi_res() const noexcept { return static_cast<int>(phi.size()); }

    /// (2j + 1) / (4 pi) times the quadrature of Q over the sphere.
    double normalization() const;
};

/// Resolutions at which the normalization quadrature is exact for N atoms.
int default_theta_res(int n);
int default_phi_res(int n);

/// Q(theta, phi) = <theta, phi| rho |theta, phi>. Throws InvalidParameter
/// when either resolution is below 8.
QGrid q_function(const DensityMatrix& rho, int theta_res, int phi_res);
QGrid q_function(const DensityMatrix& rho);

struct QPeak {
    int theta_index = 0;
    int phi_index = 0;
    double theta = 0.0;
    double phi = 0.0;
    double value = 0.0;
};

/// Local maxima of the grid at or above threshold_fraction * global max, with
/// adjacent maximal cells merged into one peak. Azimuth wraps around and each
/// pole row counts as a single neighbourhood. Sorted by decreasing value.
/// Throws InvalidParameter unless 0 < threshold_fraction < 1.
std::vector<QPeak> peak_census(const QGrid& q, double threshold_fraction = 0.5);

}  // namespace collspin
