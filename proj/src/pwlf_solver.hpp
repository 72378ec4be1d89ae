/* Copyright 2026 The supreg Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <Eigen/Dense>

namespace supreg::pwlf::detail {

inline constexpr int kMaxColumns = 16;

using SmallMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxColumns, kMaxColumns>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxColumns, 1>;

struct Solution {
    SmallVector coef;
    double ssr = 0.0;
};

/// Minimises ||A c - y||^2 given G = A'A, h = A'y, yy = y'y, with c[0] free
/// and c[1..] >= 0. Lawson-Hanson active set; returns immediately when the
/// unconstrained solution is already feasible.
Solution solve_nonnegative(const SmallMatrix& gram, const SmallVector& rhs, double yy);

/// Quadratic objective c'Gc - 2h'c + yy, clamped at zero.
double quadratic_ssr(const SmallMatrix& gram, const SmallVector& rhs, double yy,
                     const SmallVector& coef);

} // namespace supreg::pwlf::detail
