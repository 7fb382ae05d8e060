/* dcgrid - DC microgrid simulation engine
 * Copyright (c) 2026 The dcgrid Authors
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

#include "dcgrid/converters.hpp"

#include <complex>
#include <vector>

namespace dcgrid {

enum class RouthStatus {
    Ok,
    /// An entire row vanished (roots symmetric about the origin, or a root at
    /// s = 0). The tabulation stops there and `stable` is false.
    DegenerateRow,
};

struct RouthResult {
    /// rows[0] is the s^n row; zero-padded to a common width.
    std::vector<std::vector<double>> table;
    bool stable = false;
    RouthStatus status = RouthStatus::Ok;
    int sign_changes = 0;
    int degenerate_row = -1; ///< index of the vanished row, -1 if none
    int epsilon_substitutions = 0;

    std::vector<double> first_column() const;
};

/// Routh-Hurwitz tabulation of a polynomial given in ascending coefficient
/// order. Requires order >= 1 and a non-zero leading coefficient. A zero
/// first-column entry in an otherwise non-zero row is replaced by 1e-12 of
/// the row's largest magnitude.
RouthResult routh_array(const std::vector<double>& coeffs);

/// All complex roots by Durand-Kerner iteration, sorted by real part then
/// imaginary part. Throws NoConvergence when the relative residual does not
/// drop below 1e-10 within the iteration cap.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

/// Characteristic polynomial s*den(s) + (k_p*s + k_i)*num(s) of the plant
/// under unity feedback with a PI controller (ascending coefficients).
std::vector<double> pi_closed_loop_polynomial(const TransferFunction& plant, double k_p, double k_i);

struct KpBound {
    double k_p_max = 0.0;
    /// Stable all the way to the search cap; k_p_max then equals the cap.
    bool unconditional = false;
};

inline constexpr double kKpSearchCap = 1e6;

/// Largest proportional gain keeping the PI loop Routh-stable, found by a
/// logarithmic scan upward from 0+ followed by bisection on the first
/// stable-to-unstable transition. Throws NoStableGain when the loop is
/// unstable even for vanishing k_p.
KpBound max_stable_kp(const TransferFunction& plant, double k_i);

} // namespace dcgrid
