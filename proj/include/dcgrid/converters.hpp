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

#include <complex>
#include <vector>

namespace dcgrid {

// ============================================================================
// Duty-averaged converter dynamics
// ============================================================================

struct ConverterParams {
    double l = 0.0;     ///< inductance (H)
    double c = 0.0;     ///< output capacitance (F)
    double r_nom = 0.0; ///< nominal load for small-signal modelling (ohm)
};

struct ConverterState {
    double i_l = 0.0; ///< inductor current (A)
    double v_c = 0.0; ///< output capacitor voltage (V)
};

struct StateDerivative {
    double di_l = 0.0; ///< A/s
    double dv_c = 0.0; ///< V/s
};

/// Averaged CCM buck: L di/dt = d*v_in - v_c, C dv/dt = i_l - i_out.
/// The freewheeling diode keeps i_l >= 0: at i_l <= 0 a negative di/dt is
/// floored to zero.
StateDerivative buck_derivatives(const ConverterParams& p, const ConverterState& st, double v_in, double d,
                                 double i_out);

/// Averaged CCM boost with d' = 1 - d: L di/dt = v_in - d'*v_c,
/// C dv/dt = d'*i_l - i_out. Same i_l >= 0 guard as the buck.
StateDerivative boost_derivatives(const ConverterParams& p, const ConverterState& st, double v_in, double d,
                                  double i_out);

/// Battery management operating modes. The numeric values follow the
/// Mode 1/2/3 numbering used in traces.
enum class Mode { Charge = 1, Discharge = 2, Idle = 3 };

const char* mode_name(Mode m) noexcept;

/// Half-bridge between battery (inductor side) and bus (capacitor side).
/// i_l > 0 charges the battery. In Charge mode d is the buck duty of the
/// bus-side switch; in Discharge mode d is the boost duty of the low-side
/// switch. In Idle the converter is off and nothing moves. dv_c is the
/// bus-side capacitor derivative with no external load on the capacitor.
StateDerivative bidir_derivatives(const ConverterParams& p, const ConverterState& st, double v_batt,
                                  double v_bus, double d, Mode mode);

/// Current drawn from (positive) or returned to (negative) the bus side by
/// the bidirectional converter.
double bidir_bus_current(const ConverterState& st, double d, Mode mode) noexcept;

// ============================================================================
// Small-signal transfer functions
// ============================================================================

/// Rational function of the Laplace variable. Coefficients are ascending in
/// s: num = {b0, b1, ...} means b0 + b1*s + ...
struct TransferFunction {
    std::vector<double> num;
    std::vector<double> den;
};

/// Control-to-output buck model (v_out/d) / (1 + s L/R + s^2 L C).
TransferFunction buck_tf(const ConverterParams& p, double v_out, double d);

/// Control-to-output boost model with d' = 1 - d:
/// (v_out/d') (1 - s L/(d'^2 R)) / (1 + s L/(d'^2 R) + s^2 L C/d'^2).
/// The numerator carries the right-half-plane zero at d'^2 R / L.
TransferFunction boost_tf(const ConverterParams& p, double v_out, double d);

/// num(s)/den(s) by Horner evaluation; throws PoleHit if |den(s)| < 1e-15.
std::complex<double> tf_eval(const TransferFunction& tf, std::complex<double> s);

/// Horner evaluation of an ascending coefficient list.
std::complex<double> poly_eval(const std::vector<double>& coeffs, std::complex<double> s) noexcept;

} // namespace dcgrid
