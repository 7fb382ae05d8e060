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

namespace dcgrid {

/// Single-diode five-parameter photovoltaic panel.
///
/// The panel current solves the implicit characteristic
///
///     i = i_ph*(g/g_stc) - i_0*(exp((v + i*r_s)/n_vt) - 1) - (v + i*r_s)/r_sh
///
/// where n_vt lumps ideality factor, series cell count and thermal voltage.
struct PvPanel {
    double i_ph_stc = 0.0; ///< photocurrent at reference irradiance (A)
    double i_0 = 0.0;      ///< diode saturation current (A)
    double n_vt = 0.0;     ///< modified thermal voltage (V)
    double r_s = 0.0;      ///< series resistance (ohm)
    double r_sh = 0.0;     ///< shunt resistance (ohm)
    double g_stc = 1000.0; ///< reference irradiance (W/m^2)
};

/// Wind turbine emulated by a DC motor driving a DC generator.
struct WindMG {
    double k_e = 0.0; ///< generator back-EMF constant (V s/rad)
    double r_a = 0.0; ///< armature resistance (ohm)
    double k_w = 0.0; ///< wind speed to shaft speed gain (rad/s per m/s)
    double tau = 0.0; ///< first-order shaft speed lag (s); 0 = instantaneous
};

/// Newton tolerance on the implicit PV equation residual (A).
inline constexpr double kPvTolerance = 1e-9;
inline constexpr int kPvMaxIterations = 100;

/// Panel current at terminal voltage v and irradiance g. Requires v >= 0 and
/// g >= 0 (std::invalid_argument otherwise). Throws NoConvergence when the
/// damped Newton iteration does not reach kPvTolerance.
double pv_current(const PvPanel& panel, double v, double g);

/// Same solve without the v >= 0 precondition; the engine uses it for the
/// input-capacitor voltage, which may dip marginally below zero mid-step.
double pv_current_unchecked(const PvPanel& panel, double v, double g);

/// Residual of the implicit equation at (v, i); zero at the solution.
double pv_residual(const PvPanel& panel, double v, double i, double g);

/// Voltage at which the panel current is zero (0 when g == 0).
double pv_open_circuit_voltage(const PvPanel& panel, double g);

struct MaxPowerPoint {
    double v_mpp = 0.0;
    double p_mpp = 0.0;
};

/// Resolution of the brute-force maximum power point sweep (V).
inline constexpr double kMppSweepStep = 1e-3;

/// Exhaustive sweep of v over [0, v_oc] in kMppSweepStep increments; returns
/// the grid point of highest power. Requires g > 0.
MaxPowerPoint mpp_oracle(const PvPanel& panel, double g);

struct WindTerminal {
    double v_terminal = 0.0;
    double omega = 0.0;
};

/// Advances the shaft speed by dt toward k_w*wind (exact first-order lag) and
/// returns the armature terminal voltage under load current i_load.
WindTerminal wind_terminal(const WindMG& mg, double wind, double i_load, double omega_prev, double dt);

/// Terminal voltage for a given shaft speed, floored at zero.
inline double wind_voltage(const WindMG& mg, double omega, double i_load)
{
    const double v = mg.k_e * omega - mg.r_a * i_load;
    return v > 0.0 ? v : 0.0;
}

} // namespace dcgrid
