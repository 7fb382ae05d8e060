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

#include "dcgrid/control.hpp"
#include "dcgrid/converters.hpp"

namespace dcgrid {

/// Linear-OCV battery with an ohmic internal resistance.
struct Battery {
    double capacity_ah = 0.0;
    double soc = 0.5;
    double v_full = 0.0;  ///< open-circuit voltage at soc = 1
    double v_empty = 0.0; ///< open-circuit voltage at soc = 0
    double r_int = 0.0;
    double soc_min = 0.2;
    double soc_max = 0.95;
};

inline double battery_ocv(const Battery& b, double soc) noexcept
{
    return b.v_empty + soc * (b.v_full - b.v_empty);
}

struct BatteryStep {
    double soc = 0.0;
    double v_terminal = 0.0;
};

/// Coulomb counting over dt with current i (positive charges the battery);
/// soc is clamped to [0, 1] and the terminal voltage is evaluated at the new
/// soc: v = ocv(soc') + i*r_int.
BatteryStep battery_step(const Battery& b, double i, double dt);

/// Three-mode bidirectional converter supervisor with hysteresis around the
/// bus reference, plus the bus-voltage PI that sets the battery current.
struct ModeController {
    double v_ref = 48.0;
    double band = 0.48; ///< hysteresis half-width (V)
    Mode mode = Mode::Idle;
    double i_charge_max = 10.0;
    double i_discharge_max = 10.0;
    double soc_min = 0.2;
    double soc_max = 0.95;
    /// After the battery reaches soc_max, charging resumes only once soc has
    /// fallen below soc_max - reentry_margin.
    double reentry_margin = 0.02;
    bool full_latched = false;
    PiController pi{2.0, 50.0, 0.0, 0.0, 0.0, true};
};

/// Mode 1 (Charge) when the bus is above v_ref + band and the battery can take
/// charge; Mode 2 (Discharge) below v_ref - band while soc > soc_min; Mode 3
/// (Idle) when the battery is full while charging (or empty while
/// discharging). Inside the band the current mode is held. A mode change
/// resets the current-command integrator.
Mode select_mode(ModeController& mc, double v_bus, double soc);

/// Signed battery current setpoint (positive = charge) from the bus-voltage
/// PI. Charge commands lie in [0, i_charge_max], Discharge commands in
/// [-i_discharge_max, 0], Idle is exactly 0.
double bidir_current_command(ModeController& mc, double v_bus, double dt);

} // namespace dcgrid
