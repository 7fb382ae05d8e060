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

#include "dcgrid/power_mgmt.hpp"

#include <algorithm>

namespace dcgrid {

BatteryStep battery_step(const Battery& b, double i, double dt)
{
    const double soc = std::clamp(b.soc + i * dt / (3600.0 * b.capacity_ah), 0.0, 1.0);
    return {soc, battery_ocv(b, soc) + i * b.r_int};
}

Mode select_mode(ModeController& mc, double v_bus, double soc)
{
    if (soc >= mc.soc_max)
        mc.full_latched = true;
    else if (mc.full_latched && soc < mc.soc_max - mc.reentry_margin)
        mc.full_latched = false;

    const bool can_charge = !mc.full_latched;
    const bool can_discharge = soc > mc.soc_min;

    Mode next = mc.mode;
    if (v_bus > mc.v_ref + mc.band) {
        next = can_charge ? Mode::Charge : Mode::Idle;
    } else if (v_bus < mc.v_ref - mc.band) {
        next = can_discharge ? Mode::Discharge : Mode::Idle;
    } else {
        if (next == Mode::Charge && !can_charge)
            next = Mode::Idle;
        if (next == Mode::Discharge && !can_discharge)
            next = Mode::Idle;
    }

    if (next != mc.mode) {
        mc.pi.integ = 0.0;
        mc.mode = next;
    }
    return next;
}

double bidir_current_command(ModeController& mc, double v_bus, double dt)
{
    switch (mc.mode) {
    case Mode::Charge:
        mc.pi.u_min = 0.0;
        mc.pi.u_max = mc.i_charge_max;
        break;
    case Mode::Discharge:
        mc.pi.u_min = -mc.i_discharge_max;
        mc.pi.u_max = 0.0;
        break;
    case Mode::Idle:
        return 0.0;
    }
    return pi_step(mc.pi, v_bus - mc.v_ref, dt);
}

} // namespace dcgrid
