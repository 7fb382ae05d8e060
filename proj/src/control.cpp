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

#include "dcgrid/control.hpp"

#include <algorithm>
#include <stdexcept>

namespace dcgrid {

double pi_step(PiController& ctrl, double error, double dt)
{
    const double candidate = ctrl.integ + ctrl.k_i * error * dt;
    const double u_raw = ctrl.k_p * error + candidate;

    bool hold = false;
    if (ctrl.anti_windup) {
        const double push = ctrl.k_i * error;
        hold = (u_raw > ctrl.u_max && push > 0.0) || (u_raw < ctrl.u_min && push < 0.0);
    }
    if (!hold)
        ctrl.integ = candidate;

    return std::clamp(ctrl.k_p * error + ctrl.integ, ctrl.u_min, ctrl.u_max);
}

PidGains ziegler_nichols(double k_u, double t_u, ZnRule rule)
{
    if (!(k_u > 0.0) || !(t_u > 0.0))
        throw std::invalid_argument("ziegler_nichols: k_u and t_u must be > 0");
    switch (rule) {
    case ZnRule::P:
        return {0.5 * k_u, std::numeric_limits<double>::infinity(), 0.0};
    case ZnRule::PI:
        return {0.45 * k_u, t_u / 1.2, 0.0};
    case ZnRule::PID:
        return {0.6 * k_u, t_u / 2.0, t_u / 8.0};
    }
    throw std::invalid_argument("ziegler_nichols: unknown rule");
}

double mppt_step(MpptTracker& tr, double v, double i, double now, MpptUpdate& info)
{
    info = {};
    if (now < tr.next_t - tr.time_tolerance)
        return tr.duty;

    const double p = v * i;
    const double dp = p - tr.p_prev;
    if (dp > tr.deadband) {
        tr.duty += tr.dir * tr.delta_d;
    } else if (dp < -tr.deadband) {
        tr.dir = -tr.dir;
        tr.duty += tr.dir * tr.delta_d;
    }
    tr.duty = std::clamp(tr.duty, tr.duty_min, tr.duty_max);
    tr.p_prev = p;
    tr.next_t += tr.period;

    info.fired = true;
    info.power = p;
    info.delta_p = dp;
    return tr.duty;
}

double mppt_step(MpptTracker& tr, double v, double i, double now)
{
    MpptUpdate ignored;
    return mppt_step(tr, v, i, now, ignored);
}

double fractional_voc_ref(double v_oc_meas, double k)
{
    if (!(v_oc_meas > 0.0))
        throw std::invalid_argument("fractional_voc_ref: v_oc must be > 0");
    if (!(k > 0.0 && k < 1.0))
        throw std::invalid_argument("fractional_voc_ref: k must lie in (0, 1)");
    return k * v_oc_meas;
}

} // namespace dcgrid
