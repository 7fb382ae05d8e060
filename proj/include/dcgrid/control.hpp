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

#include <limits>

namespace dcgrid {

// ============================================================================
// PI control
// ============================================================================

/// Discrete PI controller, backward Euler integration, output clamp and
/// optional conditional-integration anti-windup.
struct PiController {
    double k_p = 0.0;
    double k_i = 0.0;   ///< 1/s
    double integ = 0.0; ///< integrator state, in output units
    double u_min = 0.0;
    double u_max = 1.0;
    bool anti_windup = true;
};

/// Advances the integrator by k_i*error*dt and returns
/// clamp(k_p*error + integ, u_min, u_max). With anti-windup the integrator is
/// left untouched when the unclamped output is saturated in the direction the
/// error pushes it.
double pi_step(PiController& ctrl, double error, double dt);

/// Parallel-form PID gains Kp (1 + 1/(Ti s) + Td s). Ti is +inf for a
/// proportional-only rule.
struct PidGains {
    double k_p = 0.0;
    double t_i = std::numeric_limits<double>::infinity();
    double t_d = 0.0;
};

enum class ZnRule { P, PI, PID };

/// Classic Ziegler-Nichols ultimate-gain table.
PidGains ziegler_nichols(double k_u, double t_u, ZnRule rule);

// ============================================================================
// Maximum power point tracking
// ============================================================================

/// Perturb-and-observe tracker acting directly on a converter duty cycle.
struct MpptTracker {
    double duty = 0.5;
    double delta_d = 0.01;
    double period = 2.0; ///< s between power samples
    double duty_min = 0.05;
    double duty_max = 0.95;
    double deadband = 1e-4; ///< |dP| at or below this (W) counts as no change
    double p_prev = 0.0;
    int dir = +1;
    double next_t = 0.0;
    /// Slack when comparing `now` with next_t, so callers on a fixed step
    /// grid fire on the sample nearest the schedule.
    double time_tolerance = 0.0;
};

/// Outcome of one tracker evaluation.
struct MpptUpdate {
    bool fired = false; ///< false when called before next_t
    double power = 0.0;
    double delta_p = 0.0;
};

/// Samples v*i once per period. Rising power keeps the perturbation
/// direction, falling power reverses it, a change inside the dead-band holds
/// the duty. Returns the (clamped) duty command.
double mppt_step(MpptTracker& tr, double v, double i, double now);
double mppt_step(MpptTracker& tr, double v, double i, double now, MpptUpdate& info);

/// Fractional open-circuit-voltage reference k*v_oc. Requires v_oc > 0 and
/// 0 < k < 1.
double fractional_voc_ref(double v_oc_meas, double k = 0.76);

} // namespace dcgrid
