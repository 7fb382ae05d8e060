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

#include "dcgrid/bus.hpp"
#include "dcgrid/scenario.hpp"
#include "dcgrid/trace.hpp"

#include <string>
#include <vector>

namespace dcgrid {

/// Magnitude above which any integrated state counts as a blow-up.
inline constexpr double kBlowupLimit = 1e9;

/// Fixed-step RK4 simulation of one scenario.
///
/// Each step first runs the discrete layer on the pre-step state (MPPT
/// trackers at their cadence, output-voltage PI loops, battery mode
/// selection and current command), then logs, then integrates the
/// continuous state over dt with the duties held.
///
/// Energy accumulators (source, load, battery, loss) are integrated as extra
/// RK4 states so the audit closes to the integrator's own accuracy.
class Simulation {
public:
    /// Validates the scenario (throws like validate_scenario).
    explicit Simulation(Scenario sc);

    const Scenario& scenario() const noexcept { return sc_; }

    /// Trace column names in order.
    std::vector<std::string> signal_names() const;

    /// Runs from t = 0 to t_end. Throws NumericalBlowup when a state leaves
    /// [-kBlowupLimit, kBlowupLimit] or becomes non-finite.
    TraceLog run() const;

private:
    Scenario sc_;
};

/// Convenience: Simulation(sc).run().
TraceLog run(const Scenario& sc);

/// Energy balance between the first and last trace rows.
struct AuditReport {
    double e_src = 0.0;        ///< J delivered by the source terminals
    double e_load = 0.0;       ///< J consumed by the loads
    double e_batt = 0.0;       ///< J into the battery terminals (negative = net discharge)
    double delta_stored = 0.0; ///< change of inductor and capacitor energy
    double e_loss = 0.0;       ///< J dissipated in converter and port resistances
    double e_discarded = 0.0;  ///< inductor energy dropped when the battery converter shuts down
    /// e_src - e_load - e_batt - delta_stored - e_loss - e_discarded
    double residual = 0.0;
    /// Same balance without the loss term; equals e_loss when the model is
    /// consistent.
    double residual_without_loss = 0.0;
    /// |residual| over the largest energy term (0 when all terms vanish).
    double relative_residual = 0.0;
    bool lossy = false;
};

/// Requires the e_* and w_stored columns that Simulation::run() records.
/// Throws std::out_of_range when they are missing or the trace is empty.
AuditReport energy_audit(const TraceLog& trace);

std::string audit_to_json(const AuditReport& a);

/// Rating table for rating_check(): every converter with rating_w, and the
/// port diode of every source converter.
std::vector<ConverterRating> converter_ratings(const Scenario& sc);
std::vector<DiodeRating> diode_ratings(const Scenario& sc);

} // namespace dcgrid
