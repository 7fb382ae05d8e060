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

#include "dcgrid/sources.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace dcgrid::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitInput = 2,
    kExitNumerical = 3,
};

/// Entry point of the dcgrid tool; returns the process exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Applies "dotted.path=value" overrides to a scenario document. Array
/// elements are addressed by index ("converters.0.l") or by their "name"
/// ("converters.buck.l"). The value is parsed as JSON, falling back to a
/// plain string. Throws ValidationError for paths that do not exist.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides);

struct SweepRow {
    double g = 0.0;
    double v_mpp = 0.0;
    double p_mpp = 0.0;
    double p_tracked = 0.0;     ///< mean panel power over the final limit cycle
    double p_tracked_min = 0.0; ///< lowest settled sample the tracker observed there
    double duty_min = 0.0;
    double duty_max = 0.0;
    double ratio() const { return p_tracked / p_mpp; }
};

struct SweepConfig {
    double t_end = 60.0;
    double dt = 5e-5;
    int cycle_periods = 4; ///< MPPT periods that make up the evaluated window
    int jobs = 1;
};

/// Oracle maximum power point and P&O tracked power of the canned
/// PV + boost + battery rig for each irradiance level. Requires g > 0.
std::vector<SweepRow> mpp_sweep(const PvPanel& panel, const std::vector<double>& irradiance,
                                const SweepConfig& cfg = {});

/// The canned rig as a scenario document (constant irradiance g).
nlohmann::json mpp_rig_scenario(const PvPanel& panel, double g, const SweepConfig& cfg);

} // namespace dcgrid::cli
