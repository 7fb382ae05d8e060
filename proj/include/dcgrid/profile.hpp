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

#include <string>
#include <utility>
#include <vector>

namespace dcgrid {

enum class Interpolation { Step, Linear };

/// Piecewise time series (irradiance, wind speed, load demand, ...).
/// Times are strictly increasing; values are clamped outside the covered span.
struct Profile {
    std::vector<std::pair<double, double>> points;
    Interpolation interpolation = Interpolation::Linear;
};

double eval_profile(const Profile& p, double t);

/// Throws ValidationError(field) when the profile is empty or its times are
/// not strictly increasing / finite.
void validate_profile(const Profile& p, const std::string& field);

} // namespace dcgrid
