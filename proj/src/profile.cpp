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

#include "dcgrid/profile.hpp"

#include "dcgrid/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dcgrid {

double eval_profile(const Profile& p, double t)
{
    const auto& pts = p.points;
    if (t <= pts.front().first)
        return pts.front().second;
    if (t >= pts.back().first)
        return pts.back().second;

    // first point strictly after t; t lies in [hi-1, hi)
    auto hi = std::upper_bound(pts.begin(), pts.end(), t,
                               [](double x, const auto& pt) { return x < pt.first; });
    auto lo = hi - 1;
    if (p.interpolation == Interpolation::Step)
        return lo->second;
    const double w = (t - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

void validate_profile(const Profile& p, const std::string& field)
{
    if (p.points.empty())
        throw ValidationError(field + ".points", "profile needs at least one point");
    for (std::size_t k = 0; k < p.points.size(); ++k) {
        const auto [t, v] = p.points[k];
        if (!std::isfinite(t) || !std::isfinite(v))
            throw ValidationError(field + ".points[" + std::to_string(k) + "]", "non-finite value");
        if (k > 0 && !(t > p.points[k - 1].first))
            throw ValidationError(field + ".points[" + std::to_string(k) + "]",
                                  "times must be strictly increasing");
    }
}

} // namespace dcgrid
