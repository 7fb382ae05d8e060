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

#include "dcgrid/kernels.hpp"

namespace dcgrid::kernels::scalar {

void pv_current_batch(const PvPanel& panel, double g, std::span<const double> v, std::span<double> i)
{
    for (std::size_t k = 0; k < v.size(); ++k)
        i[k] = pv_current_unchecked(panel, v[k], g);
}

} // namespace dcgrid::kernels::scalar
