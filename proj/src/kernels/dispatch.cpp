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

#include <cstdlib>
#include <stdexcept>
#include <string_view>

namespace dcgrid::kernels {

const char* isa_name(Isa isa) noexcept
{
    switch (isa) {
    case Isa::Scalar:
        return "scalar";
    case Isa::Avx2:
        return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept
{
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
#if defined(DCGRID_HAVE_AVX2_KERNEL)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    }
    return false;
}

Isa active_isa() noexcept
{
    static const Isa chosen = [] {
        if (const char* env = std::getenv("DCGRID_ISA"); env && std::string_view(env) == "scalar")
            return Isa::Scalar;
        return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
    }();
    return chosen;
}

void pv_current_batch(const PvPanel& panel, double g, std::span<const double> v, std::span<double> i, Isa isa)
{
    if (v.size() != i.size())
        throw std::invalid_argument("pv_current_batch: span sizes differ");
    if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) {
        avx2::pv_current_batch(panel, g, v, i);
        return;
    }
    scalar::pv_current_batch(panel, g, v, i);
}

void pv_current_batch(const PvPanel& panel, double g, std::span<const double> v, std::span<double> i)
{
    pv_current_batch(panel, g, v, i, active_isa());
}

} // namespace dcgrid::kernels
