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

// Batched photovoltaic I-V evaluation. The scalar variant is the reference;
// the AVX2 variant runs four Newton solves per register and is selected at
// runtime when the CPU supports AVX2+FMA. Set DCGRID_ISA=scalar to force the
// reference path.

#include "dcgrid/sources.hpp"

#include <span>

namespace dcgrid::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa) noexcept;

/// True when the variant is compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

/// Best available variant, honouring the DCGRID_ISA override.
Isa active_isa() noexcept;

/// i[k] = pv_current(panel, v[k], g) for every k. Spans must be the same
/// length. Throws NoConvergence if any lane fails to converge.
void pv_current_batch(const PvPanel& panel, double g, std::span<const double> v, std::span<double> i);
void pv_current_batch(const PvPanel& panel, double g, std::span<const double> v, std::span<double> i,
                      Isa isa);

namespace scalar {
void pv_current_batch(const PvPanel& panel, double g, std::span<const double> v, std::span<double> i);
}

namespace avx2 {
void pv_current_batch(const PvPanel& panel, double g, std::span<const double> v, std::span<double> i);
}

} // namespace dcgrid::kernels
