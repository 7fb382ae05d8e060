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

#include "dcgrid/trace.hpp"

#include <limits>
#include <string>
#include <vector>

namespace dcgrid {

// ----------------------------------------------------------------------------
// Loads
// ----------------------------------------------------------------------------

enum class LoadKind { Resistive, ConstantPower };

struct Load {
    LoadKind kind = LoadKind::Resistive;
    double resistance = 0.0; ///< ohm, resistive loads
    double power = 0.0;      ///< W, constant-power loads
    double v_min = 0.0;      ///< V, CPL guard below which current stops growing
};

/// Resistive: v/R. Constant power: P / max(v, v_min).
double load_current(const Load& l, double v);

// ----------------------------------------------------------------------------
// Bus node
// ----------------------------------------------------------------------------

enum class PortKind { Source, Battery, Load };

/// One connection to the bus. `current` is the injection into the bus for
/// Source/Battery ports and the drawn current for Load ports. Source ports
/// sit behind an ideal series diode: they contribute only when current > 0
/// and the converter-side voltage is not below the bus voltage.
struct BusPort {
    PortKind kind = PortKind::Source;
    double current = 0.0;
    double v_source = std::numeric_limits<double>::infinity();
};

struct DcBus {
    double c_bus = 0.0;
    double v = 0.0;
};

/// Current actually delivered through a source port's diode.
double diode_guard(const BusPort& port, double v_bus) noexcept;

/// Net current into the bus capacitance (injections minus loads).
double bus_net_current(const std::vector<BusPort>& ports, double v_bus) noexcept;

/// Explicit step of c_bus dv/dt = net current. The engine integrates the same
/// balance inside its Runge-Kutta stages.
double bus_step(const DcBus& bus, const std::vector<BusPort>& ports, double dt);

// ----------------------------------------------------------------------------
// Rating checks
// ----------------------------------------------------------------------------

/// Converters should run at no more than this fraction of their rated power
/// when paralleled.
inline constexpr double kConverterDerating = 0.75;
/// Default current rating of the series diode on each paralleled output (A).
inline constexpr double kDefaultDiodeRating = 30.0;

struct ConverterRating {
    std::string converter; ///< trace signal "<converter>.p_out" is checked
    double rated_w = 0.0;
};

struct DiodeRating {
    std::string converter; ///< trace signal "<converter>.i_port" is checked
    double rated_a = kDefaultDiodeRating;
};

enum class ViolationKind { ConverterPower, DiodeCurrent };

struct RatingViolation {
    std::string component;
    ViolationKind kind = ViolationKind::ConverterPower;
    double t_start = 0.0; ///< first offending sample
    double t_end = 0.0;   ///< last offending sample of the contiguous run
    double peak = 0.0;
    double limit = 0.0;
};

/// Scans the trace for contiguous runs where |p_out| exceeds 75 % of a
/// converter's rating or a port diode carries more than its rated current.
/// One record per run, ordered by component (ratings order) then time.
std::vector<RatingViolation> rating_check(const std::vector<ConverterRating>& converter_ratings,
                                          const std::vector<DiodeRating>& diode_ratings,
                                          const TraceLog& trace);

std::string violations_to_json(const std::vector<RatingViolation>& v);
std::string violations_to_text(const std::vector<RatingViolation>& v);

} // namespace dcgrid
