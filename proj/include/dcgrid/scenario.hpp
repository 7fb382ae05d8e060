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
#include "dcgrid/control.hpp"
#include "dcgrid/converters.hpp"
#include "dcgrid/power_mgmt.hpp"
#include "dcgrid/profile.hpp"
#include "dcgrid/sources.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcgrid {

using ProfileSet = std::map<std::string, Profile, std::less<>>;

/// A scalar input that is either a constant or bound to a named profile.
struct Signal {
    double constant = 0.0;
    std::string profile; ///< empty = constant

    bool bound() const noexcept { return !profile.empty(); }
    double eval(const ProfileSet& profiles, double t) const;
};

enum class SourceKind { Pv, WindMg };

struct SourceSpec {
    std::string name;
    SourceKind kind = SourceKind::Pv;
    // kind == Pv
    PvPanel pv;
    Signal irradiance;
    // kind == WindMg
    WindMG wind;
    Signal wind_speed;
    std::optional<double> omega_init; ///< default: steady speed at t = 0
};

enum class ConverterKind { Buck, Boost, Bidirectional };
enum class ControlMode { Fixed, Voltage, Mppt };

/// Output-voltage regulation. The PI output is added to the operating-point
/// duty (duty_nominal), so the small-signal gains act on the perturbation.
struct VoltageControl {
    double v_ref = 0.0;
    double k_p = 0.0;
    double k_i = 0.0;
    std::optional<double> duty_nominal; ///< default: ideal gain law at t = 0
    double duty_min = 0.0;
    double duty_max = 0.95;
    bool anti_windup = true;
};

struct MpptControl {
    double duty_init = 0.5;
    double delta_d = 0.01;
    double period = 2.0;
    double duty_min = 0.05;
    double duty_max = 0.95;
    double deadband = 1e-4;
};

struct ConverterSpec {
    std::string name;
    ConverterKind kind = ConverterKind::Buck;
    std::string input; ///< source name, or "battery" for the bidirectional unit
    ConverterParams params;
    double c_in = 0.0;                ///< input capacitance (F); required for PV inputs
    std::optional<double> v_in_init;  ///< default: source open-circuit voltage
    double r_loss = 0.0;              ///< series inductor resistance (ohm); 0 = lossless
    ControlMode control = ControlMode::Fixed;
    double fixed_duty = 0.5;
    VoltageControl voltage;
    MpptControl mppt;
    double current_loop_tau = 1e-3; ///< bidirectional inner current loop time constant (s)
    std::optional<double> rating_w;
    double diode_rating_a = kDefaultDiodeRating;
};

struct BatterySpec {
    Battery battery;
    std::optional<double> band; ///< default 1 % of bus v_ref
    double i_charge_max = 10.0;
    double i_discharge_max = 10.0;
    double k_p = 2.0;  ///< A/V
    double k_i = 50.0; ///< A/(V s)
    double reentry_margin = 0.02;
    Mode initial_mode = Mode::Idle;
};

struct LoadSpec {
    std::string name;
    LoadKind kind = LoadKind::Resistive;
    Signal resistance;
    Signal power;
    std::optional<double> v_min; ///< default 10 % of bus v_ref
};

struct BusSpec {
    double v_ref = 0.0;
    double c_bus = 0.0;
    std::optional<double> v_init; ///< default v_ref
    double diode_drop = 0.0;      ///< forward drop of each source-port diode (V)
    double port_resistance = 0.0; ///< series resistance of every converter port (ohm)
};

struct SimConfig {
    double dt = 5e-5;
    double t_end = 0.0;
    int log_every = 100;

    std::int64_t steps() const noexcept;
};

struct Scenario {
    std::vector<SourceSpec> sources;
    std::vector<ConverterSpec> converters;
    std::optional<BatterySpec> battery;
    std::vector<LoadSpec> loads;
    BusSpec bus;
    ProfileSet profiles;
    SimConfig sim;

    bool has_losses() const noexcept;
};

/// Parses and validates a scenario document. Throws ParseError,
/// ValidationError or DanglingReference.
Scenario parse_scenario(std::string_view json_text);

/// Reads the file then parse_scenario(). Throws IoError if unreadable.
Scenario load_scenario(const std::filesystem::path& path);

/// Re-checks every invariant of an in-memory scenario (parse_scenario calls
/// this); throws like parse_scenario.
void validate_scenario(const Scenario& sc);

std::string read_text_file(const std::filesystem::path& path);

} // namespace dcgrid
