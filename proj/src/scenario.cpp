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

#include "dcgrid/scenario.hpp"

#include "dcgrid/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dcgrid {

using nlohmann::json;

double Signal::eval(const ProfileSet& profiles, double t) const
{
    if (!bound())
        return constant;
    return eval_profile(profiles.find(profile)->second, t);
}

std::int64_t SimConfig::steps() const noexcept
{
    return std::llround(t_end / dt);
}

bool Scenario::has_losses() const noexcept
{
    if (bus.diode_drop > 0.0 || bus.port_resistance > 0.0)
        return true;
    for (const auto& c : converters)
        if (c.r_loss > 0.0)
            return true;
    return false;
}

namespace {

// ----------------------------------------------------------------------------
// Strict object reader: every key must be consumed, otherwise the document
// carries something we would silently ignore.
// ----------------------------------------------------------------------------

class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(std::string_view key) const
    {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const json* child(const std::string& key)
    {
        seen_.insert(key);
        if (!has(key))
            return nullptr;
        return &j_.at(key);
    }

    double number(const std::string& key)
    {
        const json* c = child(key);
        if (!c)
            throw ValidationError(field(key), "required");
        return as_number(*c, field(key));
    }

    double number(const std::string& key, double fallback)
    {
        const json* c = child(key);
        return c ? as_number(*c, field(key)) : fallback;
    }

    std::optional<double> optional_number(const std::string& key)
    {
        const json* c = child(key);
        if (!c)
            return std::nullopt;
        return as_number(*c, field(key));
    }

    std::string string(const std::string& key)
    {
        const json* c = child(key);
        if (!c)
            throw ValidationError(field(key), "required");
        if (!c->is_string())
            throw ValidationError(field(key), "expected a string");
        return c->get<std::string>();
    }

    std::string string(const std::string& key, std::string fallback)
    {
        return has(key) ? string(key) : (seen_.insert(key), std::move(fallback));
    }

    bool boolean(const std::string& key, bool fallback)
    {
        const json* c = child(key);
        if (!c)
            return fallback;
        if (!c->is_boolean())
            throw ValidationError(field(key), "expected true or false");
        return c->get<bool>();
    }

    int integer(const std::string& key, int fallback)
    {
        const json* c = child(key);
        if (!c)
            return fallback;
        if (!c->is_number_integer() && !c->is_number_unsigned())
            throw ValidationError(field(key), "expected an integer");
        return c->get<int>();
    }

    Signal signal(const std::string& key)
    {
        const json* c = child(key);
        if (!c)
            throw ValidationError(field(key), "required");
        if (c->is_string())
            return {0.0, c->get<std::string>()};
        return {as_number(*c, field(key)), {}};
    }

    void finish() const
    {
        for (const auto& [key, value] : j_.items())
            if (!seen_.contains(key))
                throw ValidationError(field(key), "unknown key");
    }

private:
    static double as_number(const json& j, const std::string& where)
    {
        if (!j.is_number())
            throw ValidationError(where, "expected a number");
        return j.get<double>();
    }

    const json& j_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

std::string indexed(const char* array, std::size_t k)
{
    return std::string(array) + "[" + std::to_string(k) + "]";
}

const json& array_or_empty(ObjectReader& r, const std::string& key)
{
    static const json empty = json::array();
    const json* c = r.child(key);
    if (!c)
        return empty;
    if (!c->is_array())
        throw ValidationError(r.field(key), "expected an array");
    return *c;
}

Mode parse_mode(const std::string& s, const std::string& where)
{
    if (s == "charge")
        return Mode::Charge;
    if (s == "discharge")
        return Mode::Discharge;
    if (s == "idle")
        return Mode::Idle;
    throw ValidationError(where, "expected charge, discharge or idle");
}

SourceSpec read_source(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    SourceSpec s;
    s.name = r.string("name");
    const std::string kind = r.string("kind");
    if (kind == "pv") {
        s.kind = SourceKind::Pv;
        s.pv.i_ph_stc = r.number("i_ph_stc");
        s.pv.i_0 = r.number("i_0");
        s.pv.n_vt = r.number("n_vt");
        s.pv.r_s = r.number("r_s");
        s.pv.r_sh = r.number("r_sh");
        s.pv.g_stc = r.number("g_stc", 1000.0);
        s.irradiance = r.signal("irradiance");
    } else if (kind == "wind_mg") {
        s.kind = SourceKind::WindMg;
        s.wind.k_e = r.number("k_e");
        s.wind.r_a = r.number("r_a");
        s.wind.k_w = r.number("k_w");
        s.wind.tau = r.number("tau", 0.0);
        s.wind_speed = r.signal("wind");
        s.omega_init = r.optional_number("omega_init");
    } else {
        throw ValidationError(r.field("kind"), "expected \"pv\" or \"wind_mg\"");
    }
    r.finish();
    return s;
}

ConverterSpec read_converter(const json& j, const std::string& path, const BusSpec& bus)
{
    ObjectReader r(j, path);
    ConverterSpec c;
    c.name = r.string("name");
    const std::string kind = r.string("kind");
    if (kind == "buck")
        c.kind = ConverterKind::Buck;
    else if (kind == "boost")
        c.kind = ConverterKind::Boost;
    else if (kind == "bidirectional")
        c.kind = ConverterKind::Bidirectional;
    else
        throw ValidationError(r.field("kind"), "expected \"buck\", \"boost\" or \"bidirectional\"");

    c.input = r.string("input");
    c.params.l = r.number("l");
    c.params.c = r.number("c");
    c.params.r_nom = r.number("r_nom", 1.0);
    c.r_loss = r.number("r_loss", 0.0);
    c.rating_w = r.optional_number("rating_w");

    if (c.kind == ConverterKind::Bidirectional) {
        c.current_loop_tau = r.number("current_loop_tau", 1e-3);
        r.finish();
        return c;
    }

    c.c_in = r.number("c_in", 0.0);
    c.v_in_init = r.optional_number("v_in_init");
    c.diode_rating_a = r.number("diode_rating_a", kDefaultDiodeRating);

    const json* ctl = r.child("control");
    if (!ctl)
        throw ValidationError(r.field("control"), "required for buck and boost converters");
    ObjectReader cr(*ctl, r.field("control"));
    const std::string mode = cr.string("mode");
    if (mode == "fixed") {
        c.control = ControlMode::Fixed;
        c.fixed_duty = cr.number("duty");
    } else if (mode == "voltage") {
        c.control = ControlMode::Voltage;
        c.voltage.v_ref = cr.number("v_ref", bus.v_ref);
        c.voltage.k_p = cr.number("k_p");
        c.voltage.k_i = cr.number("k_i");
        c.voltage.duty_nominal = cr.optional_number("duty_nominal");
        c.voltage.duty_min = cr.number("duty_min", 0.0);
        c.voltage.duty_max = cr.number("duty_max", 0.95);
        c.voltage.anti_windup = cr.boolean("anti_windup", true);
    } else if (mode == "mppt") {
        c.control = ControlMode::Mppt;
        c.mppt.duty_init = cr.number("duty_init", 0.5);
        c.mppt.delta_d = cr.number("delta_d", 0.01);
        c.mppt.period = cr.number("period", 2.0);
        c.mppt.duty_min = cr.number("duty_min", 0.05);
        c.mppt.duty_max = cr.number("duty_max", 0.95);
        c.mppt.deadband = cr.number("deadband", 1e-4);
    } else {
        throw ValidationError(cr.field("mode"), "expected \"fixed\", \"voltage\" or \"mppt\"");
    }
    cr.finish();
    r.finish();
    return c;
}

BatterySpec read_battery(const json& j)
{
    ObjectReader r(j, "battery");
    BatterySpec b;
    b.battery.capacity_ah = r.number("capacity_ah");
    b.battery.soc = r.number("soc_init");
    b.battery.v_full = r.number("v_full");
    b.battery.v_empty = r.number("v_empty");
    b.battery.r_int = r.number("r_int", 0.0);
    b.battery.soc_min = r.number("soc_min", 0.2);
    b.battery.soc_max = r.number("soc_max", 0.95);
    b.band = r.optional_number("band");
    b.i_charge_max = r.number("i_charge_max", 10.0);
    b.i_discharge_max = r.number("i_discharge_max", 10.0);
    b.k_p = r.number("k_p", 2.0);
    b.k_i = r.number("k_i", 50.0);
    b.reentry_margin = r.number("reentry_margin", 0.02);
    b.initial_mode = parse_mode(r.string("initial_mode", "idle"), r.field("initial_mode"));
    r.finish();
    return b;
}

LoadSpec read_load(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    LoadSpec l;
    l.name = r.string("name");
    const std::string kind = r.string("kind");
    if (kind == "resistive") {
        l.kind = LoadKind::Resistive;
        l.resistance = r.signal("r");
    } else if (kind == "constant_power") {
        l.kind = LoadKind::ConstantPower;
        l.power = r.signal("p");
        l.v_min = r.optional_number("v_min");
    } else {
        throw ValidationError(r.field("kind"), "expected \"resistive\" or \"constant_power\"");
    }
    r.finish();
    return l;
}

Profile read_profile(const json& j, const std::string& path)
{
    ObjectReader r(j, path);
    Profile p;
    const std::string interp = r.string("interpolation", "linear");
    if (interp == "linear")
        p.interpolation = Interpolation::Linear;
    else if (interp == "step")
        p.interpolation = Interpolation::Step;
    else
        throw ValidationError(r.field("interpolation"), "expected \"step\" or \"linear\"");

    const json* pts = r.child("points");
    if (!pts || !pts->is_array())
        throw ValidationError(r.field("points"), "expected an array of [t, value] pairs");
    for (std::size_t k = 0; k < pts->size(); ++k) {
        const json& pt = (*pts)[k];
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
            throw ValidationError(r.field("points") + "[" + std::to_string(k) + "]",
                                  "expected a [t, value] pair of numbers");
        p.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }
    r.finish();
    return p;
}

// ----------------------------------------------------------------------------
// Validation helpers
// ----------------------------------------------------------------------------

void require(bool ok, const std::string& field, const std::string& why)
{
    if (!ok)
        throw ValidationError(field, why);
}

void positive(double x, const std::string& field)
{
    require(std::isfinite(x) && x > 0.0, field, "must be > 0");
}

void non_negative(double x, const std::string& field)
{
    require(std::isfinite(x) && x >= 0.0, field, "must be >= 0");
}

void duty_range(double lo, double hi, const std::string& prefix)
{
    require(lo >= 0.0 && hi <= 1.0 && lo < hi, prefix + ".duty_min",
            "duty limits must satisfy 0 <= duty_min < duty_max <= 1");
}

/// Profile reference must exist; constants and every profile value must
/// satisfy `ok`.
template <typename Pred>
void check_signal(const Signal& s, const ProfileSet& profiles, const std::string& field, Pred ok,
                  const std::string& why)
{
    if (!s.bound()) {
        require(std::isfinite(s.constant) && ok(s.constant), field, why);
        return;
    }
    const auto it = profiles.find(s.profile);
    if (it == profiles.end())
        throw DanglingReference(s.profile, field);
    for (const auto& pt : it->second.points)
        require(ok(pt.second), field, why + " (profile '" + s.profile + "')");
}

bool valid_name(const std::string& n)
{
    if (n.empty() || n == "t" || n == "battery" || n == "bus")
        return false;
    for (char ch : n)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
            return false;
    return true;
}

} // namespace

void validate_scenario(const Scenario& sc)
{
    const auto& bus = sc.bus;
    positive(bus.v_ref, "bus.v_ref");
    positive(bus.c_bus, "bus.c_bus");
    if (bus.v_init)
        non_negative(*bus.v_init, "bus.v_init");
    non_negative(bus.diode_drop, "bus.diode_drop");
    non_negative(bus.port_resistance, "bus.port_resistance");

    const auto& sim = sc.sim;
    require(std::isfinite(sim.dt) && sim.dt > 0.0 && sim.dt <= 1e-3, "sim.dt", "must satisfy 0 < dt <= 1e-3");
    require(std::isfinite(sim.t_end) && sim.t_end >= sim.dt, "sim.t_end", "must be >= sim.dt");
    require(sim.log_every >= 1, "sim.log_every", "must be an integer >= 1");
    {
        const double n = std::round(sim.t_end / sim.dt);
        require(std::abs(n * sim.dt - sim.t_end) <= 1e-9 * sim.t_end, "sim.t_end",
                "t_end / dt must be an integer step count");
    }

    for (const auto& [name, prof] : sc.profiles)
        validate_profile(prof, "profiles." + name);

    std::set<std::string, std::less<>> names;
    auto claim_name = [&](const std::string& n, const std::string& field) {
        require(valid_name(n), field, "names use [A-Za-z0-9_-], and t/bus/battery are reserved");
        require(names.insert(n).second, field, "duplicate name '" + n + "'");
    };

    auto nonneg = [](double x) { return x >= 0.0; };
    auto pos = [](double x) { return x > 0.0; };

    for (std::size_t k = 0; k < sc.sources.size(); ++k) {
        const auto& s = sc.sources[k];
        const std::string f = indexed("sources", k);
        claim_name(s.name, f + ".name");
        if (s.kind == SourceKind::Pv) {
            positive(s.pv.i_ph_stc, f + ".i_ph_stc");
            positive(s.pv.i_0, f + ".i_0");
            positive(s.pv.n_vt, f + ".n_vt");
            positive(s.pv.r_s, f + ".r_s");
            positive(s.pv.r_sh, f + ".r_sh");
            positive(s.pv.g_stc, f + ".g_stc");
            const double v_oc = pv_open_circuit_voltage(s.pv, s.pv.g_stc);
            require(std::isfinite(v_oc) && v_oc > 0.0, f, "open-circuit voltage must be finite and > 0");
            check_signal(s.irradiance, sc.profiles, f + ".irradiance", nonneg, "irradiance must be >= 0");
        } else {
            positive(s.wind.k_e, f + ".k_e");
            positive(s.wind.r_a, f + ".r_a");
            positive(s.wind.k_w, f + ".k_w");
            non_negative(s.wind.tau, f + ".tau");
            if (s.omega_init)
                non_negative(*s.omega_init, f + ".omega_init");
            check_signal(s.wind_speed, sc.profiles, f + ".wind", nonneg, "wind speed must be >= 0");
        }
    }

    std::set<std::string, std::less<>> bound_sources;
    int bidirectional = 0;
    for (std::size_t k = 0; k < sc.converters.size(); ++k) {
        const auto& c = sc.converters[k];
        const std::string f = indexed("converters", k);
        claim_name(c.name, f + ".name");
        positive(c.params.l, f + ".l");
        positive(c.params.c, f + ".c");
        positive(c.params.r_nom, f + ".r_nom");
        non_negative(c.r_loss, f + ".r_loss");
        if (c.rating_w)
            positive(*c.rating_w, f + ".rating_w");

        if (c.kind == ConverterKind::Bidirectional) {
            ++bidirectional;
            require(bidirectional == 1, f + ".kind", "at most one bidirectional converter is allowed");
            if (c.input != "battery")
                throw ValidationError(f + ".input", "the bidirectional converter must be bound to the battery");
            if (!sc.battery)
                throw DanglingReference("battery", f + ".input");
            positive(c.current_loop_tau, f + ".current_loop_tau");
            require(c.current_loop_tau >= 2.0 * sim.dt, f + ".current_loop_tau", "must be >= 2 * sim.dt");
            continue;
        }

        require(c.input != "battery", f + ".input", "only the bidirectional converter may bind the battery");
        const auto src = std::find_if(sc.sources.begin(), sc.sources.end(),
                                      [&](const SourceSpec& s) { return s.name == c.input; });
        if (src == sc.sources.end())
            throw DanglingReference(c.input, f + ".input");
        require(bound_sources.insert(c.input).second, f + ".input",
                "source '" + c.input + "' already feeds another converter");

        non_negative(c.c_in, f + ".c_in");
        if (src->kind == SourceKind::Pv)
            require(c.c_in > 0.0, f + ".c_in", "a PV-fed converter needs an input capacitance > 0");
        if (c.v_in_init)
            non_negative(*c.v_in_init, f + ".v_in_init");
        positive(c.diode_rating_a, f + ".diode_rating_a");

        switch (c.control) {
        case ControlMode::Fixed:
            require(c.fixed_duty >= 0.0 && c.fixed_duty <= 1.0, f + ".control.duty", "must lie in [0, 1]");
            break;
        case ControlMode::Voltage:
            positive(c.voltage.v_ref, f + ".control.v_ref");
            non_negative(c.voltage.k_p, f + ".control.k_p");
            non_negative(c.voltage.k_i, f + ".control.k_i");
            duty_range(c.voltage.duty_min, c.voltage.duty_max, f + ".control");
            if (c.voltage.duty_nominal)
                require(*c.voltage.duty_nominal >= c.voltage.duty_min &&
                            *c.voltage.duty_nominal <= c.voltage.duty_max,
                        f + ".control.duty_nominal", "must lie within the duty limits");
            break;
        case ControlMode::Mppt:
            positive(c.mppt.delta_d, f + ".control.delta_d");
            positive(c.mppt.period, f + ".control.period");
            non_negative(c.mppt.deadband, f + ".control.deadband");
            duty_range(c.mppt.duty_min, c.mppt.duty_max, f + ".control");
            require(c.mppt.duty_init >= c.mppt.duty_min && c.mppt.duty_init <= c.mppt.duty_max,
                    f + ".control.duty_init", "must lie within the duty limits");
            break;
        }
    }

    if (sc.battery) {
        const auto& b = *sc.battery;
        const auto& bat = b.battery;
        positive(bat.capacity_ah, "battery.capacity_ah");
        require(bat.soc >= 0.0 && bat.soc <= 1.0, "battery.soc_init", "must lie in [0, 1]");
        positive(bat.v_empty, "battery.v_empty");
        require(bat.v_full > bat.v_empty, "battery.v_full", "must exceed v_empty");
        non_negative(bat.r_int, "battery.r_int");
        require(bat.soc_min >= 0.0 && bat.soc_min < bat.soc_max && bat.soc_max <= 1.0, "battery.soc_min",
                "must satisfy 0 <= soc_min < soc_max <= 1");
        if (b.band)
            positive(*b.band, "battery.band");
        positive(b.i_charge_max, "battery.i_charge_max");
        positive(b.i_discharge_max, "battery.i_discharge_max");
        non_negative(b.k_p, "battery.k_p");
        non_negative(b.k_i, "battery.k_i");
        non_negative(b.reentry_margin, "battery.reentry_margin");
        require(bidirectional == 1, "battery", "a battery needs a bidirectional converter bound to it");
    }

    for (std::size_t k = 0; k < sc.loads.size(); ++k) {
        const auto& l = sc.loads[k];
        const std::string f = indexed("loads", k);
        claim_name(l.name, f + ".name");
        if (l.kind == LoadKind::Resistive) {
            check_signal(l.resistance, sc.profiles, f + ".r", pos, "resistance must be > 0");
        } else {
            check_signal(l.power, sc.profiles, f + ".p", nonneg, "power must be >= 0");
            if (l.v_min)
                positive(*l.v_min, f + ".v_min");
        }
    }
}

Scenario parse_scenario(std::string_view json_text)
{
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }

    ObjectReader root(doc, "");
    Scenario sc;

    const json* bus = root.child("bus");
    if (!bus)
        throw ValidationError("bus", "required");
    {
        ObjectReader r(*bus, "bus");
        sc.bus.v_ref = r.number("v_ref");
        sc.bus.c_bus = r.number("c_bus");
        sc.bus.v_init = r.optional_number("v_init");
        sc.bus.diode_drop = r.number("diode_drop", 0.0);
        sc.bus.port_resistance = r.number("port_resistance", 0.0);
        r.finish();
    }

    const json* sim = root.child("sim");
    if (!sim)
        throw ValidationError("sim", "required");
    {
        ObjectReader r(*sim, "sim");
        sc.sim.dt = r.number("dt", 5e-5);
        sc.sim.t_end = r.number("t_end");
        sc.sim.log_every = r.integer("log_every", 100);
        r.finish();
    }

    if (const json* profs = root.child("profiles")) {
        if (!profs->is_object())
            throw ValidationError("profiles", "expected an object keyed by profile name");
        for (const auto& [name, p] : profs->items())
            sc.profiles.emplace(name, read_profile(p, "profiles." + name));
    }

    const json& sources = array_or_empty(root, "sources");
    for (std::size_t k = 0; k < sources.size(); ++k)
        sc.sources.push_back(read_source(sources[k], indexed("sources", k)));

    const json& converters = array_or_empty(root, "converters");
    for (std::size_t k = 0; k < converters.size(); ++k)
        sc.converters.push_back(read_converter(converters[k], indexed("converters", k), sc.bus));

    if (const json* bat = root.child("battery"))
        sc.battery = read_battery(*bat);

    const json& loads = array_or_empty(root, "loads");
    for (std::size_t k = 0; k < loads.size(); ++k)
        sc.loads.push_back(read_load(loads[k], indexed("loads", k)));

    root.finish();
    validate_scenario(sc);
    return sc;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError(path.string());
    return ss.str();
}

Scenario load_scenario(const std::filesystem::path& path)
{
    return parse_scenario(read_text_file(path));
}

} // namespace dcgrid
