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

#include "dcgrid/bus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dcgrid {

double load_current(const Load& l, double v)
{
    switch (l.kind) {
    case LoadKind::Resistive:
        return v / l.resistance;
    case LoadKind::ConstantPower:
        return l.power / std::max(v, l.v_min);
    }
    return 0.0;
}

double diode_guard(const BusPort& port, double v_bus) noexcept
{
    if (port.kind != PortKind::Source)
        return port.current;
    return (port.current > 0.0 && port.v_source >= v_bus) ? port.current : 0.0;
}

double bus_net_current(const std::vector<BusPort>& ports, double v_bus) noexcept
{
    double net = 0.0;
    for (const auto& p : ports) {
        if (p.kind == PortKind::Load)
            net -= p.current;
        else
            net += diode_guard(p, v_bus);
    }
    return net;
}

double bus_step(const DcBus& bus, const std::vector<BusPort>& ports, double dt)
{
    const double v = bus.v + dt * bus_net_current(ports, bus.v) / bus.c_bus;
    return std::max(v, 0.0);
}

namespace {

void scan(const TraceLog& trace, const std::string& component, const std::string& signal, double limit,
          ViolationKind kind, bool magnitude, std::vector<RatingViolation>& out)
{
    const auto idx = trace.index_of(signal);
    if (!idx)
        throw std::out_of_range("rating_check: trace has no signal '" + signal + "'");
    bool open = false;
    RatingViolation cur;
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        const double x = magnitude ? std::abs(trace.at(r, *idx)) : trace.at(r, *idx);
        const double t = trace.at(r, 0);
        if (x > limit) {
            if (!open) {
                cur = {component, kind, t, t, x, limit};
                open = true;
            }
            cur.t_end = t;
            cur.peak = std::max(cur.peak, x);
        } else if (open) {
            out.push_back(cur);
            open = false;
        }
    }
    if (open)
        out.push_back(cur);
}

} // namespace

std::vector<RatingViolation> rating_check(const std::vector<ConverterRating>& converter_ratings,
                                          const std::vector<DiodeRating>& diode_ratings,
                                          const TraceLog& trace)
{
    std::vector<RatingViolation> out;
    for (const auto& cr : converter_ratings)
        scan(trace, cr.converter, cr.converter + ".p_out", kConverterDerating * cr.rated_w,
             ViolationKind::ConverterPower, true, out);
    for (const auto& dr : diode_ratings)
        scan(trace, dr.converter, dr.converter + ".i_port", dr.rated_a, ViolationKind::DiodeCurrent, false,
             out);
    return out;
}

namespace {

const char* kind_name(ViolationKind k)
{
    return k == ViolationKind::ConverterPower ? "converter_power" : "diode_current";
}

} // namespace

std::string violations_to_json(const std::vector<RatingViolation>& v)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& x : v) {
        nlohmann::ordered_json j;
        j["component"] = x.component;
        j["kind"] = kind_name(x.kind);
        j["t_start"] = x.t_start;
        j["t_end"] = x.t_end;
        j["peak"] = x.peak;
        j["limit"] = x.limit;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::string violations_to_text(const std::vector<RatingViolation>& v)
{
    std::ostringstream os;
    if (v.empty()) {
        os << "rating check: no violations\n";
        return os.str();
    }
    os << "rating check: " << v.size() << " violation(s)\n";
    for (const auto& x : v) {
        os << "  " << x.component << "  " << kind_name(x.kind) << "  t=[" << format_double(x.t_start) << ", "
           << format_double(x.t_end) << "] s  peak " << format_double(x.peak)
           << (x.kind == ViolationKind::ConverterPower ? " W" : " A") << " > limit " << format_double(x.limit)
           << '\n';
    }
    return os.str();
}

} // namespace dcgrid
