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

#include <catch_amalgamated.hpp>

#include <json.hpp>

using namespace dcgrid;
using Catch::Approx;

TEST_CASE("load currents")
{
    const Load r{LoadKind::Resistive, 10.0, 0.0, 0.0};
    CHECK(load_current(r, 12.0) == Approx(1.2));
    CHECK(load_current(r, -1.0) == Approx(-0.1));

    const Load cpl{LoadKind::ConstantPower, 0.0, 96.0, 4.8};
    CHECK(load_current(cpl, 48.0) == Approx(2.0));
    CHECK(load_current(cpl, 1.0) == Approx(20.0));
}

TEST_CASE("diode guard blocks reverse and back-biased ports")
{
    CHECK(diode_guard({PortKind::Source, 2.0, 49.0}, 48.0) == 2.0);
    CHECK(diode_guard({PortKind::Source, -2.0, 49.0}, 48.0) == 0.0);
    CHECK(diode_guard({PortKind::Source, 2.0, 47.0}, 48.0) == 0.0);
    CHECK(diode_guard({PortKind::Battery, -3.0}, 48.0) == -3.0);
}

TEST_CASE("bus current balance")
{
    const std::vector<BusPort> ports{
        {PortKind::Source, 3.0, 49.0},
        {PortKind::Source, -1.0, 49.0},
        {PortKind::Battery, -2.0},
        {PortKind::Load, 0.5},
    };
    CHECK(bus_net_current(ports, 48.0) == Approx(0.5));
    CHECK(bus_step({1e-3, 48.0}, ports, 1e-3) == Approx(48.5));
    CHECK(bus_step({1e-3, 48.0}, {}, 1e-3) == 48.0);
}

namespace {

TraceLog synthetic_trace()
{
    TraceLog tr({"t", "a.p_out", "a.i_port", "b.p_out", "b.i_port"});
    const double p[] = {10.0, 80.0, 90.0, 10.0, -80.0, 10.0};
    const double i[] = {1.0, 1.0, 31.0, 32.0, 1.0, 1.0};
    for (int k = 0; k < 6; ++k) {
        const double row[] = {0.1 * k, p[k], i[k], 0.0, 0.0};
        tr.append(row);
    }
    return tr;
}

} // namespace

TEST_CASE("rating check records contiguous runs")
{
    const auto tr = synthetic_trace();
    const auto v = rating_check({{"a", 100.0}, {"b", 100.0}}, {{"a", 30.0}, {"b", 30.0}}, tr);
    REQUIRE(v.size() == 3);

    CHECK(v[0].component == "a");
    CHECK(v[0].kind == ViolationKind::ConverterPower);
    CHECK(v[0].t_start == Approx(0.1));
    CHECK(v[0].t_end == Approx(0.2));
    CHECK(v[0].peak == 90.0);
    CHECK(v[0].limit == 75.0);

    CHECK(v[1].t_start == Approx(0.4));
    CHECK(v[1].t_end == Approx(0.4));
    CHECK(v[1].peak == 80.0);

    CHECK(v[2].kind == ViolationKind::DiodeCurrent);
    CHECK(v[2].t_start == Approx(0.2));
    CHECK(v[2].t_end == Approx(0.3));
    CHECK(v[2].peak == 32.0);
    CHECK(v[2].limit == 30.0);
}

TEST_CASE("rating check at the limit and with no ratings")
{
    TraceLog tr({"t", "a.p_out", "a.i_port"});
    const double row[] = {0.0, 75.0, 30.0};
    tr.append(row);
    CHECK(rating_check({{"a", 100.0}}, {{"a", 30.0}}, tr).empty());
    CHECK(rating_check({}, {}, tr).empty());
    CHECK_THROWS_AS(rating_check({{"zz", 1.0}}, {}, tr), std::out_of_range);
}

TEST_CASE("violation reports")
{
    const auto v = rating_check({{"a", 100.0}}, {}, synthetic_trace());
    const auto j = nlohmann::json::parse(violations_to_json(v));
    REQUIRE(j.size() == 2);
    CHECK(j[0]["component"] == "a");
    CHECK(j[0]["kind"] == "converter_power");
    CHECK(j[0]["limit"] == 75.0);
    CHECK(violations_to_text({}) == "rating check: no violations\n");
    CHECK(violations_to_text(v).find("2 violation(s)") != std::string::npos);
}
