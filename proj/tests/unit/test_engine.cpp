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

#include "dcgrid/engine.hpp"
#include "dcgrid/errors.hpp"

#include "support/test_data.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace dcgrid;
using Catch::Approx;

namespace {

Scenario load(const std::string& name)
{
    return load_scenario(test::data_path(name));
}

std::string csv(const TraceLog& tr)
{
    std::ostringstream os;
    write_csv(tr, os);
    return os.str();
}

double last(const TraceLog& tr, const std::string& signal)
{
    return tr.column(signal).back();
}

const char* kBatteryOnly = R"({
  "bus": {"v_ref": 48.0, "c_bus": 1e-3},
  "converters": [
    {"name": "bc", "kind": "bidirectional", "input": "battery", "l": 1e-3, "c": 1e-4}
  ],
  "battery": {"capacity_ah": 10.0, "soc_init": 0.6, "v_full": 27.0, "v_empty": 22.0, "r_int": 0.05,
              "initial_mode": "discharge"},
  "loads": [{"name": "load", "kind": "resistive", "r": 24.0}],
  "sim": {"dt": 5e-5, "t_end": 2.0, "log_every": 100}
})";

} // namespace

TEST_CASE("empty bus holds its voltage")
{
    const auto sc = parse_scenario(R"({"bus": {"v_ref": 48.0, "c_bus": 1e-3, "v_init": 40.0},
                                      "sim": {"dt": 1e-4, "t_end": 0.01, "log_every": 10}})");
    const auto tr = run(sc);
    CHECK(tr.rows() == 11);
    for (double v : tr.column("v_bus"))
        CHECK(v == 40.0);
    CHECK(tr.column("t").back() == Approx(0.01));
    CHECK(tr.events.empty());
}

TEST_CASE("trace columns follow the scenario")
{
    const Simulation sim(load("pv_mppt_battery.json"));
    const auto names = sim.signal_names();
    REQUIRE(names.size() > 2);
    CHECK(names[0] == "t");
    CHECK(names[1] == "v_bus");
    for (const char* s : {"pv.v", "pv.i", "pv.p", "pv_boost.i_l", "pv_boost.duty", "pv_boost.i_port",
                          "pv_boost.p_out", "batt_conv.i_port", "battery.soc", "battery.mode", "r_load.p",
                          "e_src", "e_load", "e_batt", "e_loss", "e_discarded", "w_stored"})
        CHECK(std::find(names.begin(), names.end(), s) != names.end());
}

TEST_CASE("buck with the design gains regulates the bus")
{
    const auto tr = run(load("buck_paper_gains.json"));
    CHECK(last(tr, "v_bus") == Approx(12.0).epsilon(0.005));
    CHECK(last(tr, "wind.omega") == Approx(80.0).epsilon(1e-3));

    const auto audit = energy_audit(tr);
    CHECK_FALSE(audit.lossy);
    CHECK(audit.relative_residual < 1e-6);
    CHECK(audit.e_src > 0.0);
    CHECK(audit.e_load > 0.0);
}

TEST_CASE("boost with the design gains regulates the bus")
{
    const auto tr = run(load("boost_paper_gains.json"));
    CHECK(last(tr, "v_bus") == Approx(18.0).epsilon(0.005));
    const auto audit = energy_audit(tr);
    CHECK(audit.relative_residual < 1e-9);
    CHECK(audit.e_discarded == 0.0);
}

TEST_CASE("converter losses close the energy balance")
{
    auto sc = load("buck_paper_gains.json");
    sc.converters[0].r_loss = 0.05;
    sc.bus.port_resistance = 0.01;
    sc.bus.diode_drop = 0.3;
    const auto tr = run(sc);
    const auto audit = energy_audit(tr);
    CHECK(audit.lossy);
    CHECK(audit.e_loss > 0.0);
    CHECK(audit.residual_without_loss == Approx(audit.e_loss).epsilon(1e-6));
    CHECK(audit.relative_residual < 1e-6);
    CHECK(last(tr, "v_bus") == Approx(12.0).epsilon(0.005));
}

TEST_CASE("battery alone carries the load")
{
    const auto tr = run(parse_scenario(kBatteryOnly));
    CHECK(last(tr, "v_bus") == Approx(48.0).epsilon(0.02));
    CHECK(last(tr, "battery.i") < 0.0);
    CHECK(last(tr, "battery.soc") < 0.6);
    CHECK(last(tr, "battery.mode") == 2.0);
    CHECK(energy_audit(tr).relative_residual < 1e-6);
    const auto audit = energy_audit(tr);
    CHECK(audit.e_src == 0.0);
    CHECK(audit.e_batt < 0.0);
}

TEST_CASE("runs are deterministic")
{
    auto sc = load("pv_mppt_battery.json");
    sc.sim.t_end = 5.0;
    const auto a = run(sc);
    const auto b = run(sc);
    CHECK(csv(a) == csv(b));
    CHECK(events_to_json(a.events) == events_to_json(b.events));
}

TEST_CASE("halving the step barely moves the result")
{
    auto sc = load("buck_paper_gains.json");
    sc.sim.t_end = 1.0;
    const double coarse = last(run(sc), "v_bus");
    sc.sim.dt /= 2.0;
    sc.sim.log_every *= 2;
    const double fine = last(run(sc), "v_bus");
    CHECK(std::abs(coarse - fine) / std::abs(fine) < 1e-4);
}

TEST_CASE("MPPT samples on its period and battery modes stay consistent")
{
    auto sc = load("pv_mppt_battery.json");
    sc.sim.t_end = 20.0;
    const auto tr = run(sc);
    int mppt = 0;
    Mode prev = sc.battery->initial_mode;
    for (const auto& ev : tr.events) {
        if (ev.kind == EventKind::MpptUpdate) {
            ++mppt;
            const double k = std::round(ev.t / 2.0);
            CHECK(k >= 1.0);
            CHECK(std::abs(ev.t - 2.0 * k) <= sc.sim.dt);
            CHECK(ev.duty >= 0.05);
            CHECK(ev.duty <= 0.95);
        } else {
            CHECK(ev.from == prev);
            const bool direct = (ev.from == Mode::Charge && ev.to == Mode::Discharge) ||
                                (ev.from == Mode::Discharge && ev.to == Mode::Charge);
            CHECK_FALSE(direct);
            prev = ev.to;
        }
    }
    CHECK(mppt == 10);
    for (double soc : tr.column("battery.soc")) {
        CHECK(soc >= 0.0);
        CHECK(soc <= 1.0);
    }
    for (double i : tr.column("pv_boost.i_port"))
        CHECK(i >= 0.0);
    const auto p = tr.column("pv.p");
    const auto v = tr.column("pv.v");
    const auto i = tr.column("pv.i");
    for (std::size_t r = 0; r < p.size(); ++r)
        CHECK(p[r] == v[r] * i[r]);
}

TEST_CASE("a full battery idles with zero current")
{
    auto sc = load("pv_mppt_battery.json");
    sc.battery->battery.soc = 0.9495;
    sc.sim.t_end = 10.0;
    const auto tr = run(sc);
    const auto mode = tr.column("battery.mode");
    const auto cur = tr.column("battery.i");
    const auto soc = tr.column("battery.soc");
    bool idled = false;
    for (std::size_t r = 0; r < mode.size(); ++r) {
        if (mode[r] == 3.0) {
            idled = true;
            CHECK(cur[r] == 0.0);
        }
        CHECK(soc[r] <= 0.95 + 1e-6);
    }
    CHECK(idled);
    CHECK(energy_audit(tr).relative_residual < 1e-6);
}

TEST_CASE("symmetric parallel sources share equally")
{
    auto sc = load("buck_paper_gains.json");
    auto src = sc.sources[0];
    auto conv = sc.converters[0];
    src.name = "wind2";
    conv.name = "buck2";
    conv.input = "wind2";
    sc.sources.push_back(src);
    sc.converters.push_back(conv);
    const auto tr = run(sc);
    CHECK(tr.column(sc.converters[0].name + ".i_l") == tr.column("buck2.i_l"));
    CHECK(tr.column(sc.converters[0].name + ".i_port") == tr.column("buck2.i_port"));
    CHECK(last(tr, "v_bus") == Approx(12.0).epsilon(0.005));
}

TEST_CASE("energy audit input checks")
{
    CHECK_THROWS_AS(energy_audit(TraceLog({"t"})), std::out_of_range);
    const auto j = nlohmann::json::parse(audit_to_json(energy_audit(run(parse_scenario(kBatteryOnly)))));
    CHECK(j.contains("residual"));
    CHECK(j.contains("relative_residual"));
}

TEST_CASE("a diverging run raises a numerical error")
{
    const auto sc = load("unstable_step.json");
    CHECK_THROWS_AS(run(sc), NumericalBlowup);
}

TEST_CASE("rating tables follow the scenario")
{
    auto sc = load("pv_mppt_battery.json");
    sc.converters[0].rating_w = 200.0;
    const auto cr = converter_ratings(sc);
    REQUIRE(cr.size() == 1);
    CHECK(cr[0].converter == "pv_boost");
    CHECK(cr[0].rated_w == 200.0);
    const auto dr = diode_ratings(sc);
    REQUIRE(dr.size() == 1);
    CHECK(dr[0].rated_a == kDefaultDiodeRating);
}
