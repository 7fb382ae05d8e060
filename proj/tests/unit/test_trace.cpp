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

#include "dcgrid/errors.hpp"
#include "dcgrid/trace.hpp"

#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace dcgrid;

TEST_CASE("trace log bookkeeping")
{
    TraceLog tr({"t", "x", "y"});
    CHECK(tr.width() == 3);
    CHECK(tr.rows() == 0);
    const double r0[] = {0.0, 1.0, 2.0};
    const double r1[] = {0.5, 3.0, 4.0};
    tr.append(r0);
    tr.append(r1);
    CHECK(tr.rows() == 2);
    CHECK(tr.at(1, 2) == 4.0);
    CHECK(tr.index_of("y") == 2u);
    CHECK_FALSE(tr.index_of("z"));
    CHECK(tr.column("x") == std::vector<double>{1.0, 3.0});
    CHECK_THROWS_AS(tr.column("z"), std::out_of_range);

    const double bad_width[] = {1.0, 2.0};
    CHECK_THROWS_AS(tr.append(bad_width), std::invalid_argument);
    const double not_increasing[] = {0.5, 0.0, 0.0};
    CHECK_THROWS_AS(tr.append(not_increasing), std::invalid_argument);
}

TEST_CASE("double formatting round-trips")
{
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(48.0) == "48");
    CHECK(format_double(-2.5e-7) == "-2.5e-07");
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double x = u(rng) * std::pow(10.0, 20.0 * u(rng));
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("CSV round trip is exact")
{
    TraceLog tr({"t", "v_bus", "pv.i"});
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int k = 0; k < 100; ++k) {
        const double row[] = {1e-3 * k, u(rng), u(rng) / 3.0};
        tr.append(row);
    }
    std::ostringstream os;
    write_csv(tr, os);
    CHECK(os.str().rfind("t,v_bus,pv.i\n", 0) == 0);

    std::istringstream is(os.str());
    const auto back = read_csv(is);
    REQUIRE(back.names() == tr.names());
    REQUIRE(back.rows() == tr.rows());
    for (std::size_t r = 0; r < tr.rows(); ++r)
        for (std::size_t c = 0; c < tr.width(); ++c)
            CHECK(back.at(r, c) == tr.at(r, c));

    std::ostringstream again;
    write_csv(back, again);
    CHECK(again.str() == os.str());
}

TEST_CASE("malformed CSV input")
{
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), ParseError);
    std::istringstream no_t("x,y\n1,2\n");
    CHECK_THROWS_AS(read_csv(no_t), ParseError);
    std::istringstream ragged("t,x\n0,1\n1\n");
    CHECK_THROWS_AS(read_csv(ragged), ParseError);
    std::istringstream junk("t,x\n0,abc\n");
    CHECK_THROWS_AS(read_csv(junk), ParseError);
}

TEST_CASE("events sidecar")
{
    std::vector<TraceEvent> ev(2);
    ev[0].t = 1.0;
    ev[0].kind = EventKind::ModeChange;
    ev[0].component = "battery";
    ev[0].from = Mode::Idle;
    ev[0].to = Mode::Charge;
    ev[1].t = 2.0;
    ev[1].kind = EventKind::MpptUpdate;
    ev[1].component = "boost1";
    ev[1].duty = 0.41;
    ev[1].power = 136.5;
    ev[1].delta_p = 0.2;

    const auto j = nlohmann::json::parse(events_to_json(ev));
    REQUIRE(j.at("events").size() == 2);
    CHECK(j["events"][0]["kind"] == "mode");
    CHECK(j["events"][0]["from"] == "idle");
    CHECK(j["events"][0]["to"] == "charge");
    CHECK(j["events"][1]["kind"] == "mppt");
    CHECK(j["events"][1]["duty"] == 0.41);
    CHECK(nlohmann::json::parse(events_to_json({})).at("events").empty());
}
