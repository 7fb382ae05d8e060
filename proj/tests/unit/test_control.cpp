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

#include "dcgrid/control.hpp"
#include "dcgrid/sources.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace dcgrid;
using Catch::Approx;

TEST_CASE("PI at zero error stays at zero")
{
    PiController pi{2.0, 50.0, 0.0, -1.0, 1.0, true};
    for (int k = 0; k < 100; ++k)
        CHECK(pi_step(pi, 0.0, 1e-3) == 0.0);
    CHECK(pi.integ == 0.0);
}

TEST_CASE("PI step with the buck design gains")
{
    PiController pi{15.0, 0.002, 0.0, -1e6, 1e6, true};
    CHECK(pi_step(pi, 1.0, 0.001) == Approx(15.000002).epsilon(1e-15));
    CHECK(pi.integ == Approx(2e-6).epsilon(1e-15));
}

TEST_CASE("anti-windup freezes the integrator in saturation")
{
    PiController pi{1.0, 10.0, 0.5, 0.0, 1.0, true};
    const double before = pi.integ;
    CHECK(pi_step(pi, 2.0, 0.01) == 1.0);
    CHECK(pi.integ == before);

    // error pulling back out of saturation still integrates
    pi_step(pi, -0.1, 0.01);
    CHECK(pi.integ < before);

    PiController wind{1.0, 10.0, 0.5, 0.0, 1.0, false};
    for (int k = 0; k < 100; ++k)
        pi_step(wind, 2.0, 0.01);
    CHECK(wind.integ > 10.0);
}

TEST_CASE("PI output never leaves its limits")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        PiController pi{10.0 * std::abs(u(rng)), 100.0 * std::abs(u(rng)), 0.0, -0.5, 2.0, trial % 2 == 0};
        for (int k = 0; k < 500; ++k) {
            const double y = pi_step(pi, 100.0 * u(rng), 1e-3);
            REQUIRE(y >= pi.u_min);
            REQUIRE(y <= pi.u_max);
        }
    }
}

TEST_CASE("integrator stays bounded under persistent saturation")
{
    PiController pi{1.0, 100.0, 0.0, -1.0, 1.0, true};
    double peak = 0.0;
    for (int k = 0; k < 100000; ++k) {
        pi_step(pi, 5.0, 1e-3);
        peak = std::max(peak, std::abs(pi.integ));
    }
    CHECK(peak <= 1.0);
}

TEST_CASE("Ziegler-Nichols table")
{
    const auto p = ziegler_nichols(1.0, 1.0, ZnRule::P);
    CHECK(p.k_p == 0.5);
    CHECK(std::isinf(p.t_i));
    CHECK(p.t_d == 0.0);

    const auto pi = ziegler_nichols(2.0, 1.0, ZnRule::PI);
    CHECK(pi.k_p == Approx(0.9));
    CHECK(pi.t_i == Approx(0.8333333333333334));
    CHECK(pi.t_d == 0.0);

    const auto pid = ziegler_nichols(2.0, 1.0, ZnRule::PID);
    CHECK(pid.k_p == Approx(1.2));
    CHECK(pid.t_i == Approx(0.5));
    CHECK(pid.t_d == Approx(0.125));

    for (auto rule : {ZnRule::P, ZnRule::PI, ZnRule::PID}) {
        const auto a = ziegler_nichols(3.0, 0.7, rule);
        const auto b = ziegler_nichols(6.0, 0.7, rule);
        CHECK(b.k_p == Approx(2.0 * a.k_p));
        CHECK(b.t_i == a.t_i);
        CHECK(b.t_d == a.t_d);
    }
    CHECK_THROWS_AS(ziegler_nichols(0.0, 1.0, ZnRule::PI), std::invalid_argument);
    CHECK_THROWS_AS(ziegler_nichols(1.0, -1.0, ZnRule::PI), std::invalid_argument);
}

TEST_CASE("P&O tracker decisions")
{
    SECTION("first sample with rising power steps up")
    {
        MpptTracker tr;
        CHECK(mppt_step(tr, 20.0, 5.0, 0.0) == Approx(0.51));
        CHECK(tr.next_t == 2.0);
    }
    SECTION("falling power reverses the perturbation")
    {
        MpptTracker tr;
        mppt_step(tr, 20.0, 5.0, 0.0); // +, 0.51
        mppt_step(tr, 20.0, 5.5, 2.0); // rises, keeps +: 0.52
        CHECK(tr.duty == Approx(0.52));
        mppt_step(tr, 20.0, 5.2, 4.0); // falls, reverses: 0.51
        CHECK(tr.duty == Approx(0.51));
        CHECK(tr.dir == -1);
    }
    SECTION("calls before the next sample are ignored")
    {
        MpptTracker tr;
        mppt_step(tr, 20.0, 5.0, 0.0);
        MpptUpdate info;
        CHECK(mppt_step(tr, 1.0, 1.0, 1.5, info) == Approx(0.51));
        CHECK_FALSE(info.fired);
        CHECK(tr.p_prev == 100.0);
    }
    SECTION("dead-band holds the duty")
    {
        MpptTracker tr;
        mppt_step(tr, 20.0, 5.0, 0.0);
        MpptUpdate info;
        mppt_step(tr, 20.0, 5.0 + 1e-6, 2.0, info);
        CHECK(info.fired);
        CHECK(tr.duty == Approx(0.51));
    }
    SECTION("duty stays inside its limits")
    {
        MpptTracker tr;
        tr.duty = 0.945;
        double p = 1.0;
        for (int k = 0; k < 10; ++k, p += 1.0)
            mppt_step(tr, p, 1.0, 2.0 * k);
        CHECK(tr.duty == tr.duty_max);
    }
    SECTION("time tolerance admits samples just before the schedule")
    {
        MpptTracker tr;
        tr.next_t = 2.0;
        tr.time_tolerance = 1e-6;
        MpptUpdate info;
        mppt_step(tr, 1.0, 1.0, 2.0 - 5e-7, info);
        CHECK(info.fired);
    }
}

TEST_CASE("P&O settles into a limit cycle around the oracle duty")
{
    // PV panel behind an ideal boost onto a stiff 48 V bus: v_pv = (1 - d) * 48
    const PvPanel panel{5.0, 1e-9, 1.5, 0.01, 1000.0, 1000.0};
    for (double g : {200.0, 600.0, 1000.0}) {
        const auto mpp = mpp_oracle(panel, g);
        const double d_star = 1.0 - mpp.v_mpp / 48.0;
        MpptTracker tr;
        std::vector<double> duties;
        for (int k = 0; k < 300; ++k) {
            const double v = (1.0 - tr.duty) * 48.0;
            mppt_step(tr, v, pv_current(panel, v, g), 2.0 * k);
            duties.push_back(tr.duty);
        }
        const auto [lo, hi] = std::minmax_element(duties.end() - 40, duties.end());
        INFO("g=" << g << " d*=" << d_star);
        CHECK(*hi - *lo <= 2.0 * tr.delta_d + 1e-12);
        CHECK(*lo <= d_star + 1e-12);
        CHECK(*hi >= d_star - 1e-12);
        CHECK(*hi - d_star <= 2.0 * tr.delta_d);
        CHECK(d_star - *lo <= 2.0 * tr.delta_d);
    }
}

TEST_CASE("fractional open-circuit reference")
{
    CHECK(fractional_voc_ref(40.0) == Approx(30.4));
    CHECK_THROWS_AS(fractional_voc_ref(40.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(fractional_voc_ref(0.0), std::invalid_argument);
}
