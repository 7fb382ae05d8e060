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
#include "dcgrid/sources.hpp"
#include "support/test_data.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace dcgrid;
using Catch::Approx;

namespace {

const PvPanel kPanel{5.0, 1e-9, 1.5, 0.01, 1000.0, 1000.0};

PvPanel panel_from(const nlohmann::json& j)
{
    return {j["i_ph_stc"], j["i_0"], j["n_vt"], j["r_s"], j["r_sh"], j["g_stc"]};
}

} // namespace

TEST_CASE("panel current matches the high-precision golden points")
{
    const auto golden = test::load_json("pv_golden.json");
    const PvPanel panel = panel_from(golden["panel"]);
    for (const auto& pt : golden["points"]) {
        const double v = pt["v"], g = pt["g"], i = pt["i"];
        INFO("v=" << v << " g=" << g);
        CHECK(pv_current(panel, v, g) == Approx(i).margin(1e-9));
    }
    for (const auto& pt : golden["v_oc"])
        CHECK(pv_open_circuit_voltage(panel, pt["g"]) == Approx(pt["v_oc"].get<double>()).epsilon(1e-10));
}

TEST_CASE("short-circuit current is the scaled photocurrent")
{
    for (double g : {100.0, 400.0, 1000.0, 1200.0}) {
        const double expected = kPanel.i_ph_stc * g / kPanel.g_stc / (1.0 + kPanel.r_s / kPanel.r_sh);
        CHECK(pv_current(kPanel, 0.0, g) == Approx(expected).epsilon(1e-6));
    }
    CHECK(pv_current(kPanel, 0.0, 0.0) == Approx(0.0).margin(1e-12));
}

TEST_CASE("Newton residual is below tolerance at return")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> vd(0.0, 40.0), gd(0.0, 1400.0);
    for (int k = 0; k < 2000; ++k) {
        const double v = vd(rng), g = gd(rng);
        const double i = pv_current(kPanel, v, g);
        REQUIRE(std::abs(pv_residual(kPanel, v, i, g)) < kPvTolerance);
    }
}

TEST_CASE("panel current decreases strictly with voltage up to open circuit")
{
    for (double g : {200.0, 1000.0}) {
        const double v_oc = pv_open_circuit_voltage(kPanel, g);
        double prev = pv_current(kPanel, 0.0, g);
        for (double v = 0.05; v <= v_oc; v += 0.05) {
            const double i = pv_current(kPanel, v, g);
            REQUIRE(i < prev);
            prev = i;
        }
        CHECK(pv_current(kPanel, v_oc, g) == Approx(0.0).margin(1e-8));
    }
}

TEST_CASE("pv_current preconditions")
{
    CHECK_THROWS_AS(pv_current(kPanel, -0.1, 1000.0), std::invalid_argument);
    CHECK_THROWS_AS(pv_current(kPanel, 1.0, -1.0), std::invalid_argument);
    CHECK(pv_open_circuit_voltage(kPanel, 0.0) == 0.0);
}

TEST_CASE("maximum power point oracle reproduces the golden sweep")
{
    const auto golden = test::load_json("pv_golden.json");
    const PvPanel panel = panel_from(golden["panel"]);
    double prev_p = 0.0;
    for (const auto& row : golden["mpp"]) {
        const double g = row["g"];
        const auto mpp = mpp_oracle(panel, g);
        INFO("g=" << g);
        CHECK(mpp.v_mpp == Approx(row["v_mpp"].get<double>()).margin(1.5e-3));
        CHECK(mpp.p_mpp == Approx(row["p_mpp"].get<double>()).epsilon(1e-9));
        CHECK(mpp.p_mpp > prev_p);
        prev_p = mpp.p_mpp;
    }
}

TEST_CASE("maximum power point lies strictly inside (0, v_oc)")
{
    const PvPanel panels[] = {kPanel, {8.0, 1e-10, 1.2, 0.2, 300.0, 1000.0}, {3.0, 5e-8, 2.0, 0.05, 150.0, 800.0}};
    for (const auto& p : panels) {
        for (double g : {150.0, 600.0, 1000.0}) {
            const auto mpp = mpp_oracle(p, g);
            const double v_oc = pv_open_circuit_voltage(p, g);
            CHECK(mpp.p_mpp > 0.0);
            CHECK(mpp.v_mpp > 0.0);
            CHECK(mpp.v_mpp < v_oc);
        }
    }
}

TEST_CASE("power curve has a single interior maximum")
{
    const PvPanel panels[] = {kPanel, {8.0, 1e-10, 1.2, 0.2, 300.0, 1000.0}};
    for (const auto& p : panels) {
        for (double g : {200.0, 1000.0}) {
            const double v_oc = pv_open_circuit_voltage(p, g);
            int sign_changes = 0;
            double prev_dp = 0.0;
            double prev_power = 0.0;
            for (double v = 0.01; v < v_oc; v += 0.01) {
                const double power = v * pv_current(p, v, g);
                const double dp = power - prev_power;
                if (v > 0.01 && (dp > 0.0) != (prev_dp > 0.0))
                    ++sign_changes;
                prev_dp = dp;
                prev_power = power;
            }
            CHECK(sign_changes == 1);
        }
    }
}

TEST_CASE("doubling irradiance raises the maximum power")
{
    for (double g : {100.0, 250.0, 500.0})
        CHECK(mpp_oracle(kPanel, 2.0 * g).p_mpp > mpp_oracle(kPanel, g).p_mpp);
    CHECK_THROWS_AS(mpp_oracle(kPanel, 0.0), std::invalid_argument);
}

TEST_CASE("wind motor-generator terminal voltage")
{
    const WindMG mg{0.5, 0.5, 10.0, 0.0};
    auto at = wind_terminal(mg, 0.0, 0.0, 0.0, 1e-3);
    CHECK(at.omega == 0.0);
    CHECK(at.v_terminal == 0.0);

    at = wind_terminal(mg, 8.0, 0.0, 0.0, 1e-3);
    CHECK(at.omega == 80.0);
    CHECK(at.v_terminal == 40.0);

    at = wind_terminal(mg, 8.0, 4.0, 0.0, 1e-3);
    CHECK(at.v_terminal == 38.0);

    CHECK(wind_voltage(mg, 1.0, 100.0) == 0.0);

    for (double w : {0.3, 3.7, 12.0}) {
        const WindMG m{0.37, 0.2, 7.3, 0.0};
        CHECK(wind_terminal(m, w, 0.0, 5.0, 1e-4).v_terminal == m.k_e * m.k_w * w);
    }
}

TEST_CASE("wind shaft lag is an exact first-order response")
{
    const WindMG mg{0.5, 0.5, 10.0, 0.2};
    double omega = 0.0;
    const double dt = 0.01;
    for (int k = 1; k <= 50; ++k) {
        omega = wind_terminal(mg, 8.0, 0.0, omega, dt).omega;
        CHECK(omega == Approx(80.0 * (1.0 - std::exp(-k * dt / mg.tau))).epsilon(1e-12));
    }
}
