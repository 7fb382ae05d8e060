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

#include "dcgrid/converters.hpp"
#include "dcgrid/errors.hpp"
#include "dcgrid/stability.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace dcgrid;
using Catch::Approx;

namespace {

const ConverterParams kLc{1e-3, 1e-4, 10.0};

/// Integrates a converter feeding a resistor until it settles.
template <typename F>
double settle(F&& deriv, double r_load, double dt = 1e-6, double t_end = 0.2)
{
    ConverterState st{0.0, 0.0};
    for (double t = 0.0; t < t_end; t += dt) {
        auto f = [&](const ConverterState& s) { return deriv(s, s.v_c / r_load); };
        const auto k1 = f(st);
        const auto k2 = f({st.i_l + 0.5 * dt * k1.di_l, st.v_c + 0.5 * dt * k1.dv_c});
        const auto k3 = f({st.i_l + 0.5 * dt * k2.di_l, st.v_c + 0.5 * dt * k2.dv_c});
        const auto k4 = f({st.i_l + dt * k3.di_l, st.v_c + dt * k3.dv_c});
        st.i_l += dt / 6.0 * (k1.di_l + 2 * k2.di_l + 2 * k3.di_l + k4.di_l);
        st.v_c += dt / 6.0 * (k1.dv_c + 2 * k2.dv_c + 2 * k3.dv_c + k4.dv_c);
    }
    return st.v_c;
}

} // namespace

TEST_CASE("buck averaged dynamics")
{
    const auto eq = buck_derivatives(kLc, {1.0, 12.0}, 24.0, 0.5, 1.0);
    CHECK(eq.di_l == 0.0);
    CHECK(eq.dv_c == 0.0);

    const auto off = buck_derivatives(kLc, {0.0, 12.0}, 24.0, 0.0, 1.0);
    CHECK(off.di_l == 0.0);
    CHECK(off.dv_c == Approx(-1.0 / kLc.c));

    const auto rising = buck_derivatives(kLc, {0.0, 5.0}, 24.0, 0.5, 0.0);
    CHECK(rising.di_l == Approx((12.0 - 5.0) / kLc.l));

    const double v = settle([](const ConverterState& s, double i_out) {
        return buck_derivatives(kLc, s, 24.0, 0.5, i_out);
    }, 12.0);
    CHECK(v == Approx(12.0).epsilon(1e-3));
}

TEST_CASE("boost averaged dynamics")
{
    const auto eq = boost_derivatives(kLc, {2.0, 24.0}, 12.0, 0.5, 1.0);
    CHECK(eq.di_l == 0.0);
    CHECK(eq.dv_c == 0.0);

    const auto pass = boost_derivatives(kLc, {1.0, 10.0}, 12.0, 0.0, 0.5);
    CHECK(pass.di_l == Approx((12.0 - 10.0) / kLc.l));

    const double v = settle([](const ConverterState& s, double i_out) {
        return boost_derivatives(kLc, s, 12.0, 0.5, i_out);
    }, 24.0);
    CHECK(v == Approx(24.0).epsilon(1e-3));
}

TEST_CASE("averaged converters conserve energy")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const ConverterParams p{1e-4 + 1e-2 * u(rng), 1e-5 + 1e-3 * u(rng), 10.0};
        const ConverterState st{0.1 + 10.0 * u(rng), 50.0 * u(rng)};
        const double v_in = 5.0 + 40.0 * u(rng), d = u(rng), i_out = 5.0 * u(rng);

        const auto b = buck_derivatives(p, st, v_in, d, i_out);
        const double p_buck = d * v_in * st.i_l - st.v_c * i_out;
        CHECK(p.l * st.i_l * b.di_l + p.c * st.v_c * b.dv_c == Approx(p_buck).margin(1e-9 * (1.0 + std::abs(p_buck))));

        const auto s = boost_derivatives(p, st, v_in, d, i_out);
        const double p_boost = v_in * st.i_l - st.v_c * i_out;
        CHECK(p.l * st.i_l * s.di_l + p.c * st.v_c * s.dv_c == Approx(p_boost).margin(1e-9 * (1.0 + std::abs(p_boost))));
    }
}

TEST_CASE("bidirectional converter modes")
{
    for (double d : {0.0, 0.3, 1.0}) {
        const auto idle = bidir_derivatives(kLc, {3.0, 24.0}, 12.0, 24.0, d, Mode::Idle);
        CHECK(idle.di_l == 0.0);
        CHECK(idle.dv_c == 0.0);
        CHECK(bidir_bus_current({3.0, 24.0}, d, Mode::Idle) == 0.0);
    }
    // charging mirrors the buck equilibrium, discharging the boost one
    CHECK(bidir_derivatives(kLc, {1.0, 24.0}, 12.0, 24.0, 0.5, Mode::Charge).di_l == 0.0);
    CHECK(bidir_derivatives(kLc, {-2.0, 24.0}, 12.0, 24.0, 0.5, Mode::Discharge).di_l == 0.0);
    CHECK(bidir_bus_current({2.0, 24.0}, 0.25, Mode::Charge) == 0.5);
    CHECK(bidir_bus_current({-2.0, 24.0}, 0.25, Mode::Discharge) == -1.5);
    CHECK(std::string(mode_name(Mode::Charge)) == "charge");
    CHECK(static_cast<int>(Mode::Charge) == 1);
    CHECK(static_cast<int>(Mode::Discharge) == 2);
    CHECK(static_cast<int>(Mode::Idle) == 3);
}

TEST_CASE("buck small-signal model")
{
    const auto tf = buck_tf(kLc, 12.0, 0.5);
    REQUIRE(tf.den.size() == 3);
    CHECK(tf.den[0] == 1.0);
    CHECK(tf.den[1] == Approx(1e-4).epsilon(1e-15));
    CHECK(tf.den[2] == Approx(1e-7).epsilon(1e-15));
    CHECK(tf_eval(tf, 0.0).real() == 12.0 / 0.5);
    CHECK(tf_eval(tf, 0.0).imag() == 0.0);

    for (const auto& r : polynomial_roots(tf.den))
        CHECK(r.real() < 0.0);

    CHECK_THROWS_AS(buck_tf(kLc, 12.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(buck_tf(kLc, 12.0, 1.0), std::invalid_argument);
}

TEST_CASE("boost small-signal model")
{
    const auto tf = boost_tf(kLc, 24.0, 0.5);
    REQUIRE(tf.den.size() == 3);
    CHECK(tf.den[0] == 1.0);
    CHECK(tf.den[1] == Approx(4e-4).epsilon(1e-15));
    CHECK(tf.den[2] == Approx(4e-7).epsilon(1e-15));
    CHECK(tf_eval(tf, 0.0).real() == 24.0 / 0.5);

    const double zero = -tf.num[0] / tf.num[1];
    CHECK(zero == Approx(0.25 * 10.0 / 1e-3));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int k = 0; k < 200; ++k) {
        const ConverterParams p{1e-4 + 1e-2 * u(rng), 1e-5 + 1e-3 * u(rng), 1.0 + 50.0 * u(rng)};
        const auto t = boost_tf(p, 10.0 + 40.0 * u(rng), u(rng));
        REQUIRE(t.num.size() == 2);
        const auto roots = polynomial_roots(t.num);
        REQUIRE(roots.size() == 1);
        CHECK(roots[0].real() > 0.0);
    }
}

TEST_CASE("transfer function evaluation")
{
    const TransferFunction first_order{{1.0}, {1.0, 1.0}};
    CHECK(tf_eval(first_order, 0.0) == std::complex<double>(1.0, 0.0));
    CHECK_THROWS_AS(tf_eval(first_order, -1.0), PoleHit);
    const TransferFunction poly{{2.0, 1.0}, {1.0}};
    CHECK(tf_eval(poly, 3.0) == std::complex<double>(5.0, 0.0));
    CHECK(poly_eval({1.0, 0.0, 1.0}, {0.0, 1.0}) == std::complex<double>(0.0, 0.0));
}
