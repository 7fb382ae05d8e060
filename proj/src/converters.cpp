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

#include <cmath>
#include <stdexcept>

namespace dcgrid {

namespace {

void require_open_duty(double d, const char* who)
{
    if (!(d > 0.0 && d < 1.0))
        throw std::invalid_argument(std::string(who) + ": duty must lie in (0, 1)");
}

} // namespace

StateDerivative buck_derivatives(const ConverterParams& p, const ConverterState& st, double v_in, double d,
                                 double i_out)
{
    double di = (d * v_in - st.v_c) / p.l;
    if (st.i_l <= 0.0 && di < 0.0)
        di = 0.0;
    return {di, (st.i_l - i_out) / p.c};
}

StateDerivative boost_derivatives(const ConverterParams& p, const ConverterState& st, double v_in, double d,
                                  double i_out)
{
    const double dp = 1.0 - d;
    double di = (v_in - dp * st.v_c) / p.l;
    if (st.i_l <= 0.0 && di < 0.0)
        di = 0.0;
    return {di, (dp * st.i_l - i_out) / p.c};
}

const char* mode_name(Mode m) noexcept
{
    switch (m) {
    case Mode::Charge:
        return "charge";
    case Mode::Discharge:
        return "discharge";
    case Mode::Idle:
        return "idle";
    }
    return "unknown";
}

double bidir_bus_current(const ConverterState& st, double d, Mode mode) noexcept
{
    switch (mode) {
    case Mode::Charge:
        return d * st.i_l;
    case Mode::Discharge:
        return (1.0 - d) * st.i_l;
    case Mode::Idle:
        break;
    }
    return 0.0;
}

StateDerivative bidir_derivatives(const ConverterParams& p, const ConverterState& st, double v_batt,
                                  double v_bus, double d, Mode mode)
{
    switch (mode) {
    case Mode::Charge:
        // buck from the bus into the battery
        return {(d * v_bus - v_batt) / p.l, -d * st.i_l / p.c};
    case Mode::Discharge:
        // boost from the battery onto the bus; i_l < 0 while discharging
        return {((1.0 - d) * v_bus - v_batt) / p.l, -(1.0 - d) * st.i_l / p.c};
    case Mode::Idle:
        break;
    }
    return {0.0, 0.0};
}

TransferFunction buck_tf(const ConverterParams& p, double v_out, double d)
{
    require_open_duty(d, "buck_tf");
    return {{v_out / d}, {1.0, p.l / p.r_nom, p.l * p.c}};
}

TransferFunction boost_tf(const ConverterParams& p, double v_out, double d)
{
    require_open_duty(d, "boost_tf");
    const double dp = 1.0 - d;
    const double gain = v_out / dp;
    const double tz = p.l / (dp * dp * p.r_nom);
    return {{gain, -gain * tz}, {1.0, tz, p.l * p.c / (dp * dp)}};
}

std::complex<double> poly_eval(const std::vector<double>& coeffs, std::complex<double> s) noexcept
{
    std::complex<double> acc{0.0, 0.0};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * s + *it;
    return acc;
}

std::complex<double> tf_eval(const TransferFunction& tf, std::complex<double> s)
{
    const auto den = poly_eval(tf.den, s);
    if (std::abs(den) < 1e-15)
        throw PoleHit("tf_eval: s = (" + std::to_string(s.real()) + ", " + std::to_string(s.imag()) +
                      ") is a pole");
    return poly_eval(tf.num, s) / den;
}

} // namespace dcgrid
