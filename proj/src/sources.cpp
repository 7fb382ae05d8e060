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

#include "dcgrid/sources.hpp"

#include "dcgrid/errors.hpp"
#include "dcgrid/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcgrid {

double pv_residual(const PvPanel& panel, double v, double i, double g)
{
    const double vd = v + i * panel.r_s;
    return panel.i_ph_stc * (g / panel.g_stc) - panel.i_0 * std::expm1(vd / panel.n_vt) -
           vd / panel.r_sh - i;
}

double pv_current_unchecked(const PvPanel& panel, double v, double g)
{
    const double slope_const = -panel.r_s / panel.r_sh - 1.0;
    const double slope_exp = -panel.i_0 * panel.r_s / panel.n_vt;

    double i = panel.i_ph_stc * (g / panel.g_stc);
    double r = pv_residual(panel, v, i, g);
    for (int it = 0; it < kPvMaxIterations; ++it) {
        if (std::abs(r) < kPvTolerance)
            return i;
        const double df = slope_exp * std::exp((v + i * panel.r_s) / panel.n_vt) + slope_const;
        const double step = -r / df;

        // halve the step while the residual grows
        double lambda = 1.0;
        double i_new = i + step;
        double r_new = pv_residual(panel, v, i_new, g);
        while (!(std::abs(r_new) <= std::abs(r)) && lambda >= 1e-10) {
            lambda *= 0.5;
            i_new = i + lambda * step;
            r_new = pv_residual(panel, v, i_new, g);
        }
        i = i_new;
        r = r_new;
    }
    if (std::abs(r) < kPvTolerance)
        return i;
    throw NoConvergence("pv_current: Newton iteration did not converge at v=" + std::to_string(v) +
                        " V, g=" + std::to_string(g) + " W/m2");
}

double pv_current(const PvPanel& panel, double v, double g)
{
    if (!(v >= 0.0))
        throw std::invalid_argument("pv_current: voltage must be >= 0");
    if (!(g >= 0.0))
        throw std::invalid_argument("pv_current: irradiance must be >= 0");
    return pv_current_unchecked(panel, v, g);
}

double pv_open_circuit_voltage(const PvPanel& panel, double g)
{
    const double i_ph = panel.i_ph_stc * (g / panel.g_stc);
    if (i_ph <= 0.0)
        return 0.0;
    // h(v) = i_ph - i_0*(e^(v/n_vt) - 1) - v/r_sh is strictly decreasing;
    // h(0) > 0 and h(hi) < 0.
    auto h = [&](double v) { return i_ph - panel.i_0 * std::expm1(v / panel.n_vt) - v / panel.r_sh; };
    double lo = 0.0;
    double hi = panel.n_vt * std::log1p(i_ph / panel.i_0);
    double v = hi;
    for (int it = 0; it < 200; ++it) {
        const double hv = h(v);
        if (hv > 0.0)
            lo = v;
        else
            hi = v;
        const double dh = -panel.i_0 / panel.n_vt * std::exp(v / panel.n_vt) - 1.0 / panel.r_sh;
        double next = v - hv / dh;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - v) <= 1e-13 * std::max(1.0, v) || hi - lo <= 1e-13)
            return next;
        v = next;
    }
    return v;
}

MaxPowerPoint mpp_oracle(const PvPanel& panel, double g)
{
    if (!(g > 0.0))
        throw std::invalid_argument("mpp_oracle: irradiance must be > 0");
    const double v_oc = pv_open_circuit_voltage(panel, g);
    const auto n = static_cast<std::size_t>(std::floor(v_oc / kMppSweepStep)) + 1;

    std::vector<double> v(n);
    std::vector<double> i(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = static_cast<double>(k) * kMppSweepStep;
    kernels::pv_current_batch(panel, g, v, i);

    MaxPowerPoint best;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = v[k] * i[k];
        if (p > best.p_mpp) {
            best.p_mpp = p;
            best.v_mpp = v[k];
        }
    }
    return best;
}

WindTerminal wind_terminal(const WindMG& mg, double wind, double i_load, double omega_prev, double dt)
{
    const double target = mg.k_w * wind;
    const double omega =
        mg.tau > 0.0 ? target + (omega_prev - target) * std::exp(-dt / mg.tau) : target;
    return {wind_voltage(mg, omega, i_load), omega};
}

} // namespace dcgrid
