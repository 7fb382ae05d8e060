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

#include "dcgrid/stability.hpp"

#include "dcgrid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dcgrid {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool all_zero(const std::vector<double>& row)
{
    return std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; });
}

double max_abs(const std::vector<double>& row)
{
    double m = 0.0;
    for (double x : row)
        m = std::max(m, std::abs(x));
    return m;
}

} // namespace

std::vector<double> RouthResult::first_column() const
{
    std::vector<double> col;
    col.reserve(table.size());
    for (const auto& row : table)
        col.push_back(row.front());
    return col;
}

RouthResult routh_array(const std::vector<double>& coeffs)
{
    if (coeffs.size() < 2)
        throw std::invalid_argument("routh_array: polynomial order must be >= 1");
    if (coeffs.back() == 0.0)
        throw std::invalid_argument("routh_array: leading coefficient is zero");

    const std::size_t n = coeffs.size() - 1;
    const std::size_t width = n / 2 + 1;
    // descending: d[k] multiplies s^(n-k)
    std::vector<double> d(coeffs.rbegin(), coeffs.rend());

    RouthResult res;
    res.table.assign(2, std::vector<double>(width, 0.0));
    for (std::size_t k = 0; k <= n; ++k)
        res.table[k % 2][k / 2] = d[k];

    auto fix_first = [&](std::vector<double>& row, std::size_t idx) -> bool {
        if (all_zero(row)) {
            res.status = RouthStatus::DegenerateRow;
            res.degenerate_row = static_cast<int>(idx);
            return false;
        }
        if (row.front() == 0.0) {
            row.front() = 1e-12 * max_abs(row);
            ++res.epsilon_substitutions;
        }
        return true;
    };

    bool ok = fix_first(res.table[1], 1);
    for (std::size_t r = 2; ok && r <= n; ++r) {
        const auto& above2 = res.table[r - 2];
        const auto& above = res.table[r - 1];
        std::vector<double> row(width, 0.0);
        for (std::size_t j = 0; j + 1 < width; ++j) {
            const double a = above.front() * above2[j + 1];
            const double b = above2.front() * above[j + 1];
            double x = (a - b) / above.front();
            // cancellation below rounding noise is an exact zero
            if (std::abs(a - b) <= 8.0 * kEps * (std::abs(a) + std::abs(b)))
                x = 0.0;
            row[j] = x;
        }
        res.table.push_back(std::move(row));
        ok = fix_first(res.table.back(), r);
    }

    if (res.status == RouthStatus::Ok) {
        const auto col = res.first_column();
        for (std::size_t k = 1; k < col.size(); ++k)
            if ((col[k] > 0.0) != (col[k - 1] > 0.0))
                ++res.sign_changes;
        res.stable = res.sign_changes == 0;
    }
    return res;
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs)
{
    if (coeffs.size() < 2)
        throw std::invalid_argument("polynomial_roots: polynomial order must be >= 1");
    if (coeffs.back() == 0.0)
        throw std::invalid_argument("polynomial_roots: leading coefficient is zero");

    const std::size_t n = coeffs.size() - 1;
    std::vector<double> c(coeffs.size());
    for (std::size_t k = 0; k <= n; ++k)
        c[k] = coeffs[k] / coeffs[n];

    // Fujiwara-style radius for the starting circle
    double radius = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        radius = std::max(radius, std::pow(std::abs(c[k]), 1.0 / static_cast<double>(n - k)));
    radius = std::max(radius, 1e-3);

    using cd = std::complex<double>;
    std::vector<cd> z(n);
    for (std::size_t k = 0; k < n; ++k)
        z[k] = std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4);

    auto rel_residual = [&](cd x) {
        cd acc{0.0, 0.0};
        double scale = 0.0;
        const double ax = std::abs(x);
        for (std::size_t k = n + 1; k-- > 0;) {
            acc = acc * x + c[k];
            scale = scale * ax + std::abs(c[k]);
        }
        return std::abs(acc) / scale;
    };

    constexpr int kMaxIter = 2000;
    for (int it = 0; it < kMaxIter; ++it) {
        double max_step = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            cd num = poly_eval(c, z[k]);
            cd den{1.0, 0.0};
            for (std::size_t j = 0; j < n; ++j)
                if (j != k)
                    den *= z[k] - z[j];
            if (den == cd{0.0, 0.0})
                den = cd{1e-14, 1e-14};
            const cd step = num / den;
            z[k] -= step;
            max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
        }
        if (max_step < 1e-14) {
            break;
        }
    }

    for (const cd& x : z)
        if (!(rel_residual(x) < 1e-10))
            throw NoConvergence("polynomial_roots: Durand-Kerner did not converge");

    std::sort(z.begin(), z.end(), [](const cd& a, const cd& b) {
        if (a.real() != b.real())
            return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return z;
}

std::vector<double> pi_closed_loop_polynomial(const TransferFunction& plant, double k_p, double k_i)
{
    const std::size_t len = std::max(plant.den.size() + 1, plant.num.size() + 1);
    std::vector<double> out(len, 0.0);
    for (std::size_t k = 0; k < plant.den.size(); ++k)
        out[k + 1] += plant.den[k];
    for (std::size_t k = 0; k < plant.num.size(); ++k) {
        out[k] += k_i * plant.num[k];
        out[k + 1] += k_p * plant.num[k];
    }
    while (out.size() > 1 && out.back() == 0.0)
        out.pop_back();
    return out;
}

KpBound max_stable_kp(const TransferFunction& plant, double k_i)
{
    if (!(k_i > 0.0))
        throw std::invalid_argument("max_stable_kp: k_i must be > 0");
    if (plant.num.empty() || plant.den.empty() || plant.num.size() > plant.den.size())
        throw std::invalid_argument("max_stable_kp: plant must be proper");

    auto stable = [&](double k_p) {
        return routh_array(pi_closed_loop_polynomial(plant, k_p, k_i)).stable;
    };

    constexpr double kLow = 1e-9;
    if (!stable(kLow))
        throw NoStableGain("no stabilising k_p: the PI loop is unstable even as k_p -> 0 (k_i = " +
                           std::to_string(k_i) + ")");

    // 20 points per decade from kLow up to the cap
    double lo = kLow;
    double hi = 0.0;
    constexpr int kSteps = 20 * 15;
    for (int j = 1; j <= kSteps; ++j) {
        const double k = kLow * std::pow(10.0, j / 20.0);
        if (!stable(k)) {
            hi = k;
            break;
        }
        lo = k;
    }
    if (hi == 0.0)
        return {kKpSearchCap, true};

    while ((hi - lo) > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        (stable(mid) ? lo : hi) = mid;
    }
    return {lo, false};
}

} // namespace dcgrid
