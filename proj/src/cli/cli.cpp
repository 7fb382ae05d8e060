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

#include "cli/cli.hpp"

#include "dcgrid/engine.hpp"
#include "dcgrid/errors.hpp"
#include "dcgrid/stability.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <array>
#include <optional>
#include <set>

namespace dcgrid::cli {

using nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// ----------------------------------------------------------------------------
// Error mapping
// ----------------------------------------------------------------------------

struct Failure {
    int code = kExitInternal;
    std::string kind;
    std::string message;
    std::optional<double> time;
    std::string signal;
};

Failure classify(std::exception_ptr ep)
{
    try {
        std::rethrow_exception(ep);
    } catch (const IoError& e) {
        return {kExitInput, "io", e.what(), {}, {}};
    } catch (const ParseError& e) {
        return {kExitInput, "parse", e.what(), {}, {}};
    } catch (const ValidationError& e) {
        return {kExitInput, "validation", e.what(), {}, {}};
    } catch (const InputError& e) {
        return {kExitInput, "input", e.what(), {}, {}};
    } catch (const NumericalBlowup& e) {
        return {kExitNumerical, "numerical_blowup", e.what(), e.time(), e.signal()};
    } catch (const NoStableGain& e) {
        return {kExitNumerical, "no_stable_gain", e.what(), {}, {}};
    } catch (const NoConvergence& e) {
        return {kExitNumerical, "no_convergence", e.what(), {}, {}};
    } catch (const PoleHit& e) {
        return {kExitNumerical, "pole_hit", e.what(), {}, {}};
    } catch (const std::invalid_argument& e) {
        return {kExitInput, "invalid_argument", e.what(), {}, {}};
    } catch (const std::exception& e) {
        return {kExitInternal, "internal", e.what(), {}, {}};
    } catch (...) {
        return {kExitInternal, "internal", "unknown exception", {}, {}};
    }
}

ojson failure_json(const Failure& f)
{
    ojson j;
    j["kind"] = f.kind;
    j["message"] = f.message;
    j["exit_code"] = f.code;
    if (f.time)
        j["time"] = *f.time;
    if (!f.signal.empty())
        j["signal"] = f.signal;
    return j;
}

int report_failure(const Failure& f, bool as_json, std::ostream& out, std::ostream& err)
{
    err << "dcgrid: error: " << f.message << "\n";
    if (as_json)
        out << ojson{{"error", failure_json(f)}}.dump(2) << "\n";
    return f.code;
}

/// Runs body(k) for k in [0, n) on up to `jobs` threads. Exceptions stay
/// inside body.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body)
{
    const auto workers = static_cast<std::size_t>(std::clamp<long>(jobs, 1, static_cast<long>(std::max<std::size_t>(n, 1))));
    if (workers <= 1) {
        for (std::size_t k = 0; k < n; ++k)
            body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < n; k = next++)
                body(k);
        });
    for (auto& t : pool)
        t.join();
}

std::string csv_list(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k)
        s += (k ? ", " : "") + format_double(v[k]);
    return s;
}

// ----------------------------------------------------------------------------
// Overrides
// ----------------------------------------------------------------------------

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : path) {
        if (ch == '.' || ch == '[' || ch == ']') {
            if (!cur.empty())
                parts.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty())
        parts.push_back(std::move(cur));
    return parts;
}

json* array_element(json& arr, const std::string& key, const std::string& where)
{
    if (!key.empty() && std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        const auto idx = std::stoul(key);
        if (idx >= arr.size())
            throw ValidationError(where, "index out of range");
        return &arr[idx];
    }
    for (auto& el : arr)
        if (el.is_object() && el.contains("name") && el["name"] == key)
            return &el;
    throw ValidationError(where, "no element named '" + key + "'");
}

} // namespace

void apply_overrides(json& doc, const std::vector<std::string>& overrides)
{
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ValidationError(ov, "override must look like path=value");
        const std::string path = ov.substr(0, eq);
        const std::string text = ov.substr(eq + 1);
        const auto parts = split_path(path);
        if (parts.empty())
            throw ValidationError(ov, "empty override path");

        json value = json::parse(text, nullptr, false);
        if (value.is_discarded())
            value = text;

        json* node = &doc;
        std::string where;
        for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
            where += (where.empty() ? "" : ".") + parts[k];
            if (node->is_array()) {
                node = array_element(*node, parts[k], where);
            } else if (node->is_object() && node->contains(parts[k])) {
                node = &(*node)[parts[k]];
            } else {
                throw ValidationError(where, "override path does not exist in the scenario");
            }
        }
        const std::string& last = parts.back();
        if (node->is_array())
            *array_element(*node, last, path) = value;
        else if (node->is_object())
            (*node)[last] = value; // unknown keys are rejected by the strict scenario reader
        else
            throw ValidationError(path, "override path does not exist in the scenario");
    }
}

// ----------------------------------------------------------------------------
// MPP sweep
// ----------------------------------------------------------------------------

namespace {

constexpr double kRigBusVoltage = 48.0;

} // namespace

json mpp_rig_scenario(const PvPanel& panel, double g, const SweepConfig& cfg)
{
    const double v_oc = pv_open_circuit_voltage(panel, panel.g_stc);
    if (!(v_oc < 0.9 * kRigBusVoltage))
        throw ValidationError("panel", "open-circuit voltage must stay below 90 % of the 48 V rig bus");
    const double d_init = std::clamp(1.0 - 0.8 * v_oc / kRigBusVoltage, 0.05, 0.95);

    return json{
        {"bus", {{"v_ref", kRigBusVoltage}, {"c_bus", 1e-3}}},
        {"sources",
         json::array({{{"name", "pv"},
                       {"kind", "pv"},
                       {"i_ph_stc", panel.i_ph_stc},
                       {"i_0", panel.i_0},
                       {"n_vt", panel.n_vt},
                       {"r_s", panel.r_s},
                       {"r_sh", panel.r_sh},
                       {"g_stc", panel.g_stc},
                       {"irradiance", g}}})},
        {"converters",
         json::array({{{"name", "pv_boost"},
                       {"kind", "boost"},
                       {"input", "pv"},
                       {"l", 1e-3},
                       {"c", 1e-4},
                       {"r_nom", 20.0},
                       {"c_in", 4.7e-4},
                       {"control",
                        {{"mode", "mppt"}, {"duty_init", d_init}, {"delta_d", 0.01}, {"period", 2.0}}}},
                      {{"name", "batt_conv"},
                       {"kind", "bidirectional"},
                       {"input", "battery"},
                       {"l", 1e-3},
                       {"c", 1e-4},
                       {"current_loop_tau", 1e-3}}})},
        {"battery",
         {{"capacity_ah", 10.0}, {"soc_init", 0.5}, {"v_full", 27.0}, {"v_empty", 22.0}, {"r_int", 0.05}}},
        {"loads", json::array({{{"name", "r_load"}, {"kind", "resistive"}, {"r", 48.0}}})},
        {"sim", {{"dt", cfg.dt}, {"t_end", cfg.t_end}, {"log_every", 20}}},
    };
}

std::vector<SweepRow> mpp_sweep(const PvPanel& panel, const std::vector<double>& irradiance,
                                const SweepConfig& cfg)
{
    for (double g : irradiance)
        if (!(g > 0.0))
            throw std::invalid_argument("mpp-sweep: irradiance must be > 0 (got " + format_double(g) + ")");

    std::vector<SweepRow> rows(irradiance.size());
    std::vector<std::exception_ptr> errors(irradiance.size());
    parallel_for(irradiance.size(), cfg.jobs, [&](std::size_t k) {
        try {
            const double g = irradiance[k];
            SweepRow& row = rows[k];
            row.g = g;
            const auto mpp = mpp_oracle(panel, g);
            row.v_mpp = mpp.v_mpp;
            row.p_mpp = mpp.p_mpp;

            const Scenario sc = parse_scenario(mpp_rig_scenario(panel, g, cfg).dump());
            const TraceLog tr = run(sc);
            const double period = sc.converters[0].mppt.period;
            const double t_start = cfg.t_end - cfg.cycle_periods * period;

            const auto t = tr.column("t");
            const auto p = tr.column("pv.p");
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t r = 0; r < t.size(); ++r)
                if (t[r] >= t_start) {
                    sum += p[r];
                    ++n;
                }
            row.p_tracked = n ? sum / static_cast<double>(n) : 0.0;

            double held = sc.converters[0].mppt.duty_init;
            row.p_tracked_min = std::numeric_limits<double>::infinity();
            row.duty_min = std::numeric_limits<double>::infinity();
            row.duty_max = -std::numeric_limits<double>::infinity();
            for (const auto& ev : tr.events) {
                if (ev.kind != EventKind::MpptUpdate)
                    continue;
                if (ev.t <= t_start + 0.5 * cfg.dt) {
                    held = ev.duty;
                    continue;
                }
                row.p_tracked_min = std::min(row.p_tracked_min, ev.power);
                row.duty_min = std::min(row.duty_min, ev.duty);
                row.duty_max = std::max(row.duty_max, ev.duty);
            }
            row.duty_min = std::min(row.duty_min, held);
            row.duty_max = std::max(row.duty_max, held);
            if (!std::isfinite(row.p_tracked_min))
                row.p_tracked_min = row.p_tracked;
        } catch (...) {
            errors[k] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return rows;
}

// ----------------------------------------------------------------------------
// Subcommands
// ----------------------------------------------------------------------------

namespace {

struct RunOutcome {
    std::string scenario;
    std::string out_dir;
    std::optional<Failure> failure;
    AuditReport audit;
    std::size_t rows = 0;
    std::size_t events = 0;
    std::size_t violations = 0;
};

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream os(p, std::ios::binary);
    os << text;
    if (!os)
        throw std::runtime_error("cannot write '" + p.string() + "'");
}

Scenario load_with_overrides(const std::string& path, const std::vector<std::string>& overrides)
{
    if (overrides.empty())
        return load_scenario(path);
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    apply_overrides(doc, overrides);
    return parse_scenario(doc.dump());
}

RunOutcome run_one(const std::string& path, const fs::path& out_dir, const std::vector<std::string>& overrides)
{
    RunOutcome o;
    o.scenario = path;
    o.out_dir = out_dir.string();
    try {
        const Scenario sc = load_with_overrides(path, overrides);
        const TraceLog tr = run(sc);
        o.audit = energy_audit(tr);
        o.rows = tr.rows();
        o.events = tr.events.size();
        o.violations = rating_check(converter_ratings(sc), diode_ratings(sc), tr).size();

        fs::create_directories(out_dir);
        std::ostringstream csv;
        write_csv(tr, csv);
        write_file(out_dir / "trace.csv", csv.str());
        write_file(out_dir / "events.json", events_to_json(tr.events));
        write_file(out_dir / "audit.json", audit_to_json(o.audit));
    } catch (...) {
        o.failure = classify(std::current_exception());
    }
    return o;
}

std::vector<fs::path> output_dirs(const std::vector<std::string>& scenarios, const fs::path& out)
{
    if (scenarios.size() == 1)
        return {out};
    std::vector<fs::path> dirs;
    std::set<std::string> used;
    for (const auto& s : scenarios) {
        std::string stem = fs::path(s).stem().string();
        std::string name = stem;
        for (int n = 2; used.contains(name); ++n)
            name = stem + "-" + std::to_string(n);
        used.insert(name);
        dirs.push_back(out / name);
    }
    return dirs;
}

int cmd_run(const std::vector<std::string>& scenarios, const std::string& out, const std::vector<std::string>& sets,
            int jobs, bool as_json, std::ostream& os, std::ostream& err)
{
    const auto dirs = output_dirs(scenarios, out);
    std::vector<RunOutcome> outcomes(scenarios.size());
    parallel_for(scenarios.size(), jobs,
                 [&](std::size_t k) { outcomes[k] = run_one(scenarios[k], dirs[k], sets); });

    int code = kExitOk;
    ojson list = ojson::array();
    for (const auto& o : outcomes) {
        if (o.failure) {
            err << "dcgrid: error: " << o.scenario << ": " << o.failure->message << "\n";
            if (code == kExitOk)
                code = o.failure->code;
        } else if (!as_json) {
            os << o.scenario << ": ok, " << o.rows << " samples, " << o.events << " events, "
               << o.violations << " rating violations, energy residual " << format_double(o.audit.relative_residual)
               << " (relative) -> " << o.out_dir << "\n";
        }
        if (as_json) {
            ojson j;
            j["scenario"] = o.scenario;
            j["out_dir"] = o.out_dir;
            if (o.failure) {
                j["status"] = "error";
                j["error"] = failure_json(*o.failure);
            } else {
                j["status"] = "ok";
                j["samples"] = o.rows;
                j["events"] = o.events;
                j["rating_violations"] = o.violations;
                j["audit"] = ojson::parse(audit_to_json(o.audit));
            }
            list.push_back(std::move(j));
        }
    }
    if (as_json)
        os << ojson{{"exit_code", code}, {"runs", list}}.dump(2) << "\n";
    return code;
}

struct TuneArgs {
    std::string topology;
    double l = 0.0, c = 0.0, r = 0.0, v = 0.0, d = 0.0, k_i = 0.0;
    std::optional<double> k_p, k_u, t_u;
};

ojson routh_json(const RouthResult& rr)
{
    ojson j;
    j["stable"] = rr.stable;
    j["status"] = rr.status == RouthStatus::Ok ? "ok" : "degenerate_row";
    j["sign_changes"] = rr.sign_changes;
    j["epsilon_substitutions"] = rr.epsilon_substitutions;
    if (rr.degenerate_row >= 0)
        j["degenerate_row"] = rr.degenerate_row;
    j["first_column"] = rr.first_column();
    j["table"] = rr.table;
    return j;
}

void print_routh(const RouthResult& rr, std::ostream& os)
{
    const int n = static_cast<int>(rr.table.size()) - 1;
    for (std::size_t k = 0; k < rr.table.size(); ++k) {
        os << "  s^" << (n - static_cast<int>(k)) << " |";
        for (double v : rr.table[k]) {
            std::string s = format_double(v);
            os << ' ' << std::string(s.size() < 14 ? 14 - s.size() : 0, ' ') << s;
        }
        os << "\n";
    }
    os << "  verdict: " << (rr.stable ? "stable" : "unstable") << ", " << rr.sign_changes
       << " sign changes in the first column";
    if (rr.status == RouthStatus::DegenerateRow)
        os << ", row " << rr.degenerate_row << " vanished";
    if (rr.epsilon_substitutions)
        os << ", " << rr.epsilon_substitutions << " epsilon substitutions";
    os << "\n";
}

int cmd_tune(const TuneArgs& a, bool as_json, std::ostream& os)
{
    const ConverterParams p{a.l, a.c, a.r};
    for (auto [v, name] : {std::pair{a.l, "--L"}, {a.c, "--C"}, {a.r, "--R"}, {a.v, "--V"}})
        if (!(v > 0.0))
            throw std::invalid_argument(std::string(name) + " must be > 0");
    if (!(a.k_i > 0.0))
        throw std::invalid_argument("--ki must be > 0: the Routh gain search needs integral action");

    const bool boost = a.topology == "boost";
    const TransferFunction tf = boost ? boost_tf(p, a.v, a.d) : buck_tf(p, a.v, a.d);
    const KpBound bound = max_stable_kp(tf, a.k_i);
    const double k_p = a.k_p.value_or(0.5 * bound.k_p_max);
    const auto poly = pi_closed_loop_polynomial(tf, k_p, a.k_i);
    const RouthResult rr = routh_array(poly);
    std::optional<double> rhp_zero;
    if (boost) {
        const double dp = 1.0 - a.d;
        rhp_zero = dp * dp * a.r / a.l;
    }

    std::optional<std::array<PidGains, 3>> zn;
    if (a.k_u || a.t_u) {
        if (!a.k_u || !a.t_u)
            throw std::invalid_argument("--ku and --tu must be given together");
        zn = std::array{ziegler_nichols(*a.k_u, *a.t_u, ZnRule::P), ziegler_nichols(*a.k_u, *a.t_u, ZnRule::PI),
                        ziegler_nichols(*a.k_u, *a.t_u, ZnRule::PID)};
    }

    if (as_json) {
        ojson j;
        j["topology"] = a.topology;
        j["plant"] = {{"l", a.l}, {"c", a.c}, {"r", a.r}, {"v", a.v}, {"d", a.d}};
        j["transfer_function"] = {{"order", "ascending"}, {"num", tf.num}, {"den", tf.den}};
        j["rhp_zero"] = rhp_zero ? ojson(*rhp_zero) : ojson(nullptr);
        j["k_i"] = a.k_i;
        j["max_stable_kp"] = bound.k_p_max;
        j["unconditionally_stable"] = bound.unconditional;
        j["k_p"] = k_p;
        j["closed_loop_polynomial"] = poly;
        j["routh"] = routh_json(rr);
        if (zn) {
            const char* names[] = {"P", "PI", "PID"};
            ojson z;
            for (std::size_t k = 0; k < 3; ++k) {
                const auto& g = (*zn)[k];
                z[names[k]] = {{"k_p", g.k_p},
                               {"t_i", std::isfinite(g.t_i) ? ojson(g.t_i) : ojson(nullptr)},
                               {"t_d", g.t_d},
                               {"k_i", std::isfinite(g.t_i) ? g.k_p / g.t_i : 0.0},
                               {"k_d", g.k_p * g.t_d}};
            }
            j["ziegler_nichols"] = {{"k_u", *a.k_u}, {"t_u", *a.t_u}, {"rules", z}};
        }
        os << j.dump(2) << "\n";
        return kExitOk;
    }

    os << a.topology << " plant: L=" << format_double(a.l) << " C=" << format_double(a.c)
       << " R=" << format_double(a.r) << " V=" << format_double(a.v) << " D=" << format_double(a.d) << "\n";
    os << "transfer function (coefficients ascending in s):\n";
    os << "  num: [" << csv_list(tf.num) << "]\n";
    os << "  den: [" << csv_list(tf.den) << "]\n";
    if (rhp_zero)
        os << "  right-half-plane zero at s = +" << format_double(*rhp_zero) << " rad/s\n";
    os << "max stable k_p for k_i=" << format_double(a.k_i) << ": " << format_double(bound.k_p_max)
       << (bound.unconditional ? " (stable up to the search cap)" : "") << "\n";
    os << "closed loop with k_p=" << format_double(k_p) << ": [" << csv_list(poly) << "]\n";
    os << "Routh array:\n";
    print_routh(rr, os);
    if (zn) {
        os << "Ziegler-Nichols (k_u=" << format_double(*a.k_u) << ", t_u=" << format_double(*a.t_u) << "):\n";
        const char* names[] = {"P  ", "PI ", "PID"};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto& g = (*zn)[k];
            os << "  " << names[k] << " k_p=" << format_double(g.k_p)
               << " t_i=" << (std::isfinite(g.t_i) ? format_double(g.t_i) : "inf")
               << " t_d=" << format_double(g.t_d) << "\n";
        }
    }
    return kExitOk;
}

int cmd_routh(std::vector<double> coeffs, bool ascending, bool as_json, std::ostream& os)
{
    if (!ascending)
        std::reverse(coeffs.begin(), coeffs.end());
    const RouthResult rr = routh_array(coeffs);
    std::vector<std::complex<double>> roots;
    std::optional<std::string> roots_error;
    try {
        roots = polynomial_roots(coeffs);
    } catch (const NoConvergence& e) {
        roots_error = e.what();
    }

    if (as_json) {
        ojson j;
        j["coefficients_ascending"] = coeffs;
        j["routh"] = routh_json(rr);
        ojson r = ojson::array();
        for (const auto& z : roots)
            r.push_back({z.real(), z.imag()});
        j["roots"] = roots_error ? ojson(nullptr) : r;
        if (roots_error)
            j["roots_error"] = *roots_error;
        os << j.dump(2) << "\n";
        return kExitOk;
    }
    os << "Routh array:\n";
    print_routh(rr, os);
    if (roots_error) {
        os << "roots: " << *roots_error << "\n";
    } else {
        os << "roots:\n";
        for (const auto& z : roots)
            os << "  " << format_double(z.real()) << (z.imag() < 0 ? " - " : " + ")
               << format_double(std::abs(z.imag())) << "j\n";
    }
    return kExitOk;
}

std::pair<std::string, double> name_value(const std::string& s, const char* flag)
{
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument(std::string(flag) + " expects converter=value, got '" + s + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s.substr(eq + 1), &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() - eq - 1 || !(v > 0.0))
        throw std::invalid_argument(std::string(flag) + ": '" + s.substr(eq + 1) + "' is not a positive number");
    return {s.substr(0, eq), v};
}

int cmd_report(const std::string& trace_path, const std::optional<std::string>& scenario,
               const std::vector<std::string>& ratings, const std::vector<std::string>& diodes, bool as_json,
               std::ostream& os)
{
    std::vector<ConverterRating> conv;
    std::vector<DiodeRating> diode;
    if (scenario) {
        const Scenario sc = load_scenario(*scenario);
        conv = converter_ratings(sc);
        diode = diode_ratings(sc);
    }
    for (const auto& s : ratings) {
        auto [name, v] = name_value(s, "--rating");
        std::erase_if(conv, [&](const ConverterRating& r) { return r.converter == name; });
        conv.push_back({name, v});
    }
    for (const auto& s : diodes) {
        auto [name, v] = name_value(s, "--diode");
        std::erase_if(diode, [&](const DiodeRating& r) { return r.converter == name; });
        diode.push_back({name, v});
    }
    if (conv.empty() && diode.empty())
        throw std::invalid_argument("report: no ratings given (use --scenario, --rating or --diode)");

    std::istringstream in(read_text_file(trace_path));
    const TraceLog tr = read_csv(in);
    for (const auto& r : conv)
        if (!tr.index_of(r.converter + ".p_out"))
            throw ValidationError("--rating", "trace has no signal '" + r.converter + ".p_out'");
    for (const auto& d : diode)
        if (!tr.index_of(d.converter + ".i_port"))
            throw ValidationError("--diode", "trace has no signal '" + d.converter + ".i_port'");

    const auto violations = rating_check(conv, diode, tr);
    std::optional<AuditReport> audit;
    if (tr.index_of("e_src") && tr.index_of("w_stored"))
        audit = energy_audit(tr);

    if (as_json) {
        ojson j;
        j["trace"] = trace_path;
        j["samples"] = tr.rows();
        j["violations"] = ojson::parse(violations_to_json(violations));
        j["audit"] = audit ? ojson::parse(audit_to_json(*audit)) : ojson(nullptr);
        os << j.dump(2) << "\n";
        return kExitOk;
    }
    os << "trace: " << trace_path << " (" << tr.rows() << " samples)\n";
    os << violations_to_text(violations);
    if (audit)
        os << "energy audit: source " << format_double(audit->e_src) << " J, load " << format_double(audit->e_load)
           << " J, battery " << format_double(audit->e_batt) << " J, loss " << format_double(audit->e_loss)
           << " J, residual " << format_double(audit->residual) << " J (relative "
           << format_double(audit->relative_residual) << ")\n";
    return kExitOk;
}

int cmd_mpp_sweep(const PvPanel& panel, const std::vector<double>& g, const SweepConfig& cfg,
                  const std::optional<std::string>& out_path, bool as_json, std::ostream& os)
{
    const auto rows = mpp_sweep(panel, g, cfg);

    std::ostringstream csv;
    csv << "g,v_mpp,p_mpp,p_tracked,p_tracked_min,ratio,duty_min,duty_max\n";
    for (const auto& r : rows)
        csv << format_double(r.g) << ',' << format_double(r.v_mpp) << ',' << format_double(r.p_mpp) << ','
            << format_double(r.p_tracked) << ',' << format_double(r.p_tracked_min) << ','
            << format_double(r.ratio()) << ',' << format_double(r.duty_min) << ',' << format_double(r.duty_max)
            << '\n';
    if (out_path)
        write_file(*out_path, csv.str());

    if (as_json) {
        ojson list = ojson::array();
        for (const auto& r : rows)
            list.push_back({{"g", r.g},
                            {"v_mpp", r.v_mpp},
                            {"p_mpp", r.p_mpp},
                            {"p_tracked", r.p_tracked},
                            {"p_tracked_min", r.p_tracked_min},
                            {"ratio", r.ratio()},
                            {"duty_min", r.duty_min},
                            {"duty_max", r.duty_max}});
        os << ojson{{"rows", list}}.dump(2) << "\n";
    } else if (!out_path) {
        os << csv.str();
    }
    return kExitOk;
}

} // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"dcgrid - deterministic DC microgrid simulation engine", "dcgrid"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "dcgrid 0.1.0");
    bool as_json = false;
    app.add_flag("--json", as_json, "Machine-readable JSON on stdout");

    // run
    auto* run_cmd = app.add_subcommand("run", "Simulate scenario files; writes trace.csv, events.json, audit.json");
    std::vector<std::string> scenarios;
    std::string out_dir = "dcgrid-out";
    std::vector<std::string> sets;
    int jobs = 1;
    run_cmd->add_option("scenario", scenarios, "Scenario JSON file(s)")->required();
    run_cmd->add_option("-o,--out", out_dir, "Output directory (one sub-directory per scenario when several)")
        ->capture_default_str();
    run_cmd->add_option("--set", sets, "Override a scenario field, e.g. --set sim.dt=1e-5 (repeatable)");
    run_cmd->add_option("-j,--jobs", jobs, "Scenarios simulated concurrently")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run_cmd->add_flag("--json", as_json, "Machine-readable JSON on stdout");

    // tune
    auto* tune_cmd = app.add_subcommand("tune", "Small-signal model, Routh array and gain limits for a PI loop");
    TuneArgs ta;
    double kp_arg = 0.0, ku_arg = 0.0, tu_arg = 0.0;
    tune_cmd->add_option("--topology", ta.topology, "buck or boost")
        ->required()
        ->check(CLI::IsMember({"buck", "boost"}));
    tune_cmd->add_option("--L", ta.l, "Inductance (H)")->required();
    tune_cmd->add_option("--C", ta.c, "Output capacitance (F)")->required();
    tune_cmd->add_option("--R", ta.r, "Load resistance (ohm)")->required();
    tune_cmd->add_option("--V", ta.v, "Output voltage at the operating point (V)")->required();
    tune_cmd->add_option("--D", ta.d, "Duty cycle at the operating point, 0 < D < 1")->required();
    tune_cmd->add_option("--ki", ta.k_i, "Integral gain (1/s), must be > 0")->required();
    auto* kp_opt = tune_cmd->add_option("--kp", kp_arg, "Proportional gain for the Routh array (default: half the limit)");
    auto* ku_opt = tune_cmd->add_option("--ku", ku_arg, "Ultimate gain for the Ziegler-Nichols table");
    auto* tu_opt = tune_cmd->add_option("--tu", tu_arg, "Ultimate period (s) for the Ziegler-Nichols table");
    tune_cmd->add_flag("--json", as_json, "Machine-readable JSON on stdout");

    // routh
    auto* routh_cmd = app.add_subcommand("routh", "Routh-Hurwitz table and roots of a polynomial");
    std::vector<double> coeffs;
    bool ascending = false;
    routh_cmd->add_option("coefficients", coeffs, "Coefficients, highest power first")->required();
    routh_cmd->add_flag("--ascending", ascending, "Coefficients are given lowest power first");
    routh_cmd->add_flag("--json", as_json, "Machine-readable JSON on stdout");

    // mpp-sweep
    auto* sweep_cmd = app.add_subcommand("mpp-sweep", "Oracle MPP versus tracked P&O power over irradiance levels");
    PvPanel panel{5.0, 1e-9, 1.5, 0.01, 1000.0, 1000.0};
    std::vector<double> levels{200.0, 400.0, 600.0, 800.0, 1000.0};
    SweepConfig sweep_cfg;
    std::string sweep_out;
    sweep_cmd->add_option("-g,--irradiance", levels, "Irradiance levels (W/m^2)")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--i-ph", panel.i_ph_stc, "Photocurrent at reference irradiance (A)")->capture_default_str();
    sweep_cmd->add_option("--i0", panel.i_0, "Diode saturation current (A)")->capture_default_str();
    sweep_cmd->add_option("--n-vt", panel.n_vt, "Modified thermal voltage (V)")->capture_default_str();
    sweep_cmd->add_option("--rs", panel.r_s, "Series resistance (ohm)")->capture_default_str();
    sweep_cmd->add_option("--rsh", panel.r_sh, "Shunt resistance (ohm)")->capture_default_str();
    sweep_cmd->add_option("--g-stc", panel.g_stc, "Reference irradiance (W/m^2)")->capture_default_str();
    sweep_cmd->add_option("--t-end", sweep_cfg.t_end, "Simulated time per level (s)")->capture_default_str();
    sweep_cmd->add_option("--dt", sweep_cfg.dt, "Integration step (s)")->capture_default_str();
    sweep_cmd->add_option("-j,--jobs", sweep_cfg.jobs, "Levels simulated concurrently")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    auto* sweep_out_opt = sweep_cmd->add_option("-o,--out", sweep_out, "Write the CSV table to this file");
    sweep_cmd->add_flag("--json", as_json, "Machine-readable JSON on stdout");

    // report
    auto* report_cmd = app.add_subcommand("report", "Rating check (75 % converter derating, port diode current)");
    std::string trace_path, report_scenario;
    std::vector<std::string> ratings, diodes;
    report_cmd->add_option("trace", trace_path, "trace.csv produced by run")->required();
    auto* report_sc_opt = report_cmd->add_option("-s,--scenario", report_scenario, "Take ratings from this scenario");
    report_cmd->add_option("--rating", ratings, "Converter power rating, name=watts (repeatable)");
    report_cmd->add_option("--diode", diodes, "Port diode current rating, name=amps (repeatable)");
    report_cmd->add_flag("--json", as_json, "Machine-readable JSON on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        if (as_json)
            out << ojson{{"error", {{"kind", "usage"}, {"message", e.what()}, {"exit_code", kExitInput}}}}.dump(2)
                << "\n";
        return kExitInput;
    }

    try {
        if (*run_cmd)
            return cmd_run(scenarios, out_dir, sets, jobs, as_json, out, err);
        if (*tune_cmd) {
            if (*kp_opt)
                ta.k_p = kp_arg;
            if (*ku_opt)
                ta.k_u = ku_arg;
            if (*tu_opt)
                ta.t_u = tu_arg;
            return cmd_tune(ta, as_json, out);
        }
        if (*routh_cmd)
            return cmd_routh(coeffs, ascending, as_json, out);
        if (*sweep_cmd) {
            std::optional<std::string> path;
            if (*sweep_out_opt)
                path = sweep_out;
            return cmd_mpp_sweep(panel, levels, sweep_cfg, path, as_json, out);
        }
        if (*report_cmd) {
            std::optional<std::string> sc;
            if (*report_sc_opt)
                sc = report_scenario;
            return cmd_report(trace_path, sc, ratings, diodes, as_json, out);
        }
    } catch (...) {
        return report_failure(classify(std::current_exception()), as_json, out, err);
    }
    return kExitInternal;
}

} // namespace dcgrid::cli
