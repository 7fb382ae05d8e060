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

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dcgrid {

namespace {

constexpr double kIdleBusFloor = 1e-6;
constexpr int kEventSubsteps = 32;

struct SourceSlot {
    const SourceSpec* spec = nullptr;
    int omega = -1;      ///< state index when the shaft lag is dynamic
    double omega0 = 0.0; ///< initial shaft speed
};

struct ConverterSlot {
    const ConverterSpec* spec = nullptr;
    int source = -1; ///< index into sources
    int i_l = -1;
    int v_in = -1; ///< -1: algebraic input (wind without input capacitor)
};

struct BatterySlot {
    const ConverterSpec* conv = nullptr;
    const BatterySpec* spec = nullptr;
    int i_l = -1;
    int soc = -1;
};

/// Discrete controller outputs held over one step.
struct Held {
    std::vector<double> duty; ///< per converter slot
    Mode mode = Mode::Idle;
    double bidir_duty = 0.0;
    double i_ref = 0.0;
};

struct SourceOut {
    double v = 0.0;
    double i = 0.0;
    double omega = 0.0;
};

struct ConverterOut {
    double i_port = 0.0;
    double p_out = 0.0;
};

struct LoadOut {
    double i = 0.0;
    double p = 0.0;
};

struct Outputs {
    std::vector<SourceOut> sources;
    std::vector<ConverterOut> converters;
    std::vector<LoadOut> loads;
    double batt_v = 0.0;
    double batt_i = 0.0;
    double batt_draw = 0.0;
};

class Model {
public:
    explicit Model(const Scenario& sc) : sc_(sc)
    {
        int n = 0;
        v_bus_ = n++;
        c_total_ = sc.bus.c_bus;
        for (const auto& c : sc.converters)
            c_total_ += c.params.c;

        sources_.reserve(sc.sources.size());
        for (const auto& s : sc.sources) {
            SourceSlot slot;
            slot.spec = &s;
            if (s.kind == SourceKind::WindMg) {
                slot.omega0 = s.omega_init.value_or(s.wind.k_w * s.wind_speed.eval(sc.profiles, 0.0));
                if (s.wind.tau > 0.0) {
                    slot.omega = n++;
                    names_.push_back(s.name + ".omega");
                }
            }
            sources_.push_back(slot);
        }
        // names_ collects state names in index order; v_bus goes first.
        names_.insert(names_.begin(), "v_bus");

        for (const auto& c : sc.converters) {
            if (c.kind == ConverterKind::Bidirectional) {
                battery_.conv = &c;
                battery_.spec = &*sc.battery;
                continue;
            }
            ConverterSlot slot;
            slot.spec = &c;
            for (std::size_t k = 0; k < sc.sources.size(); ++k)
                if (sc.sources[k].name == c.input)
                    slot.source = static_cast<int>(k);
            slot.i_l = n++;
            names_.push_back(c.name + ".i_l");
            if (c.c_in > 0.0) {
                slot.v_in = n++;
                names_.push_back(c.name + ".v_in");
            }
            converters_.push_back(slot);
        }
        if (battery_.conv) {
            battery_.i_l = n++;
            names_.push_back(battery_.conv->name + ".i_l");
            battery_.soc = n++;
            names_.push_back("battery.soc");
        }
        n_dynamic_ = n;
        e_src_ = n++;
        e_load_ = n++;
        e_batt_ = n++;
        e_loss_ = n++;
        n_states_ = n;

        for (const auto& l : sc.loads)
            load_v_min_.push_back(l.v_min.value_or(0.1 * sc.bus.v_ref));
    }

    int n_states() const noexcept { return n_states_; }
    int n_dynamic() const noexcept { return n_dynamic_; }
    const std::string& state_name(int k) const { return names_[static_cast<std::size_t>(k)]; }
    int e_src() const noexcept { return e_src_; }
    int e_load() const noexcept { return e_load_; }
    int e_batt() const noexcept { return e_batt_; }
    int e_loss() const noexcept { return e_loss_; }
    const std::vector<ConverterSlot>& converters() const noexcept { return converters_; }
    const std::vector<SourceSlot>& sources() const noexcept { return sources_; }
    const BatterySlot& battery() const noexcept { return battery_; }

    double source_open_voltage(const SourceSlot& s, double t) const
    {
        const auto& spec = *s.spec;
        if (spec.kind == SourceKind::Pv)
            return pv_open_circuit_voltage(spec.pv, spec.irradiance.eval(sc_.profiles, t));
        return spec.wind.k_e * s.omega0;
    }

    std::vector<double> initial_state() const
    {
        std::vector<double> x(static_cast<std::size_t>(n_states_), 0.0);
        x[v_bus_] = sc_.bus.v_init.value_or(sc_.bus.v_ref);
        for (const auto& s : sources_)
            if (s.omega >= 0)
                x[s.omega] = s.omega0;
        for (const auto& c : converters_)
            if (c.v_in >= 0)
                x[c.v_in] = c.spec->v_in_init.value_or(source_open_voltage(sources_[c.source], 0.0));
        if (battery_.conv)
            x[battery_.soc] = battery_.spec->battery.soc;
        return x;
    }

    /// Stored field energy of inductors and capacitors.
    double stored_energy(const std::vector<double>& x) const
    {
        double w = 0.5 * c_total_ * x[v_bus_] * x[v_bus_];
        for (const auto& c : converters_) {
            const double i_l = std::max(x[c.i_l], 0.0);
            w += 0.5 * c.spec->params.l * i_l * i_l;
            if (c.v_in >= 0)
                w += 0.5 * c.spec->c_in * x[c.v_in] * x[c.v_in];
        }
        if (battery_.conv)
            w += 0.5 * battery_.conv->params.l * x[battery_.i_l] * x[battery_.i_l];
        return w;
    }

    double omega_of(const SourceSlot& s, const double* x, double t) const
    {
        if (s.omega >= 0)
            return x[s.omega];
        return s.spec->wind.k_w * s.spec->wind_speed.eval(sc_.profiles, t);
    }

    Load load_at(std::size_t k, double t) const
    {
        const auto& spec = sc_.loads[k];
        Load l;
        l.kind = spec.kind;
        if (spec.kind == LoadKind::Resistive)
            l.resistance = spec.resistance.eval(sc_.profiles, t);
        else
            l.power = spec.power.eval(sc_.profiles, t);
        l.v_min = load_v_min_[k];
        return l;
    }

    /// Right-hand side of the continuous model. `out` (optional) receives the
    /// algebraic outputs at (t, x).
    void derivatives(double t, const double* x, const Held& held, double* dx, Outputs* out) const
    {
        std::fill(dx, dx + n_states_, 0.0);
        const double v_bus = x[v_bus_];
        const double drop = sc_.bus.diode_drop;
        const double r_port = sc_.bus.port_resistance;
        double bus_in = 0.0;
        double p_src = 0.0, p_load = 0.0, p_batt = 0.0, p_loss = 0.0;

        if (out) {
            out->sources.assign(sources_.size(), {});
            out->converters.assign(sc_.converters.size(), {});
            out->loads.assign(sc_.loads.size(), {});
        }

        for (std::size_t k = 0; k < sources_.size(); ++k) {
            const auto& s = sources_[k];
            if (s.spec->kind != SourceKind::WindMg)
                continue;
            const double omega = omega_of(s, x, t);
            if (s.omega >= 0) {
                const double target = s.spec->wind.k_w * s.spec->wind_speed.eval(sc_.profiles, t);
                dx[s.omega] = (target - omega) / s.spec->wind.tau;
            }
            if (out)
                out->sources[k].omega = omega;
        }

        for (std::size_t k = 0; k < converters_.size(); ++k) {
            const auto& c = converters_[k];
            const auto& spec = *c.spec;
            const auto& src = sources_[c.source];
            const bool buck = spec.kind == ConverterKind::Buck;
            const double d = held.duty[k];
            // a negative inductor current only appears inside a step; the diode has blocked it
            const double i_l = std::max(x[c.i_l], 0.0);
            const double i_in = buck ? d * i_l : i_l;

            double v_in = 0.0;
            double i_src = 0.0;
            if (c.v_in >= 0) {
                v_in = x[c.v_in];
                if (src.spec->kind == SourceKind::Pv) {
                    i_src = pv_current_unchecked(src.spec->pv, v_in,
                                                 src.spec->irradiance.eval(sc_.profiles, t));
                } else {
                    const auto& mg = src.spec->wind;
                    i_src = (mg.k_e * omega_of(src, x, t) - v_in) / mg.r_a;
                }
                dx[c.v_in] = (i_src - i_in) / spec.c_in;
            } else {
                v_in = wind_voltage(src.spec->wind, omega_of(src, x, t), i_in);
                i_src = i_in;
            }

            const double i_raw = buck ? i_l : (1.0 - d) * i_l;
            const double i_port = diode_guard({PortKind::Source, i_raw, v_bus + drop + r_port * i_raw}, v_bus);
            const double v_out = v_bus + drop + r_port * i_port;

            if (buck) {
                dx[c.i_l] = buck_derivatives(spec.params, {x[c.i_l], v_out + spec.r_loss * i_l}, v_in, d, 0.0).di_l;
            } else {
                dx[c.i_l] = boost_derivatives(spec.params, {x[c.i_l], v_out}, v_in - spec.r_loss * i_l, d, 0.0).di_l;
            }

            bus_in += i_port;
            p_src += v_in * i_src;
            p_loss += spec.r_loss * i_l * i_l + i_port * (v_out - v_bus);

            if (out) {
                const auto conv_index = static_cast<std::size_t>(&spec - sc_.converters.data());
                out->sources[static_cast<std::size_t>(c.source)].v = v_in;
                out->sources[static_cast<std::size_t>(c.source)].i = i_src;
                out->converters[conv_index] = {i_port, v_bus * i_port};
            }
        }

        if (battery_.conv) {
            const auto& bat = battery_.spec->battery;
            const auto& conv = *battery_.conv;
            const double i = x[battery_.i_l];
            const double v_bt = battery_ocv(bat, x[battery_.soc]) + i * bat.r_int;
            const ConverterState st{i, 0.0};
            const double draw = bidir_bus_current(st, held.bidir_duty, held.mode);
            const double v_side = v_bus - r_port * draw;
            dx[battery_.i_l] =
                bidir_derivatives(conv.params, st, v_bt + conv.r_loss * i, v_side, held.bidir_duty, held.mode)
                    .di_l;
            dx[battery_.soc] = i / (3600.0 * bat.capacity_ah);
            bus_in -= draw;
            p_batt += v_bt * i;
            p_loss += conv.r_loss * i * i + r_port * draw * draw;
            if (out) {
                const auto conv_index = static_cast<std::size_t>(&conv - sc_.converters.data());
                out->converters[conv_index] = {-draw, -v_bus * draw};
                out->batt_v = v_bt;
                out->batt_i = i;
                out->batt_draw = draw;
            }
        }

        for (std::size_t k = 0; k < sc_.loads.size(); ++k) {
            const Load load = load_at(k, t);
            const double i = (v_bus > 0.0 || load.kind == LoadKind::Resistive) ? load_current(load, v_bus) : 0.0;
            bus_in -= i;
            p_load += v_bus * i;
            if (out)
                out->loads[k] = {i, v_bus * i};
        }

        dx[v_bus_] = bus_in / c_total_;
        dx[e_src_] = p_src;
        dx[e_load_] = p_load;
        dx[e_batt_] = p_batt;
        dx[e_loss_] = p_loss;
    }

private:
    const Scenario& sc_;
    int v_bus_ = 0;
    double c_total_ = 0.0;
    std::vector<SourceSlot> sources_;
    std::vector<ConverterSlot> converters_;
    BatterySlot battery_;
    std::vector<double> load_v_min_;
    std::vector<std::string> names_;
    int n_dynamic_ = 0;
    int n_states_ = 0;
    int e_src_ = 0, e_load_ = 0, e_batt_ = 0, e_loss_ = 0;
};

/// Nominal duty of a voltage loop from the ideal conversion ratio at t = 0.
double nominal_duty(const ConverterSpec& c, double v_in)
{
    const auto& vc = c.voltage;
    if (vc.duty_nominal)
        return *vc.duty_nominal;
    double d = 0.0;
    if (v_in > 0.0)
        d = c.kind == ConverterKind::Buck ? vc.v_ref / v_in : 1.0 - v_in / vc.v_ref;
    return std::clamp(d, vc.duty_min, vc.duty_max);
}

} // namespace

Simulation::Simulation(Scenario sc) : sc_(std::move(sc))
{
    validate_scenario(sc_);
}

std::vector<std::string> Simulation::signal_names() const
{
    std::vector<std::string> names{"t", "v_bus"};
    for (const auto& s : sc_.sources) {
        names.push_back(s.name + ".v");
        names.push_back(s.name + ".i");
        names.push_back(s.name + ".p");
        if (s.kind == SourceKind::WindMg)
            names.push_back(s.name + ".omega");
    }
    for (const auto& c : sc_.converters) {
        names.push_back(c.name + ".i_l");
        names.push_back(c.name + ".duty");
        names.push_back(c.name + ".i_port");
        names.push_back(c.name + ".p_out");
    }
    if (sc_.battery) {
        for (const char* s : {"soc", "v", "i", "p", "mode", "i_ref"})
            names.push_back(std::string("battery.") + s);
    }
    for (const auto& l : sc_.loads) {
        names.push_back(l.name + ".i");
        names.push_back(l.name + ".p");
    }
    for (const char* s : {"e_src", "e_load", "e_batt", "e_loss", "e_discarded", "w_stored"})
        names.emplace_back(s);
    return names;
}

TraceLog Simulation::run() const
{
    const Model model(sc_);
    const double dt = sc_.sim.dt;
    const std::int64_t n_steps = sc_.sim.steps();
    const auto n = static_cast<std::size_t>(model.n_states());

    TraceLog trace(signal_names());
    std::vector<double> row(trace.width());

    std::vector<double> x = model.initial_state();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    double e_discarded = 0.0;

    // Discrete controller state
    Held held;
    held.duty.assign(model.converters().size(), 0.0);
    std::vector<PiController> pis(model.converters().size());
    std::vector<MpptTracker> trackers(model.converters().size());
    for (std::size_t k = 0; k < model.converters().size(); ++k) {
        const auto& slot = model.converters()[k];
        const auto& c = *slot.spec;
        switch (c.control) {
        case ControlMode::Fixed:
            held.duty[k] = c.fixed_duty;
            break;
        case ControlMode::Voltage: {
            const double v_in = slot.v_in >= 0 ? x[static_cast<std::size_t>(slot.v_in)]
                                               : model.source_open_voltage(model.sources()[slot.source], 0.0);
            const double d0 = nominal_duty(c, v_in);
            pis[k] = {c.voltage.k_p, c.voltage.k_i, d0, c.voltage.duty_min, c.voltage.duty_max,
                      c.voltage.anti_windup};
            held.duty[k] = d0;
            break;
        }
        case ControlMode::Mppt: {
            auto& tr = trackers[k];
            tr.duty = c.mppt.duty_init;
            tr.delta_d = c.mppt.delta_d;
            tr.period = c.mppt.period;
            tr.duty_min = c.mppt.duty_min;
            tr.duty_max = c.mppt.duty_max;
            tr.deadband = c.mppt.deadband;
            tr.next_t = c.mppt.period;
            tr.time_tolerance = 0.5 * dt;
            held.duty[k] = tr.duty;
            break;
        }
        }
    }

    ModeController mc;
    const auto& bslot = model.battery();
    if (sc_.battery) {
        const auto& b = *sc_.battery;
        mc.v_ref = sc_.bus.v_ref;
        mc.band = b.band.value_or(0.01 * sc_.bus.v_ref);
        mc.mode = b.initial_mode;
        mc.i_charge_max = b.i_charge_max;
        mc.i_discharge_max = b.i_discharge_max;
        mc.soc_min = b.battery.soc_min;
        mc.soc_max = b.battery.soc_max;
        mc.reentry_margin = b.reentry_margin;
        mc.pi = {b.k_p, b.k_i, 0.0, 0.0, 0.0, true};
        held.mode = mc.mode;
    }

    const bool has_mppt = std::any_of(sc_.converters.begin(), sc_.converters.end(),
                                      [](const ConverterSpec& c) { return c.control == ControlMode::Mppt; });
    // source inductors behind a blocked diode hold no current (and no energy)
    auto block_reverse_current = [&](std::vector<double>& state) {
        for (const auto& slot : model.converters()) {
            double& i_l = state[static_cast<std::size_t>(slot.i_l)];
            i_l = std::max(i_l, 0.0);
        }
    };
    auto conducting_changed = [&](const double* a, const double* b) {
        for (const auto& slot : model.converters()) {
            const auto j = static_cast<std::size_t>(slot.i_l);
            if ((a[j] > 0.0) != (b[j] > 0.0))
                return true;
        }
        return false;
    };
    // one classical RK4 step; reports whether any stage crossed a conduction boundary
    auto rk4 = [&](double t0, double h, std::vector<double>& state) {
        bool crossed = false;
        model.derivatives(t0, state.data(), held, k1.data(), nullptr);
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = state[j] + 0.5 * h * k1[j];
        crossed |= conducting_changed(state.data(), tmp.data());
        model.derivatives(t0 + 0.5 * h, tmp.data(), held, k2.data(), nullptr);
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = state[j] + 0.5 * h * k2[j];
        crossed |= conducting_changed(state.data(), tmp.data());
        model.derivatives(t0 + 0.5 * h, tmp.data(), held, k3.data(), nullptr);
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = state[j] + h * k3[j];
        crossed |= conducting_changed(state.data(), tmp.data());
        model.derivatives(t0 + h, tmp.data(), held, k4.data(), nullptr);
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = state[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        crossed |= conducting_changed(state.data(), tmp.data());
        state.swap(tmp);
        return crossed;
    };

    Outputs out;
    for (std::int64_t step = 0; step <= n_steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        const double v_bus = x[0];

        // (1)-(2) source terminal measurements with the duties of the last step
        if (has_mppt)
            model.derivatives(t, x.data(), held, k1.data(), &out);

        // (3)-(4) MPPT trackers and output-voltage loops
        for (std::size_t k = 0; k < model.converters().size(); ++k) {
            const auto& slot = model.converters()[k];
            const auto& c = *slot.spec;
            if (c.control == ControlMode::Mppt) {
                const auto& so = out.sources[static_cast<std::size_t>(slot.source)];
                MpptUpdate info;
                held.duty[k] = mppt_step(trackers[k], so.v, so.i, t, info);
                if (info.fired) {
                    TraceEvent ev;
                    ev.t = t;
                    ev.kind = EventKind::MpptUpdate;
                    ev.component = c.name;
                    ev.duty = held.duty[k];
                    ev.power = info.power;
                    ev.delta_p = info.delta_p;
                    trace.events.push_back(std::move(ev));
                }
            } else if (c.control == ControlMode::Voltage) {
                held.duty[k] = pi_step(pis[k], c.voltage.v_ref - v_bus, dt);
            }
        }

        // (5) battery mode and current command
        if (bslot.conv) {
            const auto il = static_cast<std::size_t>(bslot.i_l);
            const Mode before = mc.mode;
            const Mode now = select_mode(mc, v_bus, x[static_cast<std::size_t>(bslot.soc)]);
            if (now != before) {
                TraceEvent ev;
                ev.t = t;
                ev.kind = EventKind::ModeChange;
                ev.component = "battery";
                ev.from = before;
                ev.to = now;
                trace.events.push_back(std::move(ev));
                if (now == Mode::Idle) {
                    e_discarded += 0.5 * bslot.conv->params.l * x[il] * x[il];
                    x[il] = 0.0;
                }
            }
            held.mode = now;
            held.i_ref = bidir_current_command(mc, v_bus, dt);

            const auto& bat = bslot.spec->battery;
            const double i = x[il];
            const double v_bt = battery_ocv(bat, x[static_cast<std::size_t>(bslot.soc)]) + i * bat.r_int;
            const double u = v_bt + bslot.conv->r_loss * i +
                             bslot.conv->params.l / bslot.conv->current_loop_tau * (held.i_ref - i);
            switch (now) {
            case Mode::Charge:
                held.bidir_duty = v_bus > kIdleBusFloor ? std::clamp(u / v_bus, 0.0, 1.0) : 1.0;
                break;
            case Mode::Discharge:
                held.bidir_duty = v_bus > kIdleBusFloor ? std::clamp(1.0 - u / v_bus, 0.0, 1.0) : 0.0;
                break;
            case Mode::Idle:
                held.bidir_duty = 0.0;
                break;
            }
        }

        // log
        if (step % sc_.sim.log_every == 0 || step == n_steps) {
            model.derivatives(t, x.data(), held, k1.data(), &out);
            std::size_t col = 0;
            row[col++] = t;
            row[col++] = v_bus;
            for (std::size_t k = 0; k < sc_.sources.size(); ++k) {
                const auto& so = out.sources[k];
                row[col++] = so.v;
                row[col++] = so.i;
                row[col++] = so.v * so.i;
                if (sc_.sources[k].kind == SourceKind::WindMg)
                    row[col++] = so.omega;
            }
            std::size_t src_slot = 0;
            for (std::size_t k = 0; k < sc_.converters.size(); ++k) {
                const auto& c = sc_.converters[k];
                if (c.kind == ConverterKind::Bidirectional) {
                    row[col++] = x[static_cast<std::size_t>(bslot.i_l)];
                    row[col++] = held.bidir_duty;
                } else {
                    row[col++] = x[static_cast<std::size_t>(model.converters()[src_slot].i_l)];
                    row[col++] = held.duty[src_slot];
                    ++src_slot;
                }
                row[col++] = out.converters[k].i_port;
                row[col++] = out.converters[k].p_out;
            }
            if (bslot.conv) {
                row[col++] = x[static_cast<std::size_t>(bslot.soc)];
                row[col++] = out.batt_v;
                row[col++] = out.batt_i;
                row[col++] = out.batt_v * out.batt_i;
                row[col++] = static_cast<double>(static_cast<int>(held.mode));
                row[col++] = held.i_ref;
            }
            for (const auto& lo : out.loads) {
                row[col++] = lo.i;
                row[col++] = lo.p;
            }
            row[col++] = x[static_cast<std::size_t>(model.e_src())];
            row[col++] = x[static_cast<std::size_t>(model.e_load())];
            row[col++] = x[static_cast<std::size_t>(model.e_batt())];
            row[col++] = x[static_cast<std::size_t>(model.e_loss())];
            row[col++] = e_discarded;
            row[col++] = model.stored_energy(x);
            trace.append(row);
        }

        if (step == n_steps)
            break;

        // (6)-(7) RK4 over [t, t + dt]; a step in which a source inductor starts or stops
        // conducting is repeated on a finer grid
        const std::vector<double> x0 = x;
        if (rk4(t, dt, x)) {
            x = x0;
            const double h = dt / kEventSubsteps;
            for (int m = 0; m < kEventSubsteps; ++m) {
                rk4(t + m * h, h, x);
                block_reverse_current(x);
            }
        }
        block_reverse_current(x);

        if (bslot.conv) {
            double& soc = x[static_cast<std::size_t>(bslot.soc)];
            soc = std::clamp(soc, 0.0, 1.0);
        }

        const double t_next = static_cast<double>(step + 1) * dt;
        for (int j = 0; j < model.n_states(); ++j) {
            const double v = x[static_cast<std::size_t>(j)];
            if (!std::isfinite(v) || (j < model.n_dynamic() && std::abs(v) > kBlowupLimit))
                throw NumericalBlowup(t_next, j < model.n_dynamic() ? model.state_name(j) : "energy", v);
        }
    }
    return trace;
}

TraceLog run(const Scenario& sc)
{
    return Simulation(sc).run();
}

AuditReport energy_audit(const TraceLog& trace)
{
    if (trace.rows() == 0)
        throw std::out_of_range("energy_audit: empty trace");
    const std::size_t last = trace.rows() - 1;
    auto delta = [&](std::string_view name) {
        const auto idx = trace.index_of(name);
        if (!idx)
            throw std::out_of_range("energy_audit: trace has no signal '" + std::string(name) + "'");
        return trace.at(last, *idx) - trace.at(0, *idx);
    };

    AuditReport a;
    a.e_src = delta("e_src");
    a.e_load = delta("e_load");
    a.e_batt = delta("e_batt");
    a.delta_stored = delta("w_stored");
    a.e_loss = delta("e_loss");
    a.e_discarded = delta("e_discarded");
    a.residual_without_loss = a.e_src - a.e_load - a.e_batt - a.delta_stored - a.e_discarded;
    a.residual = a.residual_without_loss - a.e_loss;
    a.lossy = a.e_loss != 0.0;

    const double scale = std::max({std::abs(a.e_src), std::abs(a.e_load), std::abs(a.e_batt),
                                   std::abs(a.delta_stored), std::abs(a.e_loss)});
    a.relative_residual = scale > 0.0 ? std::abs(a.residual) / scale : 0.0;
    return a;
}

std::string audit_to_json(const AuditReport& a)
{
    nlohmann::ordered_json j;
    j["e_src"] = a.e_src;
    j["e_load"] = a.e_load;
    j["e_batt"] = a.e_batt;
    j["delta_stored"] = a.delta_stored;
    j["e_loss"] = a.e_loss;
    j["e_discarded"] = a.e_discarded;
    j["residual"] = a.residual;
    j["residual_without_loss"] = a.residual_without_loss;
    j["relative_residual"] = a.relative_residual;
    j["lossy"] = a.lossy;
    return j.dump(2) + "\n";
}

std::vector<ConverterRating> converter_ratings(const Scenario& sc)
{
    std::vector<ConverterRating> out;
    for (const auto& c : sc.converters)
        if (c.rating_w)
            out.push_back({c.name, *c.rating_w});
    return out;
}

std::vector<DiodeRating> diode_ratings(const Scenario& sc)
{
    std::vector<DiodeRating> out;
    for (const auto& c : sc.converters)
        if (c.kind != ConverterKind::Bidirectional)
            out.push_back({c.name, c.diode_rating_a});
    return out;
}

} // namespace dcgrid
