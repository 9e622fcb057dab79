#include "fdpfc/switching.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace fdpfc {

namespace {

constexpr std::array<double, 3> kShiftRad{0.0, -2.0 * kPi / 3.0, 2.0 * kPi / 3.0};

struct FourierAccumulator {
    double omega = 0.0;
    double s = 0.0;
    double c = 0.0;
    long count = 0;

    void add(double t, double v) {
        s += v * std::sin(omega * t);
        c += v * std::cos(omega * t);
        ++count;
    }
    Phasor phasor() const {
        if (count == 0) return Phasor{};
        const double k = 2.0 / static_cast<double>(count);
        return Phasor::rect({k * s, k * c});
    }
};

}  // namespace

void CircuitParams::validate() const {
    grid.validate();
    output.validate();
    if (!(f_s >= 20.0 * grid.f)) throw DomainError("switching frequency must be at least 20·f");
    if (!(L_f > 0.0)) throw DomainError("filter inductance must be positive");
    if (!(C_f > 0.0)) throw DomainError("filter capacitance must be positive");
    if (!(R_load > 0.0)) throw DomainError("load resistance must be positive");
}

void SimConfig::validate(const CircuitParams& c) const {
    if (!(dt > 0.0)) throw DomainError("time step must be positive");
    if (dt > (1.0 + 1e-9) / (50.0 * c.f_s)) throw DomainError("time step exceeds 1/(50·f_s)");
    if (settle_cycles < 0) throw DomainError("settle_cycles must be non-negative");
    if (duration * c.grid.f < settle_cycles + 1 - 1e-9) {
        throw DomainError("duration shorter than settle_cycles + 1 fundamental cycles");
    }
    if (decimation < 1) throw DomainError("decimation must be at least 1");
}

SimConfig default_sim_config(const CircuitParams& c) {
    SimConfig cfg;
    cfg.dt = 1.0 / (100.0 * c.f_s);
    cfg.duration = 6.0 / c.grid.f;
    cfg.settle_cycles = 3;
    return cfg;
}

const std::vector<double>& WaveformRecord::channel(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DomainError("unknown waveform channel: " + name);
    return channels[static_cast<std::size_t>(it - names.begin())];
}

bool WaveformRecord::has(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<std::string>& channel_names() {
    static const std::vector<std::string> names{
        "u_ia1", "u_ib1", "u_ic1", "d_a",  "u_oa1", "u_oa2", "u_ob2", "u_oc2", "u_oa",
        "u_ob",  "u_oc",  "u_iab", "u_ibc", "u_ica", "u_ab",  "u_bc",  "u_ca"};
    return names;
}

int switch_function(double d, double t, double f_s) {
    if (!(std::abs(d) <= 1.0)) throw DomainError("duty cycle outside [-1, 1]");
    if (d == 0.0) return 0;
    const double T_s = 1.0 / f_s;
    const double tau = t - std::floor(t / T_s) * T_s;
    if (tau < std::abs(d) * T_s) return d > 0.0 ? 1 : -1;
    return 0;
}

Phasor spectrum_at(const WaveformRecord& rec, const std::string& channel, int n, int cycles) {
    if (n < 1) throw DomainError("harmonic order must be positive");
    const std::vector<double>& x = rec.channel(channel);
    const double spc = rec.sample_rate / rec.fundamental_hz;
    if (cycles == 0) {
        const int whole = static_cast<int>(std::floor(static_cast<double>(x.size()) / spc + 1e-9));
        cycles = whole - rec.settle_cycles;
    }
    const auto count = static_cast<std::size_t>(std::llround(cycles * spc));
    if (cycles < 1 || count > x.size() || count == 0) {
        throw DomainError("analysis window shorter than one fundamental cycle");
    }
    FourierAccumulator acc{2.0 * kPi * rec.fundamental_hz * n};
    for (std::size_t i = x.size() - count; i < x.size(); ++i) acc.add(rec.time_at(i), x[i]);
    const Phasor p = acc.phasor();
    return Phasor::rect(p.value(), n);
}

SwitchingSimulator::SwitchingSimulator(const CircuitParams& c, const SimConfig& cfg,
                                       const ControlParams& p)
    : circuit_(c), cfg_(cfg), params_(p) {
    circuit_.validate();
    cfg_.validate(circuit_);
    T_s_ = 1.0 / circuit_.f_s;
    omega_ = circuit_.grid.omega();
    U_im_ = circuit_.grid.U_im();
}

void SwitchingSimulator::set_params(const ControlParams& p) {
    params_ = p;
    // The new duty takes effect at the next carrier boundary.
}

long SwitchingSimulator::steps_per_cycle() const {
    return std::max(1L, std::lround(1.0 / (circuit_.grid.f * cfg_.dt)));
}

WaveformRecord SwitchingSimulator::empty_record() const {
    WaveformRecord rec;
    rec.sample_rate = 1.0 / (cfg_.dt * cfg_.decimation);
    rec.t0 = time();
    rec.fundamental_hz = circuit_.grid.f;
    rec.settle_cycles = cfg_.settle_cycles;
    rec.names = channel_names();
    rec.channels.assign(rec.names.size(), {});
    return rec;
}

void SwitchingSimulator::latch_duty(int phase, long carrier) {
    PhaseState& ps = phases_[static_cast<std::size_t>(phase)];
    if (ps.carrier == carrier) return;
    const DutyWaveform d(params_, omega_);
    ps.duty = std::clamp(d.phase(phase, static_cast<double>(carrier) * T_s_), -1.0, 1.0);
    ps.carrier = carrier;
}

void SwitchingSimulator::integrate_phase(int phase, double t0, double t1) {
    PhaseState& ps = phases_[static_cast<std::size_t>(phase)];
    const double tol = 1e-6 * cfg_.dt;
    const double shift = kShiftRad[static_cast<std::size_t>(phase)];
    const double L = circuit_.L_f;
    const double C = circuit_.C_f;
    const double R = circuit_.R_load;

    double t = t0;
    while (t < t1 - tol) {
        const long carrier = static_cast<long>(std::floor((t + tol) / T_s_));
        latch_duty(phase, carrier);
        const double start = static_cast<double>(carrier) * T_s_;
        const double pulse_end = start + std::abs(ps.duty) * T_s_;
        const bool on = ps.duty != 0.0 && t < pulse_end - tol;
        const double edge = on ? pulse_end : start + T_s_;
        const double te = std::min(t1, edge);
        const double gain = on ? (ps.duty > 0.0 ? U_im_ : -U_im_) : 0.0;

        auto input = [&](double tt) { return gain * std::sin(omega_ * tt + shift); };
        auto di = [&](double v, double tt) { return (input(tt) - v) / L; };
        auto dv = [&](double i, double v) { return (i - v / R) / C; };

        const double h = te - t;
        const double i0 = ps.i_L;
        const double v0 = ps.u_C;
        const double k1i = di(v0, t);
        const double k1v = dv(i0, v0);
        const double k2i = di(v0 + 0.5 * h * k1v, t + 0.5 * h);
        const double k2v = dv(i0 + 0.5 * h * k1i, v0 + 0.5 * h * k1v);
        const double k3i = di(v0 + 0.5 * h * k2v, t + 0.5 * h);
        const double k3v = dv(i0 + 0.5 * h * k2i, v0 + 0.5 * h * k2v);
        const double k4i = di(v0 + h * k3v, te);
        const double k4v = dv(i0 + h * k3i, v0 + h * k3v);
        ps.i_L = i0 + h / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
        ps.u_C = v0 + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t = te;
    }
    if (!std::isfinite(ps.i_L) || !std::isfinite(ps.u_C)) {
        throw SimulationError("non-finite filter state at t = " + std::to_string(t1) + " s", t1);
    }
}

void SwitchingSimulator::sample(double t, WaveformRecord& rec) const {
    const double N_i = circuit_.grid.input.turn_ratio;
    const double N_o = circuit_.output.turn_ratio;
    std::array<double, 3> u_in{};
    for (std::size_t k = 0; k < 3; ++k) u_in[k] = U_im_ * std::sin(omega_ * t + kShiftRad[k]);
    const double u_oa2 = phases_[0].u_C;
    const double u_ob2 = phases_[1].u_C;
    const double u_oc2 = phases_[2].u_C;
    const double u_oa = (u_oa2 - u_ob2) / N_o;
    const double u_ob = (u_ob2 - u_oc2) / N_o;
    const double u_oc = (u_oc2 - u_oa2) / N_o;
    const double u_iab = N_i * u_in[0];
    const double u_ibc = N_i * u_in[1];
    const double u_ica = N_i * u_in[2];
    const double d_a = phases_[0].duty;
    const double u_oa1 = switch_function(d_a, t, circuit_.f_s) * u_in[0];

    const std::array<double, 17> row{u_in[0], u_in[1], u_in[2], d_a,   u_oa1, u_oa2,
                                     u_ob2,   u_oc2,   u_oa,    u_ob,  u_oc,  u_iab,
                                     u_ibc,   u_ica,   u_iab + u_oa - u_ob,
                                     u_ibc + u_ob - u_oc,      u_ica + u_oc - u_oa};
    for (std::size_t k = 0; k < row.size(); ++k) rec.channels[k].push_back(row[k]);
}

void SwitchingSimulator::advance_to(long end_step, WaveformRecord* rec) {
    for (long n = step_; n < end_step; ++n) {
        const double t0 = static_cast<double>(n) * cfg_.dt;
        const double t1 = static_cast<double>(n + 1) * cfg_.dt;
        const long carrier = static_cast<long>(std::floor((t0 + 1e-6 * cfg_.dt) / T_s_));
        for (int k = 0; k < 3; ++k) latch_duty(k, carrier);
        if (rec && n % cfg_.decimation == 0) {
            if (rec->size() == 0) rec->t0 = t0;
            sample(t0, *rec);
        }
        for (int k = 0; k < 3; ++k) integrate_phase(k, t0, t1);
        step_ = n + 1;
    }
}

Measurement SwitchingSimulator::run_cycle(WaveformRecord* rec) {
    const long end = step_ + steps_per_cycle();
    const double N_o = circuit_.output.turn_ratio;
    FourierAccumulator acc{omega_};
    for (long n = step_; n < end; ++n) {
        const double t = static_cast<double>(n) * cfg_.dt;
        const long carrier = static_cast<long>(std::floor((t + 1e-6 * cfg_.dt) / T_s_));
        for (int k = 0; k < 3; ++k) latch_duty(k, carrier);
        acc.add(t, (phases_[0].u_C - phases_[1].u_C) / N_o);
        advance_to(n + 1, rec);
    }
    const Phasor p = acc.phasor();
    return Measurement{p.amplitude(), p.phase_deg()};
}

WaveformRecord simulate(const CircuitParams& c, const ControlParams& p, const SimConfig& cfg) {
    SwitchingSimulator sim(c, cfg, p);
    WaveformRecord rec = sim.empty_record();
    sim.advance_to(std::lround(cfg.duration / cfg.dt), &rec);
    return rec;
}

WaveformRecord simulate(const CircuitParams& c, const ControlParams& init,
                        const CycleController& controller, const SimConfig& cfg) {
    SwitchingSimulator sim(c, cfg, init);
    WaveformRecord rec = sim.empty_record();
    const long total = std::lround(cfg.duration / cfg.dt);
    int cycle = 0;
    while (sim.step_index() + sim.steps_per_cycle() <= total) {
        const Measurement m = sim.run_cycle(&rec);
        ++cycle;
        if (controller) {
            if (auto next = controller(m, cycle)) sim.set_params(*next);
        }
    }
    sim.advance_to(total, &rec);
    return rec;
}

Plant switching_plant(const CircuitParams& c, const SimConfig& cfg, const ControlParams& init) {
    auto sim = std::make_shared<SwitchingSimulator>(c, cfg, init);
    return [sim](const ControlParams& p) {
        sim->set_params(p);
        return sim->run_cycle();
    };
}

}  // namespace fdpfc
