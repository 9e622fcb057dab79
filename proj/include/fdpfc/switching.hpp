#pragma once

// Switching-level time-domain model: regular-sampled PWM of the three
// full-bridge units, per-phase LC output filter with a resistive termination,
// ideal Δ/Yn11 output transformer, and single-bin Fourier measurement.

#include "fdpfc/control.hpp"
#include "fdpfc/converter.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdpfc {

struct CircuitParams {
    GridSource grid;
    TransformerSpec output{220.0 / 127.0, ConnectionGroup::Dyn11};
    double f_s = 25e3;      // Hz
    double L_f = 0.66e-3;   // H
    double C_f = 4.4e-6;    // F
    double R_load = 50.0;   // Ω, per phase across C_f

    void validate() const;
};

struct SimConfig {
    double dt = 0.4e-6;
    double duration = 6.0 / 50.0;
    int settle_cycles = 3;
    int decimation = 1;  // keep every n-th step in the record

    void validate(const CircuitParams& c) const;
};

/// Default step and duration for a circuit: dt = 1/(100·f_s), 6 cycles, 3 settling.
SimConfig default_sim_config(const CircuitParams& c);

class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

struct WaveformRecord {
    double sample_rate = 0.0;  // Hz
    double t0 = 0.0;           // time of the first sample
    double fundamental_hz = 50.0;
    int settle_cycles = 0;
    std::vector<std::string> names;
    std::vector<std::vector<double>> channels;

    std::size_t size() const { return channels.empty() ? 0 : channels.front().size(); }
    const std::vector<double>& channel(const std::string& name) const;
    bool has(const std::string& name) const;
    double time_at(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }
};

/// Channels produced by the simulator, in record order.
const std::vector<std::string>& channel_names();

/// Leading-edge sawtooth PWM: sign(d) for the first |d|·T_s of each carrier
/// period, 0 for the rest.
int switch_function(double d, double t, double f_s);

/// Single-bin Fourier projection at harmonic n over `cycles` trailing whole
/// fundamental cycles (0: every cycle after the record's settling cycles).
/// Phase is referenced to sin(ωt), i.e. to u_ia1.
Phasor spectrum_at(const WaveformRecord& rec, const std::string& channel, int n, int cycles = 0);

/// Returns new parameters (or nothing to keep the current ones) after each
/// completed fundamental cycle.
using CycleController = std::function<std::optional<ControlParams>(const Measurement&, int cycle)>;

class SwitchingSimulator {
public:
    SwitchingSimulator(const CircuitParams& c, const SimConfig& cfg, const ControlParams& p);

    void set_params(const ControlParams& p);
    const ControlParams& params() const { return params_; }

    /// Integrates one fundamental cycle and returns u_oa's fundamental over it.
    Measurement run_cycle(WaveformRecord* rec = nullptr);

    /// Integrates up to absolute step index `end_step`.
    void advance_to(long end_step, WaveformRecord* rec = nullptr);

    long step_index() const { return step_; }
    double time() const { return static_cast<double>(step_) * cfg_.dt; }
    long steps_per_cycle() const;

    WaveformRecord empty_record() const;

private:
    struct PhaseState {
        double i_L = 0.0;
        double u_C = 0.0;
        long carrier = -1;     // carrier period of the latched duty
        double duty = 0.0;
    };

    void latch_duty(int phase, long carrier);
    void integrate_phase(int phase, double t0, double t1);
    void sample(double t, WaveformRecord& rec) const;

    CircuitParams circuit_;
    SimConfig cfg_;
    ControlParams params_;
    std::array<PhaseState, 3> phases_{};
    long step_ = 0;
    double T_s_;
    double omega_;
    double U_im_;
};

/// Fixed-parameter run.
WaveformRecord simulate(const CircuitParams& c, const ControlParams& p, const SimConfig& cfg);

/// Run whose parameters are updated by `controller` once per fundamental cycle.
WaveformRecord simulate(const CircuitParams& c, const ControlParams& init,
                        const CycleController& controller, const SimConfig& cfg);

/// Stateful plant: each call applies the parameters, integrates one cycle and
/// measures it.
Plant switching_plant(const CircuitParams& c, const SimConfig& cfg, const ControlParams& init);

}  // namespace fdpfc
