#pragma once

// Averaged (ideal-switching) model of the converter chain: duty-cycle
// generation, per-phase modulated output, fundamental/third-harmonic
// decomposition, output-transformer combination and series compensation.

#include "fdpfc/phasor.hpp"
#include "fdpfc/region.hpp"

#include <array>

namespace fdpfc {

struct GridSource {
    double U_imL = 200.0 * 1.41421356237309504880;  // peak line voltage u_iab (V)
    double f = 50.0;                                 // Hz
    TransformerSpec input{200.0 / 70.0, ConnectionGroup::Dyn11};

    double omega() const { return 2.0 * kPi * f; }
    /// Peak phase voltage at the full-bridge inputs, in phase with u_iab.
    double U_im() const { return U_imL / input.turn_ratio; }
    ThreePhaseSet line_voltages() const;
    ThreePhaseSet bridge_inputs() const;

    void validate() const;
};

/// d_x(t) = k0 + k2·sin(2ωt + β2 + shift_x), shift = 0, +120°, -120° for a, b, c.
class DutyWaveform {
public:
    DutyWaveform(const ControlParams& p, double omega) : p_(p), omega_(omega) {}

    std::array<double, 3> operator()(double t) const;
    double phase(int idx, double t) const;

    /// Peak |d| over time, |k0| + k2.
    double peak() const;

private:
    ControlParams p_;
    double omega_;
};

DutyWaveform duty_cycles(const ControlParams& p, const GridSource& grid);

/// (u_oa2, u_ob2, u_oc2)(t) = d_x(t)·u_ix(t).
std::array<double, 3> averaged_phase_output(const ControlParams& p, const GridSource& grid,
                                            double t);

struct BridgeHarmonics {
    ThreePhaseSet fundamental;  // u_oa3, u_ob3, u_oc3
    Phasor third;               // common to all three phases
};

BridgeHarmonics fundamental_components(const ControlParams& p, const GridSource& grid);

/// (u_oa, u_ob, u_oc) on the grid side of the output transformer.
ThreePhaseSet compensation_voltages(const ControlParams& p, const GridSource& grid,
                                    const TransformerSpec& output);

struct RegulatedGrid {
    ThreePhaseSet lines;  // u_ab, u_bc, u_ca
    double U_mL = 0.0;
    double phi_r_deg = 0.0;
};

/// u_ab = u_iab + (u_oa - u_ob), and cyclically.
RegulatedGrid regulated_grid(const GridSource& grid, const ThreePhaseSet& comp);

}  // namespace fdpfc
