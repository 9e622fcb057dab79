#include "fdpfc/converter.hpp"

#include <cmath>

namespace fdpfc {

namespace {

constexpr std::array<double, 3> kPhaseShift{0.0, -120.0, 120.0};

}  // namespace

ThreePhaseSet GridSource::line_voltages() const {
    return ThreePhaseSet::balanced(U_imL, 0.0, SetKind::LineVoltages);
}

ThreePhaseSet GridSource::bridge_inputs() const {
    return reflect_through_transformer(line_voltages(), input, Direction::PrimaryToSecondary);
}

void GridSource::validate() const {
    if (!(U_imL > 0.0) || !std::isfinite(U_imL)) throw DomainError("U_imL must be positive");
    if (!(f > 0.0) || !std::isfinite(f)) throw DomainError("grid frequency must be positive");
    input.validate();
}

double DutyWaveform::phase(int idx, double t) const {
    // 2(ωt + shift) + β2: the doubled angle turns the -120° shift into +120°.
    const double arg = 2.0 * (omega_ * t + deg_to_rad(kPhaseShift[static_cast<std::size_t>(idx)])) +
                       deg_to_rad(p_.beta2_deg());
    return p_.k0 + p_.k2 * std::sin(arg);
}

std::array<double, 3> DutyWaveform::operator()(double t) const {
    return {phase(0, t), phase(1, t), phase(2, t)};
}

double DutyWaveform::peak() const { return std::abs(p_.k0) + std::abs(p_.k2); }

DutyWaveform duty_cycles(const ControlParams& p, const GridSource& grid) {
    return DutyWaveform(p, grid.omega());
}

std::array<double, 3> averaged_phase_output(const ControlParams& p, const GridSource& grid,
                                            double t) {
    const DutyWaveform d = duty_cycles(p, grid);
    const double w = grid.omega();
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        const double u_in =
            grid.U_im() * std::sin(w * t + deg_to_rad(kPhaseShift[static_cast<std::size_t>(i)]));
        out[static_cast<std::size_t>(i)] = d.phase(i, t) * u_in;
    }
    return out;
}

BridgeHarmonics fundamental_components(const ControlParams& p, const GridSource& grid) {
    const double u = grid.U_im();
    const double b2 = p.beta2_deg();
    // Product-to-sum expansion of d_x·u_ix, fundamental part per phase.
    const Phasor a = Phasor::polar(u * p.k0, 0.0) + Phasor::polar(0.5 * u * p.k2, b2 + 90.0);
    const Phasor b = Phasor::polar(u * p.k0, -120.0) + Phasor::polar(0.5 * u * p.k2, b2 - 30.0);
    const Phasor c = Phasor::polar(u * p.k0, 120.0) + Phasor::polar(0.5 * u * p.k2, b2 + 210.0);
    // -½k2·U_im·cos(3ωt + β2) written as a sine phasor.
    const Phasor third = Phasor::polar(0.5 * u * p.k2, b2 - 90.0, 3);
    return BridgeHarmonics{ThreePhaseSet::make(a, b, c), third};
}

ThreePhaseSet compensation_voltages(const ControlParams& p, const GridSource& grid,
                                    const TransformerSpec& output) {
    return reflect_through_transformer(fundamental_components(p, grid).fundamental, output,
                                       Direction::PrimaryToSecondary);
}

RegulatedGrid regulated_grid(const GridSource& grid, const ThreePhaseSet& comp) {
    if (comp.freq_multiple() != 1) {
        throw DomainError("compensation set must be at the fundamental frequency");
    }
    ThreePhaseSet lines = grid.line_voltages() + line_from_phase(comp);
    lines.kind = SetKind::LineVoltages;
    return RegulatedGrid{lines, lines.a.amplitude(), lines.a.phase_deg()};
}

}  // namespace fdpfc
