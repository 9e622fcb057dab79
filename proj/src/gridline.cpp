#include "fdpfc/gridline.hpp"

#include <cmath>

namespace fdpfc {

void LineModel::validate() const {
    if (!(R >= 0.0) || !std::isfinite(R)) throw DomainError("line resistance must be non-negative");
    if (!(X > 0.0) || !std::isfinite(X)) throw DomainError("line reactance must be positive");
}

FlowResult power_flow(const Phasor& sending, const LineModel& line, FlowBasis basis) {
    if (sending.freq_multiple() != line.receiving_bus.freq_multiple()) {
        throw DomainError("sending and receiving phasors have different frequencies");
    }
    const std::complex<double> z{line.R, line.X};
    if (std::abs(z) == 0.0) throw DomainError("line impedance is zero");
    const std::complex<double> vr = line.receiving_bus.value();
    const std::complex<double> s = vr * std::conj((sending.value() - vr) / z);
    return FlowResult{s.real(), s.imag(), basis};
}

std::vector<FlowRow> flow_sweep(const std::vector<CompensationTarget>& targets,
                                const GridSource& grid, const TransformerSpec& output,
                                const LineModel& line) {
    line.validate();
    constexpr double kRms = 0.70710678118654752440;
    LineModel rms_line = line;
    rms_line.receiving_bus = line.receiving_bus.scaled(kRms);

    std::vector<FlowRow> rows;
    rows.reserve(targets.size());
    for (const CompensationTarget& t : targets) {
        FlowRow row;
        row.target = t;
        try {
            ControlParams p;
            if (rhombus_contains(t)) {
                p = select_params(t, 0.0);
                row.status = "rhombus";
            } else {
                p = solve_params_general(t);
                row.status = "general";
            }
            const RegulatedGrid rg = regulated_grid(grid, compensation_voltages(p, grid, output));
            row.U_mL = rg.U_mL;
            row.phi_r_deg = rg.phi_r_deg;
            const FlowResult f =
                power_flow(rg.lines.a.scaled(kRms), rms_line, FlowBasis::ThreePhase);
            row.P = f.P;
            row.Q = f.Q;
            row.ok = true;
        } catch (const RegionError&) {
            row.status = "infeasible";
            row.ok = false;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fdpfc
