#pragma once

// Two-bus power flow over a series impedance, driven by the regulated
// sending-end voltage.

#include "fdpfc/control.hpp"
#include "fdpfc/converter.hpp"

#include <string>
#include <vector>

namespace fdpfc {

struct LineModel {
    double R = 0.0;  // Ω
    double X = 0.1;  // Ω
    Phasor receiving_bus = Phasor::polar(1.0, 0.0);

    void validate() const;
};

enum class FlowBasis { PerPhase, ThreePhase };

struct FlowResult {
    double P = 0.0;  // W, receiving end
    double Q = 0.0;  // var, receiving end
    FlowBasis basis = FlowBasis::PerPhase;
};

/// S = V_r·conj((V_s - V_r)/Z) with amplitudes read as RMS magnitudes.
/// With line-to-line phasors of a balanced system the same expression is the
/// three-phase power, which the basis tag records.
FlowResult power_flow(const Phasor& sending, const LineModel& line,
                      FlowBasis basis = FlowBasis::PerPhase);

struct FlowRow {
    CompensationTarget target;
    double U_mL = 0.0;       // peak regulated line voltage (V)
    double phi_r_deg = 0.0;
    double P = 0.0;          // three-phase W
    double Q = 0.0;          // three-phase var
    std::string status;      // "rhombus", "general" or the region error text
    bool ok = false;
};

/// For each target: parameters (rhombus strategy, else the general solve),
/// regulated grid, then three-phase flow to the receiving bus. The line
/// model's receiving bus is a peak line-to-line phasor.
std::vector<FlowRow> flow_sweep(const std::vector<CompensationTarget>& targets,
                                const GridSource& grid, const TransformerSpec& output,
                                const LineModel& line);

}  // namespace fdpfc
