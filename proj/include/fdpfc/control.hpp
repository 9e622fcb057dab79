#pragma once

// Parameter selection for a compensation target and the two-stage
// (phase, then amplitude) closed-loop regulator.

#include "fdpfc/converter.hpp"
#include "fdpfc/region.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fdpfc {

struct ReferenceSetpoint {
    double U_ref = 0.0;        // desired amplitude of u_oa (V)
    double phi_ref_deg = 0.0;  // desired lead of u_oa over u_ia1
    double delta_deg = 1.0;    // phase tolerance
    double amp_tol_rel = 0.01; // relative amplitude tolerance

    void validate() const;
};

struct Measurement {
    double U_o1 = 0.0;
    double phi_o1_deg = 0.0;
};

enum class LoopMode { PhaseLoop, AmplitudeLoop, Converged };

std::string to_string(LoopMode m);

struct LoopState {
    ControlParams params;
    LoopMode mode = LoopMode::PhaseLoop;
    std::optional<double> saved_ratio;  // k2/|k0|, present outside PhaseLoop
    int iteration = 0;
};

struct ControllerConfig {
    double gain_phase = 0.5;
    double gain_amp = 0.5;
    double eps_feas = kEpsFeasController;
    // √3·U_im/N_o: volts of u_oa per unit of normalized target. Needed to
    // re-seed from the reference; zero disables re-seeding.
    double volts_per_unit = 0.0;
};

/// Normalized target of a physical u_oa reference across the Δ/Yn11 output stage.
CompensationTarget target_from_reference(double U_ref, double phi_ref_deg, double volts_per_unit);

/// √3·U_im/N_o.
double volts_per_unit(const GridSource& grid, const TransformerSpec& output);

/// β = ±90° selection, minimal k2 for targets in the rhombus. Throws
/// RegionError (carrying the nearest rhombus point) otherwise.
ControlParams select_params(const CompensationTarget& target,
                            double eps_feas = kEpsFeasController);

/// Minimal-k2 solution for any target in the total region; equals
/// select_params inside the rhombus.
ControlParams solve_params_general(const CompensationTarget& target,
                                   double eps_feas = kEpsFeasLibrary);

LoopState loop_step(const LoopState& state, const Measurement& meas,
                    const ReferenceSetpoint& ref, const ControllerConfig& cfg = {});

using Plant = std::function<Measurement(const ControlParams&)>;

struct TraceEntry {
    LoopState state;  // state the measurement was taken under
    Measurement meas;
};

struct LoopOutcome {
    std::vector<TraceEntry> trace;
    LoopState final_state;
    bool converged = false;
    LoopState best_state;  // smallest combined error seen
    Measurement best_meas;
};

LoopOutcome run_closed_loop(const Plant& plant, const ReferenceSetpoint& ref,
                            const ControlParams& init, int max_iter,
                            const ControllerConfig& cfg = {});

/// Measurement from the averaged model.
Measurement analytic_measurement(const ControlParams& p, const GridSource& grid,
                                 const TransformerSpec& output);

Plant analytic_plant(const GridSource& grid, const TransformerSpec& output);

/// Loop start used when no explicit parameters are given: k0 = k2 = 0.2 with
/// β on the reference's side of the real axis.
ControlParams default_initial_params(const ReferenceSetpoint& ref);

/// Uniform targets inside the rhombus shrunk by `margin` (|x| + 2|y| <= 1 - margin),
/// with m >= min_m.
std::vector<CompensationTarget> random_rhombus_targets(int count, double margin,
                                                       std::uint64_t seed,
                                                       double min_m = 0.02);

}  // namespace fdpfc
