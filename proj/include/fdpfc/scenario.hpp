#pragma once

// Declarative run description.
//
//   [section]
//   key = value   # comment
//
// Sections: grid, transformers, filter, control, sim, line, powerflow,
// outputs. Units are part of the key names. Omitted keys take the prototype
// defaults; unknown sections or keys are errors.

#include "fdpfc/gridline.hpp"
#include "fdpfc/switching.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace fdpfc {

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ControlSection {
    double U_ref_V = 26.0 * 1.41421356237309504880;
    double phi_ref_deg = -38.0;
    double delta_deg = 1.0;
    double amp_tol = 0.01;
    double gain_phase = 0.5;
    double gain_amp = 0.5;
    double eps_feas = kEpsFeasController;
    int max_iter = 200;
    std::string plant = "analytic";  // analytic | switching
    std::optional<double> k0;
    std::optional<double> k2;
    std::optional<double> beta_deg;
    int random_targets = 0;

    ReferenceSetpoint reference() const;
    ControllerConfig controller(double volts_per_unit) const;
};

struct LineSection {
    double R_ohm = 0.5;
    double X_ohm = 5.0;
    double Vr_V = 200.0 * 1.41421356237309504880;  // peak line-to-line
    double Vr_deg = -5.0;

    LineModel model() const;
};

struct PowerflowSection {
    double m = 0.3;
    double step_deg = 0.5;
};

struct OutputSection {
    std::string dir;        // empty: use --out / FDPFC_OUT / cwd
    int decimation = 10;    // waveform CSV keeps every n-th recorded sample
    int region_samples = 720;
};

struct Scenario {
    CircuitParams circuit;
    SimConfig sim;
    ControlSection control;
    LineSection line;
    PowerflowSection powerflow;
    OutputSection outputs;
};

Scenario default_scenario();

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace fdpfc
