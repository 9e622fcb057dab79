#pragma once

// Geometry of the achievable compensation vectors.
//
// Normalized coordinates: the a-phase fundamental of the full-bridge output
// divided by the input amplitude U_im, written x + jy = m∠φ1. A parameter
// triple (k0, k2, β) produces the vector k0 + (k2/2)∠β.

#include "fdpfc/phasor.hpp"

#include <utility>
#include <vector>

namespace fdpfc {

struct ControlParams {
    double k0 = 0.0;
    double k2 = 0.0;
    double beta_deg = 90.0;  // β; the duty-cycle ac phase is β2 = β - 90°

    double beta2_deg() const { return beta_deg - 90.0; }
};

struct CompensationTarget {
    double m = 0.0;
    double phi1_deg = 0.0;

    static CompensationTarget from_xy(double x, double y);
    static CompensationTarget polar(double m, double phi1_deg);

    double x() const;
    double y() const;
};

inline constexpr double kEpsFeasLibrary = 0.0;
inline constexpr double kEpsFeasController = 0.01;

/// Raised when a target lies outside the requested region. Carries the
/// nearest point of that region.
class RegionError : public std::runtime_error {
public:
    RegionError(const std::string& what, CompensationTarget nearest)
        : std::runtime_error(what), nearest_(nearest) {}

    const CompensationTarget& nearest() const { return nearest_; }

private:
    CompensationTarget nearest_;
};

/// |k0| <= 1 and 0 <= k2 <= 1 - |k0| + eps.
bool is_feasible(const ControlParams& p, double eps_feas = kEpsFeasLibrary);

CompensationTarget forward_target(const ControlParams& p);

struct MagnitudeRange {
    double min = 0.0;
    double max = 0.0;
};

/// Range of m reachable with the given k0 and any admissible (k2, β).
MagnitudeRange magnitude_envelope(double k0);

struct PhaseInterval {
    double center_deg = 0.0;
    double half_width_deg = 180.0;
    bool full_circle = true;

    bool contains(double phase_deg, double tol_deg = 1e-9) const;
};

PhaseInterval phase_envelope(double k0);

/// |x| + 2|y| <= 1 + eps: the region reached with β = ±90°.
bool rhombus_contains(const CompensationTarget& t, double eps_feas = kEpsFeasLibrary);

/// Closest point of the strict rhombus to t.
CompensationTarget nearest_rhombus_point(const CompensationTarget& t);

/// Union over k0 of the disks centered (k0, 0) with radius (1 - |k0|)/2.
bool total_region_contains(const CompensationTarget& t, double eps_feas = kEpsFeasLibrary);

/// The k0 in [-1, 1] whose disk comes closest to containing t, and the
/// signed excess distance (<= 0 means contained).
std::pair<double, double> best_center(const CompensationTarget& t);

/// Closed polyline around the total region ordered by polar angle; the first
/// point is repeated at the end.
std::vector<std::pair<double, double>> region_boundary(int samples);

}  // namespace fdpfc
