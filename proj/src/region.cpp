#include "fdpfc/region.hpp"

#include <algorithm>
#include <cmath>

namespace fdpfc {

CompensationTarget CompensationTarget::from_xy(double x, double y) {
    const Phasor p = Phasor::rect({x, y});
    return CompensationTarget{p.amplitude(), p.phase_deg()};
}

CompensationTarget CompensationTarget::polar(double m, double phi1_deg) {
    const Phasor p = Phasor::polar(m, phi1_deg);
    return CompensationTarget{p.amplitude(), p.phase_deg()};
}

double CompensationTarget::x() const { return Phasor::polar(m, phi1_deg).re(); }

double CompensationTarget::y() const { return Phasor::polar(m, phi1_deg).im(); }

bool is_feasible(const ControlParams& p, double eps_feas) {
    if (!std::isfinite(p.k0) || !std::isfinite(p.k2)) return false;
    const double a = std::abs(p.k0);
    return a <= 1.0 && p.k2 >= 0.0 && p.k2 <= 1.0 - a + eps_feas;
}

CompensationTarget forward_target(const ControlParams& p) {
    const Phasor v = Phasor::polar(p.k0, 0.0) + Phasor::polar(0.5 * p.k2, p.beta_deg);
    return CompensationTarget{v.amplitude(), v.phase_deg()};
}

MagnitudeRange magnitude_envelope(double k0) {
    const double a = std::abs(k0);
    if (!(a <= 1.0)) throw DomainError("k0 must lie in [-1, 1]");
    const double radius = 0.5 * (1.0 - a);
    // Disk centered a with the largest admissible radius.
    return MagnitudeRange{a > 1.0 / 3.0 ? a - radius : 0.0, a + radius};
}

bool PhaseInterval::contains(double phase_deg, double tol_deg) const {
    if (full_circle) return true;
    return std::abs(angle_diff_deg(phase_deg, center_deg)) <= half_width_deg + tol_deg;
}

PhaseInterval phase_envelope(double k0) {
    const double a = std::abs(k0);
    if (!(a <= 1.0)) throw DomainError("k0 must lie in [-1, 1]");
    if (a <= 1.0 / 3.0) return PhaseInterval{};
    const double half = rad_to_deg(std::asin((1.0 - a) / (2.0 * a)));
    return PhaseInterval{k0 > 0.0 ? 0.0 : 180.0, half, false};
}

bool rhombus_contains(const CompensationTarget& t, double eps_feas) {
    return std::abs(t.x()) + 2.0 * std::abs(t.y()) <= 1.0 + eps_feas;
}

CompensationTarget nearest_rhombus_point(const CompensationTarget& t) {
    const double x = t.x();
    const double y = t.y();
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    if (ax + 2.0 * ay <= 1.0) return t;
    // Project onto the edge (1, 0)-(0, 0.5) in the first quadrant.
    const double dx = -1.0;
    const double dy = 0.5;
    const double s = std::clamp(((ax - 1.0) * dx + ay * dy) / (dx * dx + dy * dy), 0.0, 1.0);
    const double qx = 1.0 + s * dx;
    const double qy = s * dy;
    return CompensationTarget::from_xy(std::copysign(qx, x), std::copysign(qy, y));
}

std::pair<double, double> best_center(const CompensationTarget& t) {
    const double ax = std::abs(t.x());
    const double ay = std::abs(t.y());
    // d/dk0 [ |P - (k0,0)| - (1-k0)/2 ] = 0  <=>  ax - k0 = ay/√3.
    const double k0 = std::clamp(ax - ay / kSqrt3, 0.0, 1.0);
    const double excess = std::hypot(ax - k0, ay) - 0.5 * (1.0 - k0);
    return {t.x() < 0.0 ? -k0 : k0, excess};
}

bool total_region_contains(const CompensationTarget& t, double eps_feas) {
    return best_center(t).second <= eps_feas;
}

namespace {

double boundary_radius(double theta_deg) {
    double a = std::abs(normalize_deg(theta_deg));
    if (a > 90.0) a = 180.0 - a;
    if (a >= 60.0) return 0.5;
    return 1.0 / (2.0 * std::sin(deg_to_rad(a + 30.0)));
}

}  // namespace

std::vector<std::pair<double, double>> region_boundary(int samples) {
    if (samples < 4) throw DomainError("region boundary needs at least 4 samples");
    constexpr double kInset = 1.0 - 1e-9;
    std::vector<std::pair<double, double>> pts;
    pts.reserve(static_cast<std::size_t>(samples) + 1);
    for (int i = 0; i < samples; ++i) {
        const double theta = 360.0 * i / samples;
        const Phasor p = Phasor::polar(kInset * boundary_radius(theta), theta);
        pts.emplace_back(p.re(), p.im());
    }
    pts.push_back(pts.front());
    return pts;
}

}  // namespace fdpfc
