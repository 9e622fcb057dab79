#include "fdpfc/phasor.hpp"

#include <algorithm>
#include <cmath>

namespace fdpfc {

namespace {

// sin/cos in degrees, exact at multiples of 90°.
std::complex<double> unit_deg(double deg) {
    const double quarter = std::nearbyint(deg / 90.0);
    const double r = deg_to_rad(deg - 90.0 * quarter);
    const double c = std::cos(r);
    const double s = std::sin(r);
    long q = static_cast<long>(std::fmod(quarter, 4.0));
    if (q < 0) q += 4;
    switch (q) {
        case 0: return {c, s};
        case 1: return {-s, c};
        case 2: return {-c, -s};
        default: return {s, -c};
    }
}

void require_same_order(const Phasor& p, const Phasor& q) {
    if (p.freq_multiple() != q.freq_multiple()) {
        throw DomainError("phasor harmonic orders differ: " + std::to_string(p.freq_multiple()) +
                          " vs " + std::to_string(q.freq_multiple()));
    }
}

}  // namespace

double normalize_deg(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r <= -180.0) r += 360.0;
    if (r > 180.0) r -= 360.0;
    return r;
}

double angle_diff_deg(double a, double b) { return normalize_deg(a - b); }

Phasor Phasor::polar(double amplitude, double phase_deg, int freq_multiple) {
    if (freq_multiple < 1) throw DomainError("harmonic order must be a positive integer");
    if (!std::isfinite(amplitude) || !std::isfinite(phase_deg)) {
        throw DomainError("phasor components must be finite");
    }
    return Phasor(amplitude * unit_deg(phase_deg), freq_multiple);
}

Phasor Phasor::rect(std::complex<double> z, int freq_multiple) {
    if (freq_multiple < 1) throw DomainError("harmonic order must be a positive integer");
    return Phasor(z, freq_multiple);
}

double Phasor::phase_deg() const {
    if (z_ == std::complex<double>(0.0, 0.0)) return 0.0;
    return normalize_deg(rad_to_deg(std::arg(z_)));
}

Phasor Phasor::scaled(double k) const { return Phasor(z_ * k, order_); }

Phasor Phasor::rotated(double deg) const { return Phasor(z_ * unit_deg(deg), order_); }

double Phasor::at(double omega, double t) const {
    const double th = order_ * omega * t;
    return z_.real() * std::sin(th) + z_.imag() * std::cos(th);
}

Phasor operator+(const Phasor& p, const Phasor& q) {
    require_same_order(p, q);
    return Phasor(p.z_ + q.z_, p.order_);
}

Phasor operator-(const Phasor& p, const Phasor& q) {
    require_same_order(p, q);
    return Phasor(p.z_ - q.z_, p.order_);
}

Phasor add(const Phasor& p, const Phasor& q) { return p + q; }

ThreePhaseSet ThreePhaseSet::make(const Phasor& a, const Phasor& b, const Phasor& c,
                                  SetKind kind) {
    require_same_order(a, b);
    require_same_order(a, c);
    return ThreePhaseSet{a, b, c, kind};
}

ThreePhaseSet ThreePhaseSet::balanced(double amplitude, double phase_deg, SetKind kind,
                                      int freq_multiple) {
    return ThreePhaseSet{Phasor::polar(amplitude, phase_deg, freq_multiple),
                         Phasor::polar(amplitude, phase_deg - 120.0, freq_multiple),
                         Phasor::polar(amplitude, phase_deg + 120.0, freq_multiple), kind};
}

ThreePhaseSet ThreePhaseSet::scaled(double k) const {
    return ThreePhaseSet{a.scaled(k), b.scaled(k), c.scaled(k), kind};
}

ThreePhaseSet ThreePhaseSet::rotated(double deg) const {
    return ThreePhaseSet{a.rotated(deg), b.rotated(deg), c.rotated(deg), kind};
}

bool ThreePhaseSet::is_balanced_positive(double rel_tol, double deg_tol) const {
    if (a.freq_multiple() != b.freq_multiple() || a.freq_multiple() != c.freq_multiple()) {
        return false;
    }
    const double ref = std::max({a.amplitude(), b.amplitude(), c.amplitude()});
    if (ref == 0.0) return true;
    const double spread =
        std::max({a.amplitude(), b.amplitude(), c.amplitude()}) -
        std::min({a.amplitude(), b.amplitude(), c.amplitude()});
    if (spread > rel_tol * ref) return false;
    return std::abs(angle_diff_deg(b.phase_deg(), a.phase_deg() - 120.0)) <= deg_tol &&
           std::abs(angle_diff_deg(c.phase_deg(), b.phase_deg() - 120.0)) <= deg_tol;
}

ThreePhaseSet operator+(const ThreePhaseSet& s, const ThreePhaseSet& t) {
    return ThreePhaseSet::make(s.a + t.a, s.b + t.b, s.c + t.c, s.kind);
}

ThreePhaseSet line_from_phase(const ThreePhaseSet& s) {
    return ThreePhaseSet::make(s.a - s.b, s.b - s.c, s.c - s.a, SetKind::LineVoltages);
}

ThreePhaseSet phase_from_line(const ThreePhaseSet& s) {
    return ThreePhaseSet::make((s.a - s.c).scaled(1.0 / 3.0), (s.b - s.a).scaled(1.0 / 3.0),
                               (s.c - s.b).scaled(1.0 / 3.0), SetKind::PhaseVoltages);
}

std::string to_string(ConnectionGroup g) {
    switch (g) {
        case ConnectionGroup::Dyn11: return "Dyn11";
    }
    return "unknown";
}

ConnectionGroup parse_connection_group(const std::string& s) {
    if (s == "Dyn11" || s == "D/Yn11" || s == "Δ/Yn11") return ConnectionGroup::Dyn11;
    throw DomainError("unsupported transformer connection group: " + s);
}

void TransformerSpec::validate() const {
    if (!(turn_ratio > 0.0) || !std::isfinite(turn_ratio)) {
        throw DomainError("transformer turn ratio must be positive");
    }
    if (group != ConnectionGroup::Dyn11) {
        throw DomainError("unsupported transformer connection group");
    }
}

ThreePhaseSet reflect_through_transformer(const ThreePhaseSet& s, const TransformerSpec& t,
                                          Direction direction) {
    t.validate();
    if (direction == Direction::PrimaryToSecondary) {
        const ThreePhaseSet winding = s.kind == SetKind::LineVoltages ? s : line_from_phase(s);
        ThreePhaseSet out = winding.scaled(1.0 / t.turn_ratio);
        out.kind = SetKind::PhaseVoltages;
        return out;
    }
    const ThreePhaseSet phase = s.kind == SetKind::PhaseVoltages ? s : phase_from_line(s);
    ThreePhaseSet out = phase.scaled(t.turn_ratio);
    out.kind = SetKind::LineVoltages;
    return out;
}

}  // namespace fdpfc
