#pragma once

// Sinusoidal steady-state arithmetic.
//
// Convention: a phasor A∠φ at harmonic order n stands for A·sin(n·ω·t + φ).
// Phase zero is therefore "in phase with sin(ωt)", which is the full-bridge
// input voltage u_ia1 throughout the library.

#include <complex>
#include <stdexcept>
#include <string>

namespace fdpfc {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt3 = 1.73205080756887729353;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-180, 180].
double normalize_deg(double deg);

/// Shortest signed angular distance a - b, in (-180, 180].
double angle_diff_deg(double a, double b);

class Phasor {
public:
    Phasor() = default;

    static Phasor polar(double amplitude, double phase_deg, int freq_multiple = 1);
    static Phasor rect(std::complex<double> z, int freq_multiple = 1);

    double amplitude() const { return std::abs(z_); }
    /// Phase in (-180, 180]; 0 for a zero phasor.
    double phase_deg() const;
    int freq_multiple() const { return order_; }
    std::complex<double> value() const { return z_; }

    double re() const { return z_.real(); }
    double im() const { return z_.imag(); }

    Phasor scaled(double k) const;
    Phasor rotated(double deg) const;

    /// Instantaneous value at time t for fundamental angular frequency omega.
    double at(double omega, double t) const;

    friend Phasor operator+(const Phasor& p, const Phasor& q);
    friend Phasor operator-(const Phasor& p, const Phasor& q);
    Phasor operator-() const { return Phasor(-z_, order_); }

private:
    Phasor(std::complex<double> z, int order) : z_(z), order_(order) {}

    std::complex<double> z_{0.0, 0.0};
    int order_ = 1;
};

Phasor add(const Phasor& p, const Phasor& q);

enum class SetKind { PhaseVoltages, LineVoltages };

struct ThreePhaseSet {
    Phasor a;
    Phasor b;
    Phasor c;
    SetKind kind = SetKind::PhaseVoltages;

    /// Throws DomainError unless a, b, c share the same harmonic order.
    static ThreePhaseSet make(const Phasor& a, const Phasor& b, const Phasor& c,
                              SetKind kind = SetKind::PhaseVoltages);

    /// Positive-sequence set a∠φ, a∠(φ-120), a∠(φ+120).
    static ThreePhaseSet balanced(double amplitude, double phase_deg,
                                  SetKind kind = SetKind::PhaseVoltages,
                                  int freq_multiple = 1);

    int freq_multiple() const { return a.freq_multiple(); }

    ThreePhaseSet scaled(double k) const;
    ThreePhaseSet rotated(double deg) const;

    /// Equal amplitudes (relative tol) and b lagging a, c lagging b by 120° (abs tol, degrees).
    bool is_balanced_positive(double rel_tol = 1e-9, double deg_tol = 1e-7) const;
};

ThreePhaseSet operator+(const ThreePhaseSet& s, const ThreePhaseSet& t);

/// (a-b, b-c, c-a).
ThreePhaseSet line_from_phase(const ThreePhaseSet& s);

/// Zero-sequence-free phase set whose line set is s: a = (ab - ca)/3, etc.
ThreePhaseSet phase_from_line(const ThreePhaseSet& s);

enum class ConnectionGroup { Dyn11 };

std::string to_string(ConnectionGroup g);
ConnectionGroup parse_connection_group(const std::string& s);

struct TransformerSpec {
    double turn_ratio = 1.0;  // primary : secondary
    ConnectionGroup group = ConnectionGroup::Dyn11;

    /// Throws DomainError if turn_ratio is not positive and finite.
    void validate() const;
};

enum class Direction { PrimaryToSecondary, SecondaryToPrimary };

/// Maps a three-phase set across an ideal Δ/Yn11 transformer.
///
/// Primary to secondary: each Δ winding carries a primary line voltage, so the
/// secondary phase voltage is line/N. A phase-voltage input is first converted
/// to its line set, which carries the group's +30° shift and √3 gain.
///
/// Secondary to primary: the secondary phase set (line input is reduced to
/// its zero-sequence-free phase set) is scaled by N and returned as the
/// primary line set. Primary line → secondary → primary is the identity.
ThreePhaseSet reflect_through_transformer(const ThreePhaseSet& s, const TransformerSpec& t,
                                          Direction direction);

}  // namespace fdpfc
