#include "fdpfc/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace fdpfc {

namespace {

constexpr double kTiny = 1e-12;

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Keep |k0| + k2 <= 1 + eps by shrinking both along the k2/|k0| ray, which
// leaves φ1 unchanged for β = ±90°.
ControlParams clamp_along_ray(ControlParams p, double eps) {
    p.k2 = std::max(p.k2, 0.0);
    p.k0 = std::clamp(p.k0, -1.0, 1.0);
    const double limit = 1.0 + eps;
    const double sum = std::abs(p.k0) + p.k2;
    if (sum > limit) {
        const double s = limit / sum;
        p.k0 *= s;
        p.k2 *= s;
    }
    return p;
}

// The β = ±90° rules only walk within one quadrant of the normalized plane.
bool quadrant_mismatch(const ControlParams& p, double target_phi1) {
    const double beta_side = sign_of(std::sin(deg_to_rad(p.beta_deg)));
    const double target_side = sign_of(std::sin(deg_to_rad(target_phi1)));
    if (beta_side * target_side < 0.0) return true;
    return sign_of(p.k0) * sign_of(std::cos(deg_to_rad(target_phi1))) < 0.0;
}

// k2 change that would move the angle from the k0 axis by `err_deg` in
// `direction`; only defined for β = ±90°.
std::optional<double> model_step(const ControlParams& p, double direction, double err_deg) {
    if (std::abs(std::cos(deg_to_rad(p.beta_deg))) > 1e-12 || p.k0 == 0.0) return std::nullopt;
    const double psi = rad_to_deg(std::atan2(0.5 * p.k2, std::abs(p.k0)));
    const double next = std::max(psi + direction * err_deg, 0.0);
    if (next >= 90.0) return std::nullopt;
    return std::abs(2.0 * std::abs(p.k0) * std::tan(deg_to_rad(next)) - p.k2);
}

ControlParams reseed(const ControlParams& current, const ReferenceSetpoint& ref,
                     const ControllerConfig& cfg) {
    if (cfg.volts_per_unit > 0.0) {
        const CompensationTarget t =
            target_from_reference(ref.U_ref, ref.phi_ref_deg, cfg.volts_per_unit);
        try {
            return select_params(t, cfg.eps_feas);
        } catch (const RegionError& e) {
            return select_params(e.nearest(), 0.0);
        }
    }
    // No plant scale known: mirror into the reference quadrant.
    const double phi1 = ref.phi_ref_deg - 30.0;
    ControlParams p = current;
    p.beta_deg = std::sin(deg_to_rad(phi1)) >= 0.0 ? 90.0 : -90.0;
    p.k0 = std::copysign(std::abs(p.k0), std::cos(deg_to_rad(phi1)));
    return p;
}

bool same_params(const ControlParams& a, const ControlParams& b) {
    return a.k0 == b.k0 && a.k2 == b.k2 && a.beta_deg == b.beta_deg;
}

}  // namespace

void ReferenceSetpoint::validate() const {
    if (!(U_ref >= 0.0)) throw DomainError("U_ref must be non-negative");
    if (!(delta_deg > 0.0)) throw DomainError("phase tolerance must be positive");
    if (!(amp_tol_rel > 0.0)) throw DomainError("amplitude tolerance must be positive");
}

std::string to_string(LoopMode m) {
    switch (m) {
        case LoopMode::PhaseLoop: return "phase";
        case LoopMode::AmplitudeLoop: return "amplitude";
        case LoopMode::Converged: return "converged";
    }
    return "unknown";
}

CompensationTarget target_from_reference(double U_ref, double phi_ref_deg,
                                         double volts_per_unit) {
    if (!(volts_per_unit > 0.0)) throw DomainError("volts_per_unit must be positive");
    return CompensationTarget::polar(U_ref / volts_per_unit, phi_ref_deg - 30.0);
}

double volts_per_unit(const GridSource& grid, const TransformerSpec& output) {
    output.validate();
    return kSqrt3 * grid.U_im() / output.turn_ratio;
}

ControlParams select_params(const CompensationTarget& target, double eps_feas) {
    if (!rhombus_contains(target, eps_feas)) {
        throw RegionError("compensation target outside the β = ±90° region",
                          nearest_rhombus_point(target));
    }
    const Phasor v = Phasor::polar(target.m, target.phi1_deg);
    const double phi = v.phase_deg();
    ControlParams p;
    p.beta_deg = (phi >= 0.0 && phi < 180.0) ? 90.0 : -90.0;
    p.k0 = v.re();
    p.k2 = 2.0 * std::abs(v.im());
    return p;
}

ControlParams solve_params_general(const CompensationTarget& target, double eps_feas) {
    const auto [center, excess] = best_center(target);
    if (excess > eps_feas) {
        const double cx = center;
        const double r = 0.5 * (1.0 - std::abs(cx));
        const double dx = target.x() - cx;
        const double dy = target.y();
        const double d = std::hypot(dx, dy);
        throw RegionError("compensation target outside the total adjustment region",
                          CompensationTarget::from_xy(cx + r * dx / d, r * dy / d));
    }
    if (rhombus_contains(target)) return select_params(target, 0.0);

    const double x = target.x();
    const double y = target.y();
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    // Largest k0 whose disk still reaches the target:
    // (ax - k0)^2 + ay^2 = (1 - k0)^2 / 4.
    const double qa = 0.75;
    const double qb = 0.5 - 2.0 * ax;
    const double qc = ax * ax + ay * ay - 0.25;
    const double disc = qb * qb - 4.0 * qa * qc;
    double k0 = disc >= 0.0 ? (-qb + std::sqrt(disc)) / (2.0 * qa) : std::abs(center);
    k0 = std::clamp(k0, 0.0, 1.0);
    k0 = std::copysign(k0, x);

    const Phasor arm = Phasor::rect({x - k0, y});
    ControlParams p;
    p.k0 = k0;
    p.k2 = std::min(2.0 * arm.amplitude(), 1.0 - std::abs(k0) + std::max(eps_feas, 0.0));
    p.beta_deg = arm.phase_deg();
    return p;
}

LoopState loop_step(const LoopState& state, const Measurement& meas,
                    const ReferenceSetpoint& ref, const ControllerConfig& cfg) {
    LoopState next = state;
    ++next.iteration;

    const double phase_err = angle_diff_deg(meas.phi_o1_deg, ref.phi_ref_deg);
    const double amp_err = (meas.U_o1 - ref.U_ref) / std::max(ref.U_ref, kTiny);
    const bool phase_ok = std::abs(phase_err) <= ref.delta_deg;
    const bool amp_ok = std::abs(amp_err) <= ref.amp_tol_rel;

    if (next.mode == LoopMode::Converged) {
        if (phase_ok && amp_ok) return next;
        next.mode = LoopMode::PhaseLoop;
        next.saved_ratio.reset();
    }
    if (next.mode == LoopMode::AmplitudeLoop && phase_ok && amp_ok) {
        next.mode = LoopMode::Converged;
        return next;
    }

    ControlParams& p = next.params;
    if (!(phase_ok && amp_ok)) {
        const double target_phi1 = ref.phi_ref_deg - 30.0;
        const bool degenerate = p.k0 == 0.0 || p.k2 == 0.0;
        if (degenerate || quadrant_mismatch(p, target_phi1)) {
            const ControlParams seeded = reseed(p, ref, cfg);
            if (!same_params(seeded, p)) {
                p = seeded;
                next.mode = LoopMode::PhaseLoop;
                next.saved_ratio.reset();
                return next;
            }
        }
    }

    if (next.mode == LoopMode::PhaseLoop) {
        if (!phase_ok) {
            const double side = sign_of(p.k0) * sign_of(std::sin(deg_to_rad(p.beta_deg)));
            const double direction = -sign_of(phase_err) * (side == 0.0 ? 1.0 : side);
            double step = cfg.gain_phase * std::abs(phase_err) / 90.0 * (1.0 - std::abs(p.k0));
            if (const auto cap = model_step(p, direction, std::abs(phase_err))) {
                step = std::min(step, *cap);
            }
            p.k2 += direction * step;
            p = clamp_along_ray(p, cfg.eps_feas);
            return next;
        }
        next.saved_ratio = std::abs(p.k0) > 0.0 ? p.k2 / std::abs(p.k0) : 0.0;
        next.mode = LoopMode::AmplitudeLoop;
    }

    // Amplitude loop.
    if (amp_ok) {
        if (phase_ok) {
            next.mode = LoopMode::Converged;
        } else {
            next.mode = LoopMode::PhaseLoop;
            next.saved_ratio.reset();
        }
        return next;
    }
    const double err = (meas.U_o1 - ref.U_ref) / std::max({meas.U_o1, ref.U_ref, kTiny});
    const double factor = 1.0 - cfg.gain_amp * err;
    if (p.k0 != 0.0) {
        p.k0 *= factor;
        p.k2 = *next.saved_ratio * std::abs(p.k0);
    } else {
        p.k2 *= factor;
    }
    p = clamp_along_ray(p, cfg.eps_feas);
    return next;
}

LoopOutcome run_closed_loop(const Plant& plant, const ReferenceSetpoint& ref,
                            const ControlParams& init, int max_iter,
                            const ControllerConfig& cfg) {
    ref.validate();
    LoopOutcome out;
    LoopState state;
    state.params = init;
    out.best_state = state;
    double best_score = std::numeric_limits<double>::infinity();

    for (int i = 0; i < max_iter; ++i) {
        const Measurement meas = plant(state.params);
        out.trace.push_back({state, meas});
        const double score =
            std::abs(angle_diff_deg(meas.phi_o1_deg, ref.phi_ref_deg)) / ref.delta_deg +
            std::abs(meas.U_o1 - ref.U_ref) / std::max(ref.U_ref, kTiny) / ref.amp_tol_rel;
        if (score < best_score) {
            best_score = score;
            out.best_state = state;
            out.best_meas = meas;
        }
        state = loop_step(state, meas, ref, cfg);
        if (state.mode == LoopMode::Converged) {
            out.trace.push_back({state, meas});
            out.converged = true;
            out.best_state = state;
            out.best_meas = meas;
            break;
        }
    }
    out.final_state = state;
    return out;
}

Measurement analytic_measurement(const ControlParams& p, const GridSource& grid,
                                 const TransformerSpec& output) {
    const ThreePhaseSet comp = compensation_voltages(p, grid, output);
    return Measurement{comp.a.amplitude(), comp.a.phase_deg()};
}

Plant analytic_plant(const GridSource& grid, const TransformerSpec& output) {
    return [grid, output](const ControlParams& p) { return analytic_measurement(p, grid, output); };
}

ControlParams default_initial_params(const ReferenceSetpoint& ref) {
    const double phi1 = normalize_deg(ref.phi_ref_deg - 30.0);
    return ControlParams{0.2, 0.2, (phi1 >= 0.0 && phi1 < 180.0) ? 90.0 : -90.0};
}

std::vector<CompensationTarget> random_rhombus_targets(int count, double margin,
                                                       std::uint64_t seed, double min_m) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    std::uniform_real_distribution<double> uy(-0.5, 0.5);
    std::vector<CompensationTarget> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    while (static_cast<int>(out.size()) < count) {
        const double x = ux(rng);
        const double y = uy(rng);
        if (std::abs(x) + 2.0 * std::abs(y) > 1.0 - margin) continue;
        if (std::hypot(x, y) < min_m) continue;
        out.push_back(CompensationTarget::from_xy(x, y));
    }
    return out;
}

}  // namespace fdpfc
