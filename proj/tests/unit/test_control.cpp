#include <catch_amalgamated.hpp>

#include "fdpfc/control.hpp"

#include <cmath>
#include <random>

using namespace fdpfc;
using Catch::Approx;

namespace {

const GridSource kGrid;
const TransformerSpec kOut{220.0 / 127.0};

double vpu() { return volts_per_unit(kGrid, kOut); }

// Grid search over (k0, β) with the minimal k2 that reaches the target from
// each center, kept only if it actually lands on it.
struct GridBest {
    bool found = false;
    double k2 = 1e9;
};

GridBest grid_search_min_k2(double x, double y) {
    GridBest best;
    for (int i = -2000; i <= 2000; ++i) {
        const double k0 = i / 2000.0;
        const double k2 = 2.0 * std::hypot(x - k0, y);
        if (k2 <= 1.0 - std::abs(k0) + 1e-12 && k2 < best.k2) {
            best.found = true;
            best.k2 = k2;
        }
    }
    return best;
}

ReferenceSetpoint reference_for(const CompensationTarget& t) {
    ReferenceSetpoint r;
    r.U_ref = t.m * vpu();
    r.phi_ref_deg = normalize_deg(t.phi1_deg + 30.0);
    return r;
}

}  // namespace

TEST_CASE("volts per unit and reference conversion") {
    CHECK(vpu() == Approx(std::sqrt(3.0) * 70.0 * std::sqrt(2.0) * 127.0 / 220.0).epsilon(1e-12));
    const auto t = target_from_reference(26.0 * std::sqrt(2.0), -38.0, vpu());
    CHECK(t.m == Approx(0.37148).margin(1e-5));
    CHECK(t.phi1_deg == Approx(-68.0));
    CHECK_THROWS_AS(target_from_reference(1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("select_params examples") {
    const auto p1 = select_params({0.64, 0.0});
    CHECK(p1.k0 == Approx(0.64));
    CHECK(p1.k2 == Approx(0.0).margin(1e-15));
    CHECK(p1.beta_deg == 90.0);

    const auto p4 = select_params({0.3714, -68.0});
    CHECK(p4.k0 == Approx(0.1391).margin(1e-4));
    CHECK(p4.k2 == Approx(0.6887).margin(1e-4));
    CHECK(p4.beta_deg == -90.0);

    CHECK(select_params({0.3, 180.0}).beta_deg == -90.0);
    CHECK(select_params({0.3, 179.0}).beta_deg == 90.0);

    try {
        select_params({0.51, 90.0});
        FAIL("expected RegionError");
    } catch (const RegionError& e) {
        CHECK(rhombus_contains(e.nearest(), 1e-12));
        CHECK(e.nearest().phi1_deg == Approx(90.0));
        CHECK(e.nearest().m == Approx(0.5));
    }
}

TEST_CASE("select_params round trip over the rhombus") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    std::uniform_real_distribution<double> uy(-0.5, 0.5);
    int n = 0;
    while (n < 5000) {
        const auto t = CompensationTarget::from_xy(ux(rng), uy(rng));
        if (!rhombus_contains(t)) continue;
        ++n;
        const auto p = select_params(t, 0.0);
        CHECK(is_feasible(p, 1e-12));
        const auto back = forward_target(p);
        CHECK(back.m == Approx(t.m).margin(1e-9));
        if (t.m > 1e-9) CHECK(angle_diff_deg(back.phi1_deg, t.phi1_deg) == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("solve_params_general against the grid search oracle") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    std::uniform_real_distribution<double> uy(-0.55, 0.55);
    int outside_rhombus = 0;
    for (int i = 0; i < 3000; ++i) {
        const double x = ux(rng);
        const double y = uy(rng);
        const auto t = CompensationTarget::from_xy(x, y);
        const auto oracle = grid_search_min_k2(x, y);
        if (!total_region_contains(t)) {
            CHECK_THROWS_AS(solve_params_general(t), RegionError);
            continue;
        }
        const auto p = solve_params_general(t);
        CHECK(is_feasible(p, 1e-9));
        const auto back = forward_target(p);
        CHECK(std::hypot(back.x() - x, back.y() - y) < 1e-6);
        if (oracle.found) CHECK(p.k2 <= oracle.k2 + 1e-9);
        if (rhombus_contains(t)) {
            const auto s = select_params(t, 0.0);
            CHECK(p.k2 <= s.k2 + 1e-9);
        } else {
            ++outside_rhombus;
        }
    }
    CHECK(outside_rhombus > 50);
}

TEST_CASE("solve_params_general examples") {
    const auto p = solve_params_general({0.49, 52.0});
    CHECK(is_feasible(p, 1e-12));
    const auto back = forward_target(p);
    CHECK(back.m == Approx(0.49).margin(1e-6));
    CHECK(back.phi1_deg == Approx(52.0).margin(1e-6));
    CHECK_THROWS_AS(solve_params_general({1.0, 90.0}), RegionError);
}

TEST_CASE("phase loop step examples") {
    LoopState s;
    s.params = {0.3, 0.3, -90.0};
    const Measurement m = analytic_measurement(s.params, kGrid, kOut);
    CHECK(m.phi_o1_deg == Approx(forward_target(s.params).phi1_deg + 30.0));
    CHECK(m.phi_o1_deg == Approx(3.43).margin(0.01));
    ReferenceSetpoint ref{26.0 * std::sqrt(2.0), -38.0};
    const auto next = loop_step(s, m, ref, ControllerConfig{});
    CHECK(next.params.k2 > 0.3);
    CHECK(next.params.k0 == 0.3);
    CHECK(next.mode == LoopMode::PhaseLoop);
    CHECK(next.iteration == 1);
}

TEST_CASE("amplitude loop step preserves the saved ratio") {
    LoopState s;
    s.params = {0.4, 0.2, 90.0};
    s.mode = LoopMode::AmplitudeLoop;
    s.saved_ratio = 0.5;
    const Measurement m = analytic_measurement(s.params, kGrid, kOut);
    ReferenceSetpoint ref{0.8 * m.U_o1, m.phi_o1_deg};
    const auto next = loop_step(s, m, ref);
    CHECK(next.params.k0 < 0.4);
    CHECK(next.params.k2 == next.params.k0 * 0.5);
    CHECK(next.mode == LoopMode::AmplitudeLoop);
    REQUIRE(next.saved_ratio.has_value());

    ReferenceSetpoint hit{m.U_o1, m.phi_o1_deg};
    const auto done = loop_step(s, m, hit);
    CHECK(done.mode == LoopMode::Converged);
    CHECK(done.params.k0 == s.params.k0);
    CHECK(done.params.k2 == s.params.k2);
    CHECK(done.saved_ratio.has_value());
}

TEST_CASE("phase loop direction moves toward the reference") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 1000) {
        const double k0 = (u(rng) < 0.5 ? -1.0 : 1.0) * (0.05 + 0.85 * u(rng));
        const double k2 = (1.0 - std::abs(k0)) * (0.05 + 0.9 * u(rng));
        const double beta = u(rng) < 0.5 ? 90.0 : -90.0;
        LoopState s;
        s.params = {k0, k2, beta};
        const Measurement m = analytic_measurement(s.params, kGrid, kOut);
        const double phi1 = m.phi_o1_deg - 30.0;
        const double offset = (u(rng) < 0.5 ? -1.0 : 1.0) * (2.0 + 10.0 * u(rng));
        const double target = phi1 + offset;
        // Keep the reference in the state's quadrant.
        if (std::sin(deg_to_rad(target)) * std::sin(deg_to_rad(phi1)) <= 0.0) continue;
        if (std::cos(deg_to_rad(target)) * std::cos(deg_to_rad(phi1)) <= 0.0) continue;
        ReferenceSetpoint ref{m.U_o1, normalize_deg(target + 30.0)};
        const auto next = loop_step(s, m, ref);
        const Measurement m2 = analytic_measurement(next.params, kGrid, kOut);
        const double e1 = std::abs(angle_diff_deg(m.phi_o1_deg, ref.phi_ref_deg));
        const double e2 = std::abs(angle_diff_deg(m2.phi_o1_deg, ref.phi_ref_deg));
        INFO("k0=" << k0 << " k2=" << k2 << " beta=" << beta << " offset=" << offset);
        CHECK(e2 < e1);
        ++checked;
    }
}

TEST_CASE("amplitude regulation leaves the phase untouched") {
    const CompensationTarget t{0.35, 60.0};
    const ReferenceSetpoint ref = reference_for(t);
    const auto out = run_closed_loop(analytic_plant(kGrid, kOut), ref, {0.2, 0.2, 90.0}, 200,
                                     ControllerConfig{0.5, 0.5, 0.01, vpu()});
    REQUIRE(out.converged);
    int amp_steps = 0;
    std::optional<double> ratio;
    std::optional<double> phase;
    for (const auto& e : out.trace) {
        if (e.state.mode != LoopMode::AmplitudeLoop) continue;
        ++amp_steps;
        const double r = e.state.params.k2 / std::abs(e.state.params.k0);
        const double ph = forward_target(e.state.params).phi1_deg;
        if (!ratio) {
            ratio = r;
            phase = ph;
        }
        CHECK(r == Approx(*ratio).epsilon(1e-12));
        CHECK(ph == Approx(*phase).margin(1e-9));
        CHECK(e.state.saved_ratio.has_value());
    }
    CHECK(amp_steps > 1);
}

TEST_CASE("closed loop on the analytic plant") {
    const Plant plant = analytic_plant(kGrid, kOut);
    const ControllerConfig cfg{0.5, 0.5, 0.01, vpu()};

    SECTION("max_iter = 0 returns the initial state") {
        const ControlParams init{0.2, 0.2, 90.0};
        const auto out = run_closed_loop(plant, ReferenceSetpoint{30.0, 40.0}, init, 0, cfg);
        CHECK_FALSE(out.converged);
        CHECK(out.trace.empty());
        CHECK(out.final_state.params.k0 == init.k0);
        CHECK(out.final_state.iteration == 0);
    }

    SECTION("consistent initialization converges at once") {
        const ReferenceSetpoint ref{26.0 * std::sqrt(2.0), -38.0};
        const auto init = select_params(target_from_reference(ref.U_ref, ref.phi_ref_deg, vpu()));
        const auto out = run_closed_loop(plant, ref, init, 200, cfg);
        CHECK(out.converged);
        CHECK(out.final_state.iteration <= 2);
    }

    SECTION("random references converge with every state feasible") {
        const auto targets = random_rhombus_targets(100, 0.05, 2024);
        for (const auto& t : targets) {
            const ReferenceSetpoint ref = reference_for(t);
            const auto out = run_closed_loop(plant, ref, default_initial_params(ref), 200, cfg);
            INFO("m=" << t.m << " phi1=" << t.phi1_deg);
            CHECK(out.converged);
            for (const auto& e : out.trace) CHECK(is_feasible(e.state.params, 0.01 + 1e-12));
            const Measurement& last = out.trace.back().meas;
            CHECK(std::abs(angle_diff_deg(last.phi_o1_deg, ref.phi_ref_deg)) <= ref.delta_deg);
            CHECK(std::abs(last.U_o1 - ref.U_ref) / ref.U_ref <= ref.amp_tol_rel);
        }
    }

    SECTION("deterministic traces") {
        const ReferenceSetpoint ref{33.0 * std::sqrt(2.0), 76.0};
        const auto a = run_closed_loop(plant, ref, {0.2, 0.2, 90.0}, 200, cfg);
        const auto b = run_closed_loop(plant, ref, {0.2, 0.2, 90.0}, 200, cfg);
        REQUIRE(a.trace.size() == b.trace.size());
        for (std::size_t i = 0; i < a.trace.size(); ++i) {
            CHECK(a.trace[i].state.params.k0 == b.trace[i].state.params.k0);
            CHECK(a.trace[i].state.params.k2 == b.trace[i].state.params.k2);
            CHECK(a.trace[i].meas.U_o1 == b.trace[i].meas.U_o1);
        }
    }

    SECTION("degenerate start is re-seeded") {
        const ReferenceSetpoint ref{28.0 * std::sqrt(2.0), 170.0};
        const auto out = run_closed_loop(plant, ref, {0.0, 0.0, 90.0}, 200, cfg);
        CHECK(out.converged);
        REQUIRE(out.trace.size() >= 2);
        CHECK(out.trace[1].state.params.k0 != 0.0);
    }

    SECTION("opposite half-plane start is re-seeded") {
        const ReferenceSetpoint ref{32.0 * std::sqrt(2.0), -120.0};
        const auto out = run_closed_loop(plant, ref, {0.3, 0.3, 90.0}, 200, cfg);
        CHECK(out.converged);
        CHECK(out.final_state.params.beta_deg == -90.0);
        CHECK(out.final_state.params.k0 < 0.0);
    }

    SECTION("without a plant scale the state is mirrored instead") {
        ControllerConfig blind = cfg;
        blind.volts_per_unit = 0.0;
        const ReferenceSetpoint ref{32.0 * std::sqrt(2.0), -120.0};
        const auto out = run_closed_loop(plant, ref, {0.3, 0.3, 90.0}, 200, blind);
        CHECK(out.converged);
    }

    SECTION("an unreachable reference reports the best state") {
        const ReferenceSetpoint ref{200.0, 120.0};
        const auto out = run_closed_loop(plant, ref, {0.2, 0.2, 90.0}, 50, cfg);
        CHECK_FALSE(out.converged);
        CHECK(out.trace.size() == 50);
        CHECK(out.best_meas.U_o1 > 0.0);
        for (const auto& e : out.trace) CHECK(is_feasible(e.state.params, 0.01 + 1e-12));
    }
}

TEST_CASE("reference validation") {
    CHECK_THROWS_AS((ReferenceSetpoint{-1.0, 0.0}.validate()), DomainError);
    CHECK_THROWS_AS((ReferenceSetpoint{1.0, 0.0, 0.0}.validate()), DomainError);
    CHECK_THROWS_AS((ReferenceSetpoint{1.0, 0.0, 1.0, 0.0}.validate()), DomainError);
    CHECK(to_string(LoopMode::AmplitudeLoop) == "amplitude");
}

TEST_CASE("random rhombus targets") {
    const auto a = random_rhombus_targets(500, 0.05, 99);
    const auto b = random_rhombus_targets(500, 0.05, 99);
    REQUIRE(a.size() == 500);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].m == b[i].m);
        CHECK(std::abs(a[i].x()) + 2.0 * std::abs(a[i].y()) <= 0.95 + 1e-12);
        CHECK(a[i].m >= 0.02);
    }
}
