#include "fdpfc/commands.hpp"

#include <cmath>
#include <ostream>

namespace fdpfc {

namespace {

constexpr double kRoundTripTol = 1e-6;

std::string fmt(double v) { return format_number(v); }

ControlParams analytic_params(const Scenario& s, const CompensationTarget& target) {
    const ControlSection& c = s.control;
    if (c.k0 || c.k2 || c.beta_deg) {
        return ControlParams{c.k0.value_or(0.0), c.k2.value_or(0.0), c.beta_deg.value_or(90.0)};
    }
    try {
        return select_params(target, c.eps_feas);
    } catch (const RegionError&) {
        return solve_params_general(target);
    }
}

CompensationTarget scenario_target(const Scenario& s) {
    const double vpu = volts_per_unit(s.circuit.grid, s.circuit.output);
    return target_from_reference(s.control.U_ref_V, s.control.phi_ref_deg, vpu);
}

int cmd_region(const CommandContext& ctx, std::ostream& out) {
    const auto path = ctx.out_dir / "region.csv";
    write_csv(path, region_table(ctx.scenario.outputs.region_samples));
    out << "region boundary: " << path.string() << '\n';
    return kExitOk;
}

int cmd_analytic(const CommandContext& ctx, std::ostream& out) {
    const Scenario& s = ctx.scenario;
    const GridSource& grid = s.circuit.grid;
    const CompensationTarget target = scenario_target(s);
    const ControlParams p = analytic_params(s, target);
    const CompensationTarget reached = forward_target(p);
    const BridgeHarmonics h = fundamental_components(p, grid);
    const ThreePhaseSet comp = compensation_voltages(p, grid, s.circuit.output);
    const RegulatedGrid rg = regulated_grid(grid, comp);

    CsvTable t;
    t.header = {"quantity", "value"};
    auto put = [&t](const std::string& k, double v) { t.rows.push_back({k, fmt(v)}); };
    put("U_ref_V", s.control.U_ref_V);
    put("phi_ref_deg", s.control.phi_ref_deg);
    put("target_m", target.m);
    put("target_phi1_deg", target.phi1_deg);
    put("k0", p.k0);
    put("k2", p.k2);
    put("beta_deg", p.beta_deg);
    put("feasible", is_feasible(p, s.control.eps_feas) ? 1.0 : 0.0);
    put("m", reached.m);
    put("phi1_deg", reached.phi1_deg);
    put("U_im_V", grid.U_im());
    put("U_om_V", h.fundamental.a.amplitude());
    put("third_harmonic_V", h.third.amplitude());
    put("U_oa_V", comp.a.amplitude());
    put("phi_oa_deg", comp.a.phase_deg());
    put("U_mL_V", rg.U_mL);
    put("phi_r_deg", rg.phi_r_deg);
    const auto path = ctx.out_dir / "analytic.csv";
    write_csv(path, t);
    out << "k0=" << fmt(p.k0) << " k2=" << fmt(p.k2) << " beta=" << fmt(p.beta_deg)
        << " -> u_oa " << fmt(comp.a.amplitude()) << " V at " << fmt(comp.a.phase_deg())
        << " deg; u_ab " << fmt(rg.U_mL) << " V at " << fmt(rg.phi_r_deg) << " deg\n";
    if (!is_feasible(p, s.control.eps_feas)) {
        out << "parameters are outside the feasible duty range\n";
        return kExitRegion;
    }
    return kExitOk;
}

int cmd_simulate(const CommandContext& ctx, std::ostream& out) {
    const Scenario& s = ctx.scenario;
    const ControlParams p = analytic_params(s, scenario_target(s));
    const WaveformRecord rec = simulate(s.circuit, p, s.sim);
    const auto path = ctx.out_dir / "waveforms.csv";
    write_csv(path, waveform_table(rec, s.outputs.decimation));
    const Phasor u_oa = spectrum_at(rec, "u_oa", 1);
    const Phasor u_oa2_3 = spectrum_at(rec, "u_oa2", 3);
    const Phasor u_ab = spectrum_at(rec, "u_ab", 1);
    out << "u_oa fundamental " << fmt(u_oa.amplitude()) << " V at " << fmt(u_oa.phase_deg())
        << " deg; u_oa2 third harmonic " << fmt(u_oa2_3.amplitude()) << " V; u_ab "
        << fmt(u_ab.amplitude()) << " V at " << fmt(u_ab.phase_deg()) << " deg\n"
        << "waveforms: " << path.string() << '\n';
    return kExitOk;
}

int cmd_closedloop(const CommandContext& ctx, std::ostream& out) {
    const Scenario& s = ctx.scenario;
    const double vpu = volts_per_unit(s.circuit.grid, s.circuit.output);
    const ControllerConfig cfg = s.control.controller(vpu);
    const ReferenceSetpoint ref = s.control.reference();
    const ControlSection& c = s.control;
    const ControlParams init = (c.k0 || c.k2 || c.beta_deg)
                                   ? ControlParams{c.k0.value_or(0.0), c.k2.value_or(0.0),
                                                   c.beta_deg.value_or(90.0)}
                                   : default_initial_params(ref);

    const Plant plant = c.plant == "switching"
                            ? switching_plant(s.circuit, s.sim, init)
                            : analytic_plant(s.circuit.grid, s.circuit.output);
    const LoopOutcome outcome = run_closed_loop(plant, ref, init, c.max_iter, cfg);
    const auto path = ctx.out_dir / "trace.csv";
    write_csv(path, trace_table(outcome));
    out << (outcome.converged ? "converged" : "not converged") << " after "
        << outcome.final_state.iteration << " iterations: k0=" << fmt(outcome.best_state.params.k0)
        << " k2=" << fmt(outcome.best_state.params.k2) << " beta="
        << fmt(outcome.best_state.params.beta_deg) << " U_o1=" << fmt(outcome.best_meas.U_o1)
        << " phi_o1=" << fmt(outcome.best_meas.phi_o1_deg) << '\n'
        << "trace: " << path.string() << '\n';

    bool all_ok = outcome.converged;
    if (c.random_targets > 0) {
        CsvTable t;
        t.header = {"index", "m", "phi1_deg", "iterations", "converged"};
        const auto targets = random_rhombus_targets(c.random_targets, 0.05, ctx.seed);
        const Plant analytic = analytic_plant(s.circuit.grid, s.circuit.output);
        int converged = 0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            ReferenceSetpoint r = ref;
            r.U_ref = targets[i].m * vpu;
            r.phi_ref_deg = normalize_deg(targets[i].phi1_deg + 30.0);
            const LoopOutcome o =
                run_closed_loop(analytic, r, default_initial_params(r), c.max_iter, cfg);
            converged += o.converged ? 1 : 0;
            t.rows.push_back({std::to_string(i), fmt(targets[i].m), fmt(targets[i].phi1_deg),
                              std::to_string(o.final_state.iteration), o.converged ? "1" : "0"});
        }
        const auto rpath = ctx.out_dir / "closedloop_random.csv";
        write_csv(rpath, t);
        out << converged << "/" << targets.size() << " random references converged: "
            << rpath.string() << '\n';
        all_ok = all_ok && converged == static_cast<int>(targets.size());
    }
    return all_ok ? kExitOk : kExitRegion;
}

int cmd_powerflow(const CommandContext& ctx, std::ostream& out) {
    const Scenario& s = ctx.scenario;
    std::vector<CompensationTarget> targets;
    const double step = s.powerflow.step_deg;
    const int n = static_cast<int>(std::ceil(360.0 / step - 1e-9));
    for (int i = 0; i < n; ++i) targets.push_back({s.powerflow.m, normalize_deg(i * step)});
    const auto rows = flow_sweep(targets, s.circuit.grid, s.circuit.output, s.line.model());
    const auto path = ctx.out_dir / "powerflow.csv";
    write_csv(path, flow_table(rows));
    int failed = 0;
    for (const auto& r : rows) failed += r.ok ? 0 : 1;
    out << rows.size() << " operating points, " << failed << " infeasible: " << path.string()
        << '\n';
    return failed == 0 ? kExitOk : kExitRegion;
}

int cmd_table2(const CommandContext& ctx, std::ostream& out) {
    const auto rows = table2_report();
    const auto path = ctx.out_dir / "table2.csv";
    write_csv(path, table2_table(rows));
    for (const auto& r : rows) {
        out << "row " << r.entry.row << ": " << to_string(r.cls);
        if (r.cls != Table2Class::Infeasible) {
            out << " k0=" << fmt(r.params.k0) << " k2=" << fmt(r.params.k2)
                << " beta=" << fmt(r.params.beta_deg);
        }
        out << '\n';
    }
    out << "table: " << path.string() << '\n';
    return kExitOk;
}

}  // namespace

const std::vector<Table2Entry>& table2_entries() {
    static const std::vector<Table2Entry> rows{
        {1, 0.0, 0.64, 0.0, 0.63},        {2, 52.0, 0.49, 51.1, 0.47},
        {3, 90.0, 1.0, 90.0, 0.98},       {4, 143.0, 0.41, 142.3, 0.41},
        {5, -174.0, 0.63, -174.9, 0.64},  {6, -141.0, 0.43, -141.8, 0.44},
        {7, -80.0, 0.43, -79.7, 0.43},    {8, -47.0, 0.34, -48.1, 0.33},
    };
    return rows;
}

std::string to_string(Table2Class c) {
    switch (c) {
        case Table2Class::Rhombus: return "rhombus";
        case Table2Class::General: return "general";
        case Table2Class::Infeasible: return "infeasible-under-model";
    }
    return "unknown";
}

std::vector<Table2Result> table2_report() {
    std::vector<Table2Result> out;
    for (const Table2Entry& e : table2_entries()) {
        Table2Result r;
        r.entry = e;
        const CompensationTarget t{e.m, e.phi1_deg};
        try {
            if (rhombus_contains(t, kEpsFeasController)) {
                r.params = select_params(t, kEpsFeasController);
                r.cls = Table2Class::Rhombus;
            } else {
                r.params = solve_params_general(t);
                r.cls = Table2Class::General;
            }
            const CompensationTarget back = forward_target(r.params);
            r.m_err = std::abs(back.m - e.m);
            r.phi_err_deg = std::abs(angle_diff_deg(back.phi1_deg, e.phi1_deg));
            if (r.m_err > kRoundTripTol || r.phi_err_deg > kRoundTripTol) {
                r.cls = Table2Class::Infeasible;
            }
        } catch (const RegionError&) {
            r.cls = Table2Class::Infeasible;
        }
        out.push_back(r);
    }
    return out;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"region",   "analytic",  "simulate",
                                                "closedloop", "powerflow", "table2"};
    return names;
}

CsvTable region_table(int samples) {
    CsvTable t;
    t.header = {"x", "y"};
    for (const auto& [x, y] : region_boundary(samples)) t.rows.push_back({fmt(x), fmt(y)});
    return t;
}

CsvTable waveform_table(const WaveformRecord& rec, int decimation) {
    CsvTable t;
    t.header.push_back("t_s");
    t.header.insert(t.header.end(), rec.names.begin(), rec.names.end());
    const std::size_t step = static_cast<std::size_t>(std::max(decimation, 1));
    for (std::size_t i = 0; i < rec.size(); i += step) {
        std::vector<std::string> row;
        row.reserve(t.header.size());
        row.push_back(fmt(rec.time_at(i)));
        for (const auto& ch : rec.channels) row.push_back(fmt(ch[i]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable trace_table(const LoopOutcome& outcome) {
    CsvTable t;
    t.header = {"iteration", "mode", "k0", "k2", "beta_deg", "U_o1", "phi_o1_deg"};
    for (const TraceEntry& e : outcome.trace) {
        t.rows.push_back({std::to_string(e.state.iteration), to_string(e.state.mode),
                          fmt(e.state.params.k0), fmt(e.state.params.k2),
                          fmt(e.state.params.beta_deg), fmt(e.meas.U_o1),
                          fmt(e.meas.phi_o1_deg)});
    }
    return t;
}

CsvTable flow_table(const std::vector<FlowRow>& rows) {
    CsvTable t;
    t.header = {"m", "phi1_deg", "U_mL_V", "phi_r_deg", "P_W", "Q_var", "status"};
    for (const FlowRow& r : rows) {
        t.rows.push_back({fmt(r.target.m), fmt(r.target.phi1_deg), fmt(r.U_mL), fmt(r.phi_r_deg),
                          fmt(r.P), fmt(r.Q), r.status});
    }
    return t;
}

CsvTable table2_table(const std::vector<Table2Result>& rows) {
    CsvTable t;
    t.header = {"row",      "phi1_deg", "m",        "measured_phi1_deg", "measured_m",
                "class",    "k0",       "k2",       "beta_deg",          "m_err",
                "phi_err_deg"};
    for (const Table2Result& r : rows) {
        const bool ok = r.cls != Table2Class::Infeasible;
        t.rows.push_back({std::to_string(r.entry.row), fmt(r.entry.phi1_deg), fmt(r.entry.m),
                          fmt(r.entry.measured_phi1_deg), fmt(r.entry.measured_m),
                          to_string(r.cls), ok ? fmt(r.params.k0) : "nan",
                          ok ? fmt(r.params.k2) : "nan", ok ? fmt(r.params.beta_deg) : "nan",
                          ok ? fmt(r.m_err) : "nan", ok ? fmt(r.phi_err_deg) : "nan"});
    }
    return t;
}

int dispatch(const std::string& command, const CommandContext& ctx, std::ostream& out,
             std::ostream& err) {
    try {
        std::filesystem::create_directories(ctx.out_dir);
        if (command == "region") return cmd_region(ctx, out);
        if (command == "analytic") return cmd_analytic(ctx, out);
        if (command == "simulate") return cmd_simulate(ctx, out);
        if (command == "closedloop") return cmd_closedloop(ctx, out);
        if (command == "powerflow") return cmd_powerflow(ctx, out);
        if (command == "table2") return cmd_table2(ctx, out);
        err << "unknown command: " << command << '\n';
        return kExitUsage;
    } catch (const RegionError& e) {
        err << "region error: " << e.what() << '\n';
        return kExitRegion;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace fdpfc
