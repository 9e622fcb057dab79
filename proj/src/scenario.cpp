#include "fdpfc/scenario.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fdpfc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_plain(const std::string& s, double& v) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, t.data() + t.size(), v);
    return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

enum class Range { Any, Positive, NonNegative };

struct Ctx {
    std::string key;
    std::string value;
    int line = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw ScenarioError("line " + std::to_string(line) + ": key " + key + ": " + why);
    }

    // Accepts a decimal number or a ratio a/b.
    double number(Range r = Range::Any) const {
        double v = 0.0;
        const auto slash = value.find('/');
        if (slash == std::string::npos) {
            if (!parse_plain(value, v)) fail("not a number: '" + value + "'");
        } else {
            double num = 0.0;
            double den = 0.0;
            if (!parse_plain(value.substr(0, slash), num) ||
                !parse_plain(value.substr(slash + 1), den) || den == 0.0) {
                fail("not a number or ratio: '" + value + "'");
            }
            v = num / den;
        }
        if (!std::isfinite(v)) fail("value must be finite");
        if (r == Range::Positive && !(v > 0.0)) fail("value must be positive");
        if (r == Range::NonNegative && !(v >= 0.0)) fail("value must be non-negative");
        return v;
    }

    int integer(int min_value) const {
        const std::string t = trim(value);
        int v = 0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
            fail("not an integer: '" + value + "'");
        }
        if (v < min_value) fail("value must be at least " + std::to_string(min_value));
        return v;
    }
};

struct Parsed {
    Scenario s = default_scenario();
    std::optional<double> dt;
    std::optional<double> duration;
};

using Handler = std::function<void(const Ctx&, Parsed&)>;

const std::map<std::string, std::map<std::string, Handler>>& handlers() {
    static const std::map<std::string, std::map<std::string, Handler>> h{
        {"grid",
         {{"U_imL_V", [](const Ctx& c, Parsed& p) { p.s.circuit.grid.U_imL = c.number(Range::Positive); }},
          {"f_Hz", [](const Ctx& c, Parsed& p) { p.s.circuit.grid.f = c.number(Range::Positive); }}}},
        {"transformers",
         {{"N_i", [](const Ctx& c, Parsed& p) { p.s.circuit.grid.input.turn_ratio = c.number(Range::Positive); }},
          {"N_o", [](const Ctx& c, Parsed& p) { p.s.circuit.output.turn_ratio = c.number(Range::Positive); }},
          {"group",
           [](const Ctx& c, Parsed& p) {
               try {
                   const ConnectionGroup g = parse_connection_group(trim(c.value));
                   p.s.circuit.grid.input.group = g;
                   p.s.circuit.output.group = g;
               } catch (const DomainError& e) {
                   c.fail(e.what());
               }
           }}}},
        {"filter",
         {{"Lf_mH", [](const Ctx& c, Parsed& p) { p.s.circuit.L_f = 1e-3 * c.number(Range::Positive); }},
          {"Cf_uF", [](const Ctx& c, Parsed& p) { p.s.circuit.C_f = 1e-6 * c.number(Range::Positive); }},
          {"R_load_ohm", [](const Ctx& c, Parsed& p) { p.s.circuit.R_load = c.number(Range::Positive); }},
          {"fs_kHz", [](const Ctx& c, Parsed& p) { p.s.circuit.f_s = 1e3 * c.number(Range::Positive); }}}},
        {"control",
         {{"U_ref_V", [](const Ctx& c, Parsed& p) { p.s.control.U_ref_V = c.number(Range::NonNegative); }},
          {"phi_ref_deg", [](const Ctx& c, Parsed& p) { p.s.control.phi_ref_deg = c.number(); }},
          {"delta_deg", [](const Ctx& c, Parsed& p) { p.s.control.delta_deg = c.number(Range::Positive); }},
          {"amp_tol", [](const Ctx& c, Parsed& p) { p.s.control.amp_tol = c.number(Range::Positive); }},
          {"gain_phase", [](const Ctx& c, Parsed& p) { p.s.control.gain_phase = c.number(Range::Positive); }},
          {"gain_amp", [](const Ctx& c, Parsed& p) { p.s.control.gain_amp = c.number(Range::Positive); }},
          {"eps_feas", [](const Ctx& c, Parsed& p) { p.s.control.eps_feas = c.number(Range::NonNegative); }},
          {"max_iter", [](const Ctx& c, Parsed& p) { p.s.control.max_iter = c.integer(0); }},
          {"plant",
           [](const Ctx& c, Parsed& p) {
               const std::string v = trim(c.value);
               if (v != "analytic" && v != "switching") c.fail("expected analytic or switching");
               p.s.control.plant = v;
           }},
          {"k0",
           [](const Ctx& c, Parsed& p) {
               const double v = c.number();
               if (std::abs(v) > 1.0) c.fail("value must lie in [-1, 1]");
               p.s.control.k0 = v;
           }},
          {"k2", [](const Ctx& c, Parsed& p) { p.s.control.k2 = c.number(Range::NonNegative); }},
          {"beta_deg", [](const Ctx& c, Parsed& p) { p.s.control.beta_deg = c.number(); }},
          {"random_targets", [](const Ctx& c, Parsed& p) { p.s.control.random_targets = c.integer(0); }}}},
        {"sim",
         {{"dt_us", [](const Ctx& c, Parsed& p) { p.dt = 1e-6 * c.number(Range::Positive); }},
          {"duration_ms", [](const Ctx& c, Parsed& p) { p.duration = 1e-3 * c.number(Range::Positive); }},
          {"settle_cycles", [](const Ctx& c, Parsed& p) { p.s.sim.settle_cycles = c.integer(0); }}}},
        {"line",
         {{"R_ohm", [](const Ctx& c, Parsed& p) { p.s.line.R_ohm = c.number(Range::NonNegative); }},
          {"X_ohm", [](const Ctx& c, Parsed& p) { p.s.line.X_ohm = c.number(Range::Positive); }},
          {"Vr_V", [](const Ctx& c, Parsed& p) { p.s.line.Vr_V = c.number(Range::Positive); }},
          {"Vr_deg", [](const Ctx& c, Parsed& p) { p.s.line.Vr_deg = c.number(); }}}},
        {"powerflow",
         {{"m", [](const Ctx& c, Parsed& p) { p.s.powerflow.m = c.number(Range::NonNegative); }},
          {"step_deg", [](const Ctx& c, Parsed& p) { p.s.powerflow.step_deg = c.number(Range::Positive); }}}},
        {"outputs",
         {{"dir", [](const Ctx& c, Parsed& p) { p.s.outputs.dir = trim(c.value); }},
          {"decimation", [](const Ctx& c, Parsed& p) { p.s.outputs.decimation = c.integer(1); }},
          {"region_samples", [](const Ctx& c, Parsed& p) { p.s.outputs.region_samples = c.integer(4); }}}},
    };
    return h;
}

}  // namespace

ReferenceSetpoint ControlSection::reference() const {
    return ReferenceSetpoint{U_ref_V, phi_ref_deg, delta_deg, amp_tol};
}

ControllerConfig ControlSection::controller(double vpu) const {
    return ControllerConfig{gain_phase, gain_amp, eps_feas, vpu};
}

LineModel LineSection::model() const {
    return LineModel{R_ohm, X_ohm, Phasor::polar(Vr_V, Vr_deg)};
}

Scenario default_scenario() {
    Scenario s;
    s.sim = default_sim_config(s.circuit);
    return s;
}

Scenario parse_scenario(const std::string& text) {
    Parsed parsed;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ScenarioError("line " + std::to_string(line_no) + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!handlers().count(section)) {
                throw ScenarioError("line " + std::to_string(line_no) + ": unknown section [" +
                                    section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ScenarioError("line " + std::to_string(line_no) + ": expected key = value");
        }
        if (section.empty()) {
            throw ScenarioError("line " + std::to_string(line_no) + ": key outside of a section");
        }
        Ctx ctx{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        const auto& keys = handlers().at(section);
        const auto it = keys.find(ctx.key);
        if (it == keys.end()) {
            throw ScenarioError("line " + std::to_string(line_no) + ": unknown key " + ctx.key +
                                " in [" + section + "]");
        }
        if (ctx.value.empty()) ctx.fail("missing value");
        it->second(ctx, parsed);
    }

    Scenario s = parsed.s;
    const SimConfig defaults = default_sim_config(s.circuit);
    s.sim.dt = parsed.dt.value_or(defaults.dt);
    s.sim.duration = parsed.duration.value_or(defaults.duration);
    try {
        s.circuit.validate();
        s.sim.validate(s.circuit);
    } catch (const DomainError& e) {
        throw ScenarioError(std::string("invalid scenario: ") + e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ScenarioError("cannot open scenario " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_scenario(ss.str());
}

}  // namespace fdpfc
