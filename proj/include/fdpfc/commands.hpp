#pragma once

// Command implementations behind the fdpfc executable. Each command writes
// one CSV into the output directory and a short summary to `out`.

#include "fdpfc/csv.hpp"
#include "fdpfc/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fdpfc {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitRegion = 2 };

struct Table2Entry {
    int row = 0;
    double phi1_deg = 0.0;  // calculated
    double m = 0.0;
    double measured_phi1_deg = 0.0;
    double measured_m = 0.0;
};

/// Calculated and measured operating points of the eight prototype tests.
const std::vector<Table2Entry>& table2_entries();

enum class Table2Class { Rhombus, General, Infeasible };

std::string to_string(Table2Class c);

struct Table2Result {
    Table2Entry entry;
    Table2Class cls = Table2Class::Infeasible;
    ControlParams params;
    double m_err = 0.0;        // |m(forward) - m|
    double phi_err_deg = 0.0;  // shortest angular error
};

std::vector<Table2Result> table2_report();

struct CommandContext {
    Scenario scenario;
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 1;
};

const std::vector<std::string>& command_names();

/// Runs `command`; returns an ExitCode. Diagnostics go to `err`.
int dispatch(const std::string& command, const CommandContext& ctx, std::ostream& out,
             std::ostream& err);

// Table builders, exposed for tests and for callers that skip the files.
CsvTable region_table(int samples);
CsvTable waveform_table(const WaveformRecord& rec, int decimation);
CsvTable trace_table(const LoopOutcome& outcome);
CsvTable flow_table(const std::vector<FlowRow>& rows);
CsvTable table2_table(const std::vector<Table2Result>& rows);

}  // namespace fdpfc
