#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace anj::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2 };

/// Entry point shared by the `anj` binary and the tests. `args` excludes the
/// program name. CSV goes to `out` unless an output path is configured;
/// warnings and errors go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Minimal CSV emitter: a '#' comment line, a header, then rows.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row);
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
    void write(std::ostream& out, const std::string& comment) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

CsvTable cmd_analyze(const ExperimentConfig& cfg, std::ostream& err);
CsvTable cmd_simulate(const ExperimentConfig& cfg, std::ostream& err);
CsvTable cmd_optimize_pj(const ExperimentConfig& cfg, std::ostream& err);

/// Data behind one of the paper-style figures 2..8, built from cfg's base
/// parameters. Throws UsageError for other ids.
CsvTable figure_table(int figure, const ExperimentConfig& cfg);

/// "# anj <version> <command>; key=value; ..." without the leading '#'.
std::string provenance_comment(const std::string& command, const ExperimentConfig& cfg);

}  // namespace anj::cli
