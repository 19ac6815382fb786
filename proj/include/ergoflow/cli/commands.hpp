#pragma once

#include "ergoflow/cli/scenario_file.hpp"
#include "ergoflow/cli/table.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace ergoflow::cli {

/// Command-line overrides of the scenario file.
struct CommandOptions {
    std::optional<OutputFormat> format;
    std::optional<std::string> out;
    std::optional<int> samples;
    std::optional<int> grid;
    /// Worker threads for grid scans; 0 means hardware concurrency.
    int threads = 1;
};

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCapExceeded = 3;

Table cmd_maxwork(const ScenarioFile& scenario, const CommandOptions& options);
Table cmd_path(const ScenarioFile& scenario, const CommandOptions& options);
Table cmd_figure1(const ScenarioFile& scenario, const CommandOptions& options);
Table cmd_passive(const ScenarioFile& scenario, const CommandOptions& options);
Table cmd_microcanonical(const ScenarioFile& scenario, const CommandOptions& options);

/// Runs `command` on the scenario text and writes the table to `out` (or to
/// the configured path). Diagnostics go to `err`. Returns the exit code.
int run_command(std::string_view command, std::string_view scenario_text,
                const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Reads ERGOFLOW_THREADS; 1 when unset, 0 for "all cores".
int threads_from_environment();

} // namespace ergoflow::cli
