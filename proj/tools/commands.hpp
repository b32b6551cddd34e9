#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"

namespace canex::cli {

enum class Format { csv, records };

struct CommandOutput {
    std::string body;
    /// Extra line for the terminal (counts, summaries); never part of the output file.
    std::string summary;
    bool ok = true;
};

CommandOutput cmd_enumerate(const std::string& kind, int n);
CommandOutput cmd_coeffs(const RunConfig& config, Format format);
CommandOutput cmd_virial(const RunConfig& config, Format format);
CommandOutput cmd_free_energy(const RunConfig& config, Format format);
CommandOutput cmd_kp_check(const RunConfig& config, Format format);
/// suite: all, cancellation, oracle, kp or limits.
CommandOutput cmd_validate(const std::string& suite, const RunConfig& config, Format format);

}  // namespace canex::cli
