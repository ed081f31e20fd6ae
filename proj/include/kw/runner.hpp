#pragma once

#include <iosfwd>
#include <string>

#include "kw/config.hpp"

namespace kw {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitConfig = 2, kExitDivergence = 3, kExitIo = 4 };

// Initial state of the configured scenario at start_time().
MildState scenario_data(const RunConfig& cfg);

// Executes cfg.command, writing into cfg.output. Progress and errors go to `log`; the return
// value is one of ExitCode. CSV files carry no timing, so equal configs give equal bytes.
int run(const RunConfig& cfg, std::ostream& log);

// Text of the manifest: code version, seed and the effective config, all parseable.
std::string manifest_text(const RunConfig& cfg);
const char* code_version();

}  // namespace kw
