#pragma once

#include <iosfwd>

#include "debias/config.hpp"

namespace debias {

// Each command reads its inputs from the config (CLI flags already merged),
// writes artifacts under the `out` directory and a human summary to `log`.
// Errors are thrown; the CLI maps them to exit codes.

void cmd_train(const Config& config, std::ostream& log);
void cmd_detect(const Config& config, std::ostream& log);
void cmd_debias(const Config& config, std::ostream& log);
void cmd_eval(const Config& config, std::ostream& log);
void cmd_madlibs(const Config& config, std::ostream& log);
void cmd_probe(const Config& config, std::ostream& log);

}  // namespace debias
