#pragma once

namespace fbrl {

/// Entry point for the fbrl command line tool.
/// Subcommands: train, ablate, report, validate-config, validate-feedback.
/// Returns the process exit code; failures emit a JSON error record on stderr.
int run_cli(int argc, char** argv);

}  // namespace fbrl
