#pragma once

#include "eventcast/error.hpp"

#include <ostream>

namespace eventcast::cli {

/// 0 success, 1 validation error (bad flags, files or documents), 2 fit failure.
int exit_code(ErrorCode code);

/// Runs one subcommand: ingest, fit, evaluate, curves, simulate, synth, serve, openapi.
/// Results go to `out` unless an --out path is given; diagnostics and usage go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace eventcast::cli
