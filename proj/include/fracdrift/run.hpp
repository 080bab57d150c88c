#pragma once

// Dispatch of a parsed RunConfig to the library, writing <prefix>_report.txt and
// <prefix>.csv into the output directory.

#include <iosfwd>
#include <optional>
#include <string>

#include "fracdrift/config.hpp"

namespace fracdrift {

enum ExitCode : int { exit_ok = 0, exit_fail = 1, exit_usage = 2, exit_numerical = 3 };

struct RunOptions {
    /// Overrides output.dir.
    std::optional<std::string> out_dir;
    /// Overrides the top-level seed.
    std::optional<long> seed;
    /// Print the whole report instead of the one-line summary.
    bool verbose = false;
    bool write_files = true;
};

/// 0 on success or PASS, 1 on a FAIL certificate, 2 on invalid input (one-line diagnostic on
/// err naming the field), 3 on numerical failure.
int run(const RunConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err);

/// Parses the document, then runs it; parse errors exit with 2.
int run_document(const std::string& text, const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace fracdrift
