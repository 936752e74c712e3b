#pragma once

#include <iosfwd>

namespace mmdoppler::cli {

/// Parses argv, runs the selected subcommand and returns the process exit
/// code (0 ok, 2 usage/config, 3 numerical, 1 anything else).
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mmdoppler::cli
