#pragma once

#include <iosfwd>

namespace longmem::cli {

// Entry point of longmem-smc. Returns the process exit code: 0 on success,
// 1 on configuration or domain errors, 2 on I/O errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace longmem::cli
