#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hgkt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one `hgkt` invocation; args[0] is the program name. Returns the
/// process exit code: 0 success, 1 bad input or flags, 2 runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Version string recorded in run manifests.
std::string version();

}  // namespace hgkt::cli
