#pragma once

#include <string>
#include <vector>

namespace ramanmem::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationError = 1,
    kNumericFailure = 2,
    kThresholdFailure = 3,
};

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputDirEnv = "RAMANMEM_OUTPUT_DIR";

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

} // namespace ramanmem::cli
