#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace forge {

struct ProcessResult {
    int exit_code = -1;  // -1 when killed or on timeout
    bool timed_out = false;
    std::string output;  // stdout and stderr, interleaved as written
};

/// Runs argv[0] (searched on PATH when it has no '/') and captures its
/// output. The child gets its own process group, which is killed when the
/// timeout expires. Throws ForgeError if the process cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout);

/// Resolves an executable name the way execvp would; nullopt when not found
/// or not executable.
std::optional<std::filesystem::path> find_executable(const std::string& name);

}  // namespace forge
