#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace gkpmod::cli {

inline constexpr int kManifestSchema = 1;
inline constexpr const char* kVersion = "gkpmod 0.1.0";

struct RunContext {
    std::string command;
    Json config;
    std::uint64_t seed = 1;
    int threads = 1;
    std::filesystem::path out_dir = ".";
    std::vector<std::string> outputs;  // file names relative to out_dir, in write order

    void write_file(const std::string& name, const std::string& contents);
};

const std::vector<std::string>& command_names();

// runs the command and writes its manifest; library errors propagate to the caller
void run_command(RunContext& ctx);

// exit code for an exception escaping run_command: 2 for configuration problems, 3 for numerical ones
int exit_code_for(const std::exception& e);

}  // namespace gkpmod::cli
