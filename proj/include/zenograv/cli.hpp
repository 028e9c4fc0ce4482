#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "zenograv/error.hpp"

namespace zenograv::cli {

struct RunConfig {
  std::string command;
  nlohmann::json params = nlohmann::json::object();
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 0;
};

// Subcommand, universal flags (--config, --output-dir, --seed) and free
// --key value pairs. Flags override keys from the config file.
RunConfig parse_command_line(int argc, const char* const* argv);

struct RunResult {
  std::vector<std::filesystem::path> files;
  std::string summary;
};

RunResult run(const RunConfig& cfg);

// Full program: parse, run, print the summary line, map errors to exit codes
// (validation 2, numerical 3, i/o 4).
int main_entry(int argc, const char* const* argv);

int exit_code(ErrorCategory category);

// printf %.9g
std::string format_number(double x);

// Writes through a temporary file in the same directory and renames it over
// `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

const std::vector<std::string>& commands();

}  // namespace zenograv::cli
