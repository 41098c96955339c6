#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

namespace scalohar::cli {

/// key=value lines; '#' starts a comment; repeated keys accumulate.
std::vector<std::pair<std::string, std::string>> read_run_config(const std::filesystem::path& path);

/// Fills every option of `app` that was not given on the command line,
/// first from SCALOHAR_<KEY> environment variables, then from the config
/// entries. Keys are long flag names. Unknown config keys throw.
void merge_run_config(CLI::App& app, const std::vector<std::pair<std::string, std::string>>& entries);

std::string env_name(const std::string& key);

}  // namespace scalohar::cli
