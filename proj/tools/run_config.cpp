#include "run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>

#include "scalohar/error.hpp"

namespace scalohar::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == ',') {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

bool is_list(const CLI::Option* opt) { return opt->get_items_expected_max() > 1; }

void assign(CLI::Option* opt, const std::vector<std::string>& values) {
  for (const auto& v : values) opt->add_result(v);
  opt->run_callback();
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config file " + path.string());
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

std::string env_name(const std::string& key) {
  std::string name = "SCALOHAR_";
  for (char c : key) name += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

void merge_run_config(CLI::App& app, const std::vector<std::pair<std::string, std::string>>& entries) {
  std::map<std::string, CLI::Option*> by_key;
  for (auto* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const auto& key = opt->get_lnames().front();
    if (key == "help" || key == "config") continue;
    by_key[key] = opt;
  }
  std::map<std::string, std::vector<std::string>> from_file;
  for (const auto& [key, value] : entries) {
    if (!by_key.count(key))
      throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "' for " + app.get_name());
    auto& slot = from_file[key];
    if (!slot.empty() && !is_list(by_key[key]))
      throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' given twice");
    for (auto& v : is_list(by_key[key]) ? split_list(value) : std::vector<std::string>{value}) slot.push_back(v);
  }
  for (auto& [key, opt] : by_key) {
    if (opt->count() > 0) continue;
    if (const char* env = std::getenv(env_name(key).c_str())) {
      assign(opt, is_list(opt) ? split_list(env) : std::vector<std::string>{env});
      continue;
    }
    if (auto it = from_file.find(key); it != from_file.end()) assign(opt, it->second);
  }
}

}  // namespace scalohar::cli
