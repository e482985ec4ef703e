#ifndef SOSMOM_CONFIG_HPP
#define SOSMOM_CONFIG_HPP

// Flat "key = value" configuration files whose keys are command-line flag names.

#include "sosmom/core.hpp"

#include <fstream>
#include <istream>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace sosmom {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Parses key = value lines; '#' starts a comment, blank lines are skipped.
inline std::vector<std::pair<std::string, std::string>> read_flat_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    while (key.rfind("-", 0) == 0) key.erase(0, 1);
    if (key.empty()) throw ParseError("empty key", lineno);
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", lineno);
    out.emplace_back(key, value);
  }
  return out;
}

inline std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  return read_flat_config(in);
}

/// Appends "--key=value" for every config entry whose flag is absent from args.
/// Command-line flags take precedence over the file.
inline std::vector<std::string> merge_config_args(std::vector<std::string> args,
                                                  const std::vector<std::pair<std::string, std::string>>& cfg) {
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  for (const auto& [k, v] : cfg) {
    if (k == "config" || given.count(k)) continue;
    args.push_back("--" + k + "=" + v);
  }
  return args;
}

}  // namespace sosmom

#endif  // SOSMOM_CONFIG_HPP
