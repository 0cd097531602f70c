#pragma once

// Sectioned key-value configuration:
//   [problem]
//   kappa = 0.5
// Every key has a typed default; unknown sections or keys are rejected.

#include "nlsctl/dynamics.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nlsctl {

enum class ValueType { Int, Double, String, Bool };

struct ConfigEntry {
  ValueType type;
  std::string value;  ///< canonical text form
  std::string help;
};

class Config {
 public:
  /// All keys with their defaults.
  Config();

  /// Merges an INI file. Throws ConfigError on unknown keys or bad values.
  void load(const std::string& path);
  void load(std::istream& is, const std::string& origin = "<stream>");

  /// Sets "section.key" from text, validating the type.
  void set(const std::string& dotted, const std::string& value);

  bool has(const std::string& dotted) const;
  long get_int(const std::string& dotted) const;
  double get_double(const std::string& dotted) const;
  const std::string& get_string(const std::string& dotted) const;
  bool get_bool(const std::string& dotted) const;
  std::uint64_t seed() const;

  void dump(std::ostream& os, bool with_help = true) const;

  const std::map<std::string, std::map<std::string, ConfigEntry>>& sections() const { return sections_; }

 private:
  const ConfigEntry& entry(const std::string& dotted) const;
  std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
};

/// Resolves a profile spec: a built-in name, "file:<path>" with a real grid
/// file, or for W the keyword "auto".
Profile resolve_profile(const std::string& spec);

/// Problem block -> setup. Overrides for N and kappa are taken from the
/// caller where a command needs them.
ProblemSetup problem_setup(const Config& cfg);

std::vector<std::string> split_list(const std::string& s);

}  // namespace nlsctl
