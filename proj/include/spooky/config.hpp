#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace spooky::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat INI-style file: [section] headers, key = value lines, '#' comments.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;

  // Comma-separated list of doubles.
  std::vector<double> get_list(const std::string& section,
                               const std::string& key) const;

  // FNV-1a of the canonical serialized content, for provenance comments.
  std::uint64_t content_hash() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace spooky::config
