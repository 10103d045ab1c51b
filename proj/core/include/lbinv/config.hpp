#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lbinv {

/// Flat key=value experiment settings. Keys outside known_keys() are rejected
/// on every write, so a typo in a config file fails loudly instead of being ignored.
class ExperimentConfig {
 public:
  static const std::vector<std::string>& known_keys();

  /// One "key = value" per line; blank lines and lines starting with '#' are skipped.
  static ExperimentConfig parse(const std::string& text, const std::string& origin = "<string>");
  static ExperimentConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  /// Values in other replace ours.
  void merge(const ExperimentConfig& other);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_grid(const std::string& key, const std::vector<double>& fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

/// "a:b:geometric:n", "a:b:linear:n" or a comma list "a,b,c".
std::vector<double> parse_grid(const std::string& spec);

}  // namespace lbinv
