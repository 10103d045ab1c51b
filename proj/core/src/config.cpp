#include "lbinv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lbinv/errors.hpp"

namespace lbinv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ParameterError(key + ": not a number: '" + text + "'");
  return v;
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::known_keys() {
  static const std::vector<std::string> keys = {
      "alpha",         "alpha_grid",   "batch_size",     "c",
      "code_dim",      "data_dir",     "deltas",         "epochs",
      "experiment",    "inner_iters",  "landweber_iters", "learning_rate",
      "max_iters",     "max_noise_std", "measurements",  "model",
      "noise_levels",  "noise_std",    "out_dir",        "outer_iters",
      "radius_frac",   "samples",      "seed",           "size",
      "stop_tol",      "tau_disc",     "threads",        "train_images",
      "architecture",  "validation",
  };
  return keys;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw FormatError(origin + ":" + std::to_string(lineno) + ": expected key=value");
    }
    try {
      cfg.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const ParameterError& e) {
      throw FormatError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ParameterError("unknown config key '" + key + "'");
  }
  values_[key] = value;
}

void ExperimentConfig::merge(const ExperimentConfig& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

std::size_t ExperimentConfig::get_size(const std::string& key, std::size_t fallback) const {
  return static_cast<std::size_t>(get_u64(key, fallback));
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& text = it->second;
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ParameterError(key + ": not a non-negative integer: '" + text + "'");
  }
  return std::stoull(text);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParameterError(key + ": not a boolean: '" + v + "'");
}

std::vector<double> ExperimentConfig::get_grid(const std::string& key,
                                               const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return parse_grid(it->second);
  } catch (const ParameterError& e) {
    throw ParameterError(key + ": " + e.what());
  }
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  const char sep = spec.find(':') != std::string::npos ? ':' : ',';
  std::stringstream in(spec);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(trim(part));

  if (sep == ',') {
    std::vector<double> out;
    for (const auto& p : parts) out.push_back(to_double("grid", p));
    if (out.empty()) throw ParameterError("empty grid");
    return out;
  }
  if (parts.size() != 4) throw ParameterError("grid must be start:stop:kind:count, got '" + spec + "'");
  const double a = to_double("grid", parts[0]);
  const double b = to_double("grid", parts[1]);
  const double n_real = to_double("grid", parts[3]);
  if (n_real < 1 || n_real != std::floor(n_real)) throw ParameterError("grid count must be a positive integer");
  const auto n = static_cast<std::size_t>(n_real);
  std::vector<double> out(n);
  if (parts[2] == "geometric") {
    if (!(a > 0.0 && b > 0.0)) throw ParameterError("geometric grid needs positive endpoints");
    for (std::size_t k = 0; k < n; ++k) {
      const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
      out[k] = std::exp(std::log(a) + t * (std::log(b) - std::log(a)));
    }
    if (n > 1) out.back() = b;
  } else if (parts[2] == "linear") {
    for (std::size_t k = 0; k < n; ++k) {
      const double t = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
      out[k] = a + t * (b - a);
    }
  } else {
    throw ParameterError("grid kind must be geometric or linear, got '" + parts[2] + "'");
  }
  out.front() = a;
  return out;
}

}  // namespace lbinv
