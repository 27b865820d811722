#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "longmem/error.hpp"
#include "longmem/sisr.hpp"
#include "longmem/ssm.hpp"

namespace longmem::cli {

// Bad configuration or input content; maps to exit code 1.
class ConfigError : public DomainError {
 public:
  explicit ConfigError(const std::string& what) : DomainError(what) {}
};

// Unreadable or unwritable files; maps to exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Effective settings of one run. Built from a flat `key = value` file plus
// overrides; later assignments win.
struct RunConfig {
  ModelSpec model;
  std::size_t num_particles = 500;
  double delta = 1.0;
  ResamplePolicy resample;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  std::string data;
  std::string column = "auto";  // auto | return | price
  std::string out = "out";

  std::size_t T = 1000;
  std::size_t sim_truncation = 2048;

  std::size_t split = 0;  // 0: data length minus horizon
  std::size_t horizon = 20;
  std::size_t draws = 2000;
  double level = 0.95;

  std::size_t acf_lags = 20;
  double bandwidth_exponent = 0.5;
  std::string gph_input = "proxy";  // proxy | raw

  // Raw key/value pairs as last assigned, for the run manifest.
  std::map<std::string, std::string> entries;

  void set(const std::string& key, const std::string& value);
  // Resolves cross-key settings (learned parameters and their boxes) and
  // validates the model. Call after the last set().
  void finalize();
  std::uint64_t require_seed() const;
  FilterOptions filter_options() const;
};

// Parses `key = value` lines; '#' starts a comment.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

}  // namespace longmem::cli
