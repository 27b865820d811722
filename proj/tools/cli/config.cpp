#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace longmem::cli {
namespace {

const std::set<std::string> kKnownKeys{
    "ar", "d", "ma", "sigma_eta", "link", "obs_noise_sd", "learn", "N", "delta",
    "resample", "ess_threshold", "resampler", "window", "seed", "threads", "data",
    "column", "out", "T", "sim_truncation", "split", "horizon", "draws", "level",
    "acf_lags", "bandwidth_exponent", "gph_input"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("'" + key + "': not a number: " + v);
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + key + "': not a non-negative integer: " + v);
  }
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  return out;
}

LearnedParam parse_learned(const std::string& name) {
  LearnedParam p;
  if (name.size() < 3 || (name.rfind("ar", 0) != 0 && name.rfind("ma", 0) != 0)) {
    throw ConfigError("learned parameter '" + name + "' must look like ar<k> or ma<k>");
  }
  p.kind = name[0] == 'a' ? ParamKind::kAr : ParamKind::kMa;
  const auto lag = to_uint("learn", name.substr(2));
  if (lag == 0) throw ConfigError("learned parameter lags start at 1");
  p.index = static_cast<std::size_t>(lag - 1);
  return p;
}

}  // namespace

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (!kKnownKeys.count(key) && key.rfind("prior.", 0) != 0) {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
  entries[key] = value;
}

void RunConfig::finalize() {
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = entries.find(k);
    return it == entries.end() ? nullptr : &it->second;
  };
  try {
    if (auto v = get("ar")) model.latent.ar = to_doubles("ar", *v);
    if (auto v = get("d")) model.latent.d = to_double("d", *v);
    if (auto v = get("ma")) model.latent.ma = to_doubles("ma", *v);
    if (auto v = get("sigma_eta")) model.latent.sigma_eta = to_double("sigma_eta", *v);
    if (auto v = get("link")) model.link = parse_link(*v);
    if (auto v = get("obs_noise_sd")) model.obs_noise_sd = to_double("obs_noise_sd", *v);
    if (auto v = get("window")) {
      if (*v == "full") {
        model.window.reset();
      } else {
        model.window = static_cast<std::size_t>(to_uint("window", *v));
      }
    }
    model.learned.clear();
    if (auto v = get("learn")) {
      for (const auto& name : split_list(*v)) {
        LearnedParam p = parse_learned(name);
        const auto box = get("prior." + name);
        if (!box) throw ConfigError("learned parameter '" + name + "' needs prior." + name + " = lo,hi");
        const auto bounds = to_doubles("prior." + name, *box);
        if (bounds.size() != 2) throw ConfigError("prior." + name + " must be 'lo,hi'");
        p.lower = bounds[0];
        p.upper = bounds[1];
        model.learned.push_back(p);
      }
    }
    for (const auto& [k, v] : entries) {
      if (k.rfind("prior.", 0) == 0) {
        const auto name = k.substr(6);
        const bool used = std::any_of(model.learned.begin(), model.learned.end(),
                                      [&](const LearnedParam& p) { return p.name() == name; });
        if (!used) throw ConfigError("'" + k + "' given but " + name + " is not learned");
      }
    }

    if (auto v = get("N")) num_particles = static_cast<std::size_t>(to_uint("N", *v));
    if (auto v = get("delta")) delta = to_double("delta", *v);
    if (auto v = get("resample")) {
      if (*v == "every") {
        resample.every_step = true;
      } else if (*v == "ess") {
        resample.every_step = false;
      } else {
        throw ConfigError("resample must be 'every' or 'ess'");
      }
    }
    if (auto v = get("ess_threshold")) resample.ess_threshold = to_double("ess_threshold", *v);
    if (auto v = get("resampler")) {
      if (*v == "multinomial") {
        resample.scheme = ResampleScheme::kMultinomial;
      } else if (*v == "systematic") {
        resample.scheme = ResampleScheme::kSystematic;
      } else {
        throw ConfigError("resampler must be 'multinomial' or 'systematic'");
      }
    }
    if (auto v = get("seed")) seed = to_uint("seed", *v);
    if (auto v = get("threads")) threads = static_cast<unsigned>(to_uint("threads", *v));
    if (auto v = get("data")) data = *v;
    if (auto v = get("column")) column = *v;
    if (column != "auto" && column != "return" && column != "price") {
      throw ConfigError("column must be auto, return, or price");
    }
    if (auto v = get("out")) out = *v;
    if (auto v = get("T")) T = static_cast<std::size_t>(to_uint("T", *v));
    if (auto v = get("sim_truncation")) {
      sim_truncation = static_cast<std::size_t>(to_uint("sim_truncation", *v));
    }
    if (auto v = get("split")) split = static_cast<std::size_t>(to_uint("split", *v));
    if (auto v = get("horizon")) horizon = static_cast<std::size_t>(to_uint("horizon", *v));
    if (auto v = get("draws")) draws = static_cast<std::size_t>(to_uint("draws", *v));
    if (auto v = get("level")) level = to_double("level", *v);
    if (auto v = get("acf_lags")) acf_lags = static_cast<std::size_t>(to_uint("acf_lags", *v));
    if (auto v = get("bandwidth_exponent")) {
      bandwidth_exponent = to_double("bandwidth_exponent", *v);
    }
    if (auto v = get("gph_input")) gph_input = *v;
    if (gph_input != "proxy" && gph_input != "raw") {
      throw ConfigError("gph_input must be 'proxy' or 'raw'");
    }
    model.validate();
    config_from_delta(delta);
    if (num_particles < 2) throw ConfigError("N must be at least 2");
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw ConfigError("a seed is mandatory (set 'seed' or pass --seed)");
  return *seed;
}

FilterOptions RunConfig::filter_options() const {
  FilterOptions o;
  o.num_particles = num_particles;
  o.kernel = config_from_delta(delta);
  o.resample = resample;
  o.seed = require_seed();
  o.threads = threads;
  return o;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      cfg.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace longmem::cli
