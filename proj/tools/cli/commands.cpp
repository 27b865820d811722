#include "cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "longmem/error.hpp"
#include "longmem/forecast.hpp"
#include "longmem/memest.hpp"
#include "longmem/sisr.hpp"
#include "longmem/ssm.hpp"
#include "longmem/version.hpp"

namespace longmem::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Context {
  std::string command;
  RunConfig cfg;
  bool record_timings = false;
  std::ostream& out;
  std::ostream& err;
  std::map<std::string, double> timings;
};

fs::path output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + cfg.out + "'");
  return dir;
}

// Writes through a string buffer so a failed run never leaves half a file.
void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void write_manifest(const Context& ctx, const fs::path& dir, const json& extra = json::object()) {
  json config = json::object();
  for (const auto& [k, v] : ctx.cfg.entries) {
    if (k == "out" || k == "threads") continue;
    config[k] = v;
  }
  json m;
  m["command"] = ctx.command;
  m["seed"] = ctx.cfg.seed ? json(*ctx.cfg.seed) : json(nullptr);
  m["config"] = config;
  m["version"] = kVersion;
  if (!extra.empty()) m["results"] = extra;
  if (ctx.record_timings) m["timings_seconds"] = ctx.timings;
  write_file(dir / "run.json", m.dump(2) + "\n");
}

std::vector<double> load_series(Context& ctx) {
  if (ctx.cfg.data.empty()) throw ConfigError("no input data: set 'data' to a CSV path");
  Series s = ingest_file(ctx.cfg.data, ctx.cfg.column);
  for (const auto& w : s.warnings) ctx.err << "warning: " << ctx.cfg.data << ": " << w << "\n";
  if (s.values.empty()) throw ConfigError("'" + ctx.cfg.data + "' contains no observations");
  return s.values;
}

template <class F>
auto timed(Context& ctx, const std::string& label, F&& f) {
  const auto start = Clock::now();
  auto result = f();
  ctx.timings[label] = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

std::string filter_csv(const std::vector<FilterSnapshot>& snaps, std::size_t dim) {
  std::ostringstream s;
  CsvWriter w(s);
  w.field("t").field("state_mean").field("q02_5").field("q50").field("q97_5").field("ess");
  for (std::size_t j = 1; j <= dim; ++j) w.field("theta_bar_" + std::to_string(j));
  for (std::size_t j = 1; j <= dim; ++j) w.field("theta_var_" + std::to_string(j));
  w.end_row();
  for (const auto& sn : snaps) {
    w.field(sn.t).field(sn.state_mean).field(sn.q025).field(sn.q50).field(sn.q975).field(sn.ess);
    for (double v : sn.theta_bar) w.field(v);
    for (double v : sn.theta_var) w.field(v);
    w.end_row();
  }
  return s.str();
}

std::string params_csv(const std::vector<FilterSnapshot>& snaps, const ModelSpec& model) {
  std::ostringstream s;
  CsvWriter w(s);
  const auto names = model.param_names();
  w.field("t");
  for (const auto& n : names) w.field(n).field(n + "_sd");
  w.end_row();
  for (const auto& sn : snaps) {
    w.field(sn.t);
    for (std::size_t j = 0; j < names.size(); ++j) {
      w.field(sn.theta_bar[j]).field(std::sqrt(std::max(0.0, sn.theta_var[j])));
    }
    w.end_row();
  }
  return s.str();
}

int cmd_simulate(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto seed = cfg.require_seed();
  if (cfg.T == 0) throw ConfigError("T must be positive");
  const auto sim = timed(ctx, "simulate",
                         [&] { return simulate_model(cfg.model, cfg.T, seed, cfg.sim_truncation); });
  std::ostringstream s;
  CsvWriter w(s);
  w.field("t").field("state").field("return").end_row();
  for (std::size_t t = 0; t < cfg.T; ++t) {
    w.field(t + 1).field(sim.state[t]).field(sim.obs[t]).end_row();
  }
  const auto dir = output_dir(cfg);
  write_file(dir / "sim.csv", s.str());
  write_manifest(ctx, dir);
  ctx.out << "wrote " << cfg.T << " rows to " << (dir / "sim.csv").string() << "\n";
  return 0;
}

int cmd_estimate_d(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto y = load_series(ctx);
  if (y.size() < 64) {
    throw ConfigError("estimate-d needs at least 64 observations, got " + std::to_string(y.size()));
  }
  const auto series = cfg.gph_input == "raw" ? y : volatility_proxy(y);
  const auto est = timed(ctx, "gph", [&] { return gph(series, cfg.bandwidth_exponent); });
  json r;
  r["d_hat"] = est.d_hat;
  r["std_error"] = est.std_error;
  r["bandwidth"] = est.bandwidth;
  r["n"] = est.n;
  r["input"] = cfg.gph_input;
  const auto dir = output_dir(cfg);
  write_file(dir / "estimate.json", r.dump(2) + "\n");
  write_manifest(ctx, dir, r);
  ctx.out << "d_hat " << format_double(est.d_hat) << "\n"
          << "std_error " << format_double(est.std_error) << "\n"
          << "bandwidth " << est.bandwidth << "\n";
  return 0;
}

int cmd_filter(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto y = load_series(ctx);
  const auto opts = cfg.filter_options();
  const auto result = timed(ctx, "filter", [&] { return run(cfg.model, y, opts); });
  const auto dir = output_dir(cfg);
  write_file(dir / "filter.csv", filter_csv(result.snapshots, cfg.model.dim()));
  write_file(dir / "params.csv", params_csv(result.snapshots, cfg.model));
  double loglik = 0.0;
  for (const auto& sn : result.snapshots) loglik += sn.log_likelihood_increment;
  json r;
  r["log_likelihood"] = loglik;
  r["observations"] = y.size();
  write_manifest(ctx, dir, r);
  ctx.out << "filtered " << y.size() << " observations, log-likelihood "
          << format_double(loglik) << "\n";
  return 0;
}

int cmd_forecast(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto y = load_series(ctx);
  RollingForecastOptions ro;
  ro.horizon = cfg.horizon;
  ro.draws = cfg.draws;
  ro.level = cfg.level;
  if (cfg.split != 0) {
    ro.split = cfg.split;
  } else {
    if (y.size() <= cfg.horizon) throw ConfigError("data too short for the forecast horizon");
    ro.split = y.size() - cfg.horizon;
  }
  const auto opts = cfg.filter_options();
  const auto fc = timed(ctx, "forecast", [&] { return rolling_forecast(cfg.model, y, ro, opts); });

  std::ostringstream s;
  CsvWriter w(s);
  w.field("h").field("point").field("lo").field("hi").field("realized").end_row();
  std::size_t covered = 0;
  for (const auto& f : fc.forecasts) {
    w.field(f.horizon).field(f.point).field(f.lo).field(f.hi);
    if (f.realized) {
      w.field(*f.realized);
      if (*f.realized >= f.lo && *f.realized <= f.hi) ++covered;
    } else {
      w.empty();
    }
    w.end_row();
  }
  const auto dir = output_dir(cfg);
  write_file(dir / "forecast.csv", s.str());
  write_file(dir / "filter.csv", filter_csv(fc.snapshots, cfg.model.dim()));
  json r;
  r["split"] = ro.split;
  r["covered"] = covered;
  r["forecasts"] = fc.forecasts.size();
  write_manifest(ctx, dir, r);
  ctx.out << "forecast " << fc.forecasts.size() << " steps after t=" << ro.split << ", "
          << covered << " realized values inside the " << cfg.level << " interval\n";
  return 0;
}

int cmd_diagnose(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto y = load_series(ctx);
  const auto opts = cfg.filter_options();
  const auto result = timed(ctx, "filter", [&] { return run(cfg.model, y, opts); });
  const auto diag = residual_diagnostics(result.snapshots, y, cfg.acf_lags);

  std::ostringstream rs;
  CsvWriter rw(rs);
  rw.field("t").field("residual").end_row();
  for (std::size_t t = 0; t < diag.residuals.size(); ++t) {
    rw.field(t + 1).field(diag.residuals[t]).end_row();
  }
  std::ostringstream as;
  CsvWriter aw(as);
  aw.field("lag").field("acf").end_row();
  for (std::size_t k = 0; k < diag.acf.size(); ++k) aw.field(k).field(diag.acf[k]).end_row();

  const auto dir = output_dir(cfg);
  write_file(dir / "resid.csv", rs.str());
  write_file(dir / "acf.csv", as.str());
  write_file(dir / "filter.csv", filter_csv(result.snapshots, cfg.model.dim()));
  json r;
  r["ljung_box"] = diag.ljung_box;
  r["lags"] = cfg.acf_lags;
  write_manifest(ctx, dir, r);
  ctx.out << "ljung_box " << format_double(diag.ljung_box) << " (" << cfg.acf_lags << " lags)\n";
  return 0;
}

const std::map<std::string, std::function<int(Context&)>>& commands() {
  static const std::map<std::string, std::function<int(Context&)>> table{
      {"simulate", cmd_simulate},
      {"estimate-d", cmd_estimate_d},
      {"filter", cmd_filter},
      {"forecast", cmd_forecast},
      {"diagnose", cmd_diagnose}};
  return table;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential Monte Carlo for fractional state-space models", "longmem-smc"};
  std::string command;
  std::string config_path;
  std::string seed, n, delta, threads, out_dir;
  std::vector<std::string> overrides;
  bool record_timings = false;

  std::vector<std::string> names;
  for (const auto& [k, v] : commands()) names.push_back(k);
  app.add_option("command", command, "simulate | estimate-d | filter | forecast | diagnose")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--seed", seed, "random seed (mandatory here or in the config)");
  app.add_option("--N", n, "number of particles");
  app.add_option("--delta", delta, "Liu-West discount factor");
  app.add_option("--threads", threads, "worker threads, 0 = all cores");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--set", overrides, "extra key=value override, repeatable");
  app.add_flag("--record-timings", record_timings, "add wall-clock timings to run.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!seed.empty()) cfg.set("seed", seed);
    if (!n.empty()) cfg.set("N", n);
    if (!delta.empty()) cfg.set("delta", delta);
    if (!threads.empty()) cfg.set("threads", threads);
    if (!out_dir.empty()) cfg.set("out", out_dir);
    cfg.finalize();
    cfg.require_seed();

    Context ctx{command, std::move(cfg), record_timings, out, err, {}};
    return commands().at(command)(ctx);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace longmem::cli
