// Command-line front end: estimation, simulation, covolatility, signature plots and Monte Carlo tables.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asve/asve.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kSessionSeconds = 32400.0;

struct Settings {
  int lambda = 4;
  std::optional<double> c;
  int j0 = 2;
  std::optional<int> j_interval;
  bool jump_filter = true;
  double jump_t = 2.81;
  bool two_sided = true;
  std::string time_scheme = "tick";
  std::uint64_t seed = 0;
};

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw asve::InvalidInput("config: " + key + " expects on/off, got '" + v + "'");
}

double parse_num(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!asve::io::parse_double(v, out)) throw asve::InvalidInput("config: " + key + " expects a number, got '" + v + "'");
  return out;
}

void apply_config(Settings& s, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "lambda" || k == "lambda_id") s.lambda = static_cast<int>(parse_num(k, v));
    else if (k == "c") s.c = v == "auto" ? std::nullopt : std::optional<double>(parse_num(k, v));
    else if (k == "j0") s.j0 = static_cast<int>(parse_num(k, v));
    else if (k == "j_interval" || k == "j_I") s.j_interval = v == "auto" ? std::nullopt : std::optional<int>(static_cast<int>(parse_num(k, v)));
    else if (k == "jump_filter") s.jump_filter = parse_bool(k, v);
    else if (k == "jump_t") s.jump_t = parse_num(k, v);
    else if (k == "two_sided_jumps") s.two_sided = parse_bool(k, v);
    else if (k == "time_scheme") s.time_scheme = v;
    else if (k == "seed") s.seed = static_cast<std::uint64_t>(parse_num(k, v));
    else throw asve::InvalidInput("config: unknown key '" + k + "'");
  }
}

asve::AsveConfig to_config(const Settings& s) {
  if (s.lambda < 1 || s.lambda > asve::kCatalogSize) throw asve::InvalidInput("lambda must be in 1..7");
  asve::AsveConfig cfg;
  cfg.lam = s.lambda;
  cfg.c = s.c;
  cfg.threshold.j0 = s.j0;
  cfg.threshold.j_interval = s.j_interval;
  cfg.jump_filter = s.jump_filter;
  cfg.jumps.threshold = s.jump_t;
  cfg.jumps.two_sided = s.two_sided;
  return cfg;
}

// Options shared by `estimate` and `covol`; values given on the command line override the config file.
struct EstimateFlags {
  std::string config_path;
  int lambda = 4;
  double c = 0.0;
  int j0 = 2;
  int j_interval = 0;
  bool no_jump_filter = false;
  double jump_t = 2.81;
  bool one_sided = false;
  std::uint64_t seed = 0;
  CLI::Option* o_lambda = nullptr;
  CLI::Option* o_c = nullptr;
  CLI::Option* o_j0 = nullptr;
  CLI::Option* o_ji = nullptr;
  CLI::Option* o_jt = nullptr;
  CLI::Option* o_seed = nullptr;

  void add(CLI::App* app) {
    app->add_option("--config", config_path, "key = value configuration file");
    o_lambda = app->add_option("--lambda", lambda, "pre-average function index 1..7");
    o_c = app->add_option("--c", c, "fixed tuning constant (default 0.3 * estimated SNR)");
    o_j0 = app->add_option("--j0", j0, "coarsest wavelet level");
    o_ji = app->add_option("--j-interval", j_interval, "level whose support sets the local std window");
    app->add_flag("--no-jump-filter", no_jump_filter, "skip jump detection");
    o_jt = app->add_option("--jump-t", jump_t, "scan test threshold");
    app->add_flag("--one-sided-jumps", one_sided, "one-sided scan test");
    o_seed = app->add_option("--seed", seed, "recorded in the metadata");
  }

  Settings resolve() const {
    Settings s;
    if (!config_path.empty()) apply_config(s, asve::io::read_config(config_path));
    if (o_lambda->count()) s.lambda = lambda;
    if (o_c->count()) s.c = c;
    if (o_j0->count()) s.j0 = j0;
    if (o_ji->count()) s.j_interval = j_interval;
    if (no_jump_filter) s.jump_filter = false;
    if (o_jt->count()) s.jump_t = jump_t;
    if (one_sided) s.two_sided = false;
    if (o_seed->count()) s.seed = seed;
    return s;
  }
};

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw asve::InvalidInput("cannot write " + p.string());
  out << body;
  if (!out) throw asve::InvalidInput("write failed for " + p.string());
}

std::string curve_csv(const asve::VolatilityCurve& c, std::string_view name = "sigma2") {
  std::ostringstream os;
  asve::io::write_curve(os, c, name);
  return os.str();
}

json jump_json(const std::optional<asve::JumpReport>& rep) {
  if (!rep) return nullptr;
  json events = json::array();
  for (const auto& e : rep->events)
    events.push_back({{"first_tick", e.first_tick}, {"last_tick", e.last_tick}, {"peak_statistic", e.peak_statistic}});
  return {{"threshold_t", rep->threshold_t},        {"two_sided", rep->two_sided},
          {"m1", rep->m1},                          {"half_width", rep->half_width},
          {"scan_flags", rep->scan_flags.size()},   {"increment_flags", rep->increment_flags},
          {"events", events},                       {"tau_sq_hat", rep->tau_sq_hat}};
}

json result_json(const asve::AsveResult& r, const Settings& s) {
  return {{"n", r.geometry.n},
          {"m", r.geometry.m},
          {"block_len", r.geometry.block_len},
          {"c", r.c},
          {"lambda", s.lambda},
          {"snr_hat", r.snr},
          {"snr_floored", r.snr_floored},
          {"tau_sq_hat", r.tau_sq},
          {"j0", r.threshold.j0},
          {"j_interval", r.threshold.j_interval},
          {"s_glob", r.threshold.s_glob},
          {"rejected", r.rejected},
          {"jump_filter", s.jump_filter},
          {"jumps", jump_json(r.jumps)},
          {"seed", s.seed},
          {"tool_version", kVersion}};
}

int run_estimate(const EstimateFlags& flags, const std::string& input, const std::string& out_dir,
                 const std::string& scheme_flag, bool svg) {
  auto s = flags.resolve();
  if (!scheme_flag.empty()) s.time_scheme = scheme_flag;
  if (s.time_scheme != "tick" && s.time_scheme != "real") throw asve::InvalidInput("time scheme must be tick or real");
  const auto ing = asve::io::ingest(input);
  if (ing.dropped) std::cerr << "warning: dropped " << ing.dropped << " non-trade rows\n";
  const double log_ref = ing.data.prices.front();
  const auto ticks = asve::to_tick_time(ing.data, log_ref);
  const auto res = asve::estimate(ticks, to_config(s));

  fs::create_directories(out_dir);
  json meta = result_json(res, s);
  meta["input"] = input;
  meta["dropped_rows"] = ing.dropped;
  meta["duplicate_rows"] = ing.duplicates;
  meta["log_ref"] = log_ref;
  meta["time_scheme"] = s.time_scheme;
  auto curve = res.curve;
  if (s.time_scheme == "real") {
    const auto nu = asve::estimate_intensity(ing.data, res.curve.size());
    curve = asve::tick_to_real(res.curve, nu);
    meta["intensity"] = {{"bandwidth", nu.bandwidth}, {"grid", nu.grid}, {"nu", nu.nu}, {"tick_coord", nu.tick_coord}};
  }
  write_file(fs::path(out_dir) / "curve.csv", curve_csv(curve));
  write_file(fs::path(out_dir) / "meta.json", meta.dump(2) + "\n");
  if (svg) {
    std::vector<double> t(ing.data.size());
    const double t0 = ing.data.times.front();
    const double span = ing.data.times.back() - t0;
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = span > 0 ? (ing.data.times[i] - t0) / span : 0.0;
    std::ostringstream os;
    asve::svg::plot(os, t, ing.data.prices, curve, fs::path(input).filename().string());
    write_file(fs::path(out_dir) / "plot.svg", os.str());
  }
  return 0;
}

struct SimFlags {
  std::size_t n = 15000;
  std::uint64_t seed = 1;
  double noise = 1.0 / 5000.0;
  std::string noise_kind = "gaussian";
  double jump_intensity = 0.0;
  double jump_std = 1e-3;
  bool rounding = false;
};

int run_simulate(const SimFlags& f, const std::string& out) {
  asve::DaySpec spec;
  spec.noise.std = f.noise;
  if (f.noise_kind == "uniform") spec.noise.kind = asve::NoiseKind::Uniform;
  else if (f.noise_kind != "gaussian") throw asve::InvalidInput("noise kind must be gaussian or uniform");
  spec.jumps = {f.jump_intensity, f.jump_std};
  spec.rounding = f.rounding;
  const auto day = asve::simulate_day(spec, f.n, f.seed);

  asve::RawTickData raw;
  raw.times.resize(f.n);
  raw.prices.resize(f.n);
  for (std::size_t i = 0; i < f.n; ++i) {
    raw.times[i] = kSessionSeconds * static_cast<double>(i + 1) / static_cast<double>(f.n);
    raw.prices[i] = spec.ref_price * std::exp(day.ticks.values[i]);
  }
  std::ostringstream ticks_os;
  asve::io::write_ticks(ticks_os, raw);
  write_file(out, ticks_os.str());

  asve::VolatilityCurve truth;
  for (std::size_t i = 0; i <= f.n; ++i) {
    truth.grid.push_back(static_cast<double>(i) / static_cast<double>(f.n));
    truth.values.push_back(day.sigma2[i]);
  }
  const fs::path base(out);
  const auto stem = base.parent_path() / base.stem();
  write_file(stem.string() + ".truth.csv", curve_csv(truth));
  json jumps = json::array();
  for (const auto& j : day.jump_times) jumps.push_back({{"time", j.time}, {"size", j.size}});
  json manifest = {{"n", f.n},
                   {"seed", f.seed},
                   {"model", "heston"},
                   {"noise_std", f.noise},
                   {"noise_kind", f.noise_kind},
                   {"jump_intensity", f.jump_intensity},
                   {"jump_std", f.jump_std},
                   {"rounding", f.rounding},
                   {"ref_price", spec.ref_price},
                   {"session_seconds", kSessionSeconds},
                   {"clipped_steps", day.clipped},
                   {"jumps", jumps},
                   {"tool_version", kVersion}};
  write_file(stem.string() + ".json", manifest.dump(2) + "\n");
  return 0;
}

int run_covol(const EstimateFlags& flags, const std::string& in1, const std::string& in2, const std::string& out_dir) {
  const auto s = flags.resolve();
  const auto a = asve::io::ingest(in1);
  const auto b = asve::io::ingest(in2);
  if (a.data.times != b.data.times) throw asve::InvalidInput("covol: inputs must share identical time columns");
  asve::PairedTicks pair{asve::to_tick_time(a.data, a.data.prices.front()),
                         asve::to_tick_time(b.data, b.data.prices.front())};
  const auto res = asve::covol_estimate(pair, to_config(s));
  fs::create_directories(out_dir);
  json meta = result_json(res, s);
  meta["inputs"] = {in1, in2};
  meta["log_ref"] = {a.data.prices.front(), b.data.prices.front()};
  write_file(fs::path(out_dir) / "curve.csv", curve_csv(res.curve, "kappa"));
  write_file(fs::path(out_dir) / "meta.json", meta.dump(2) + "\n");
  return 0;
}

int run_signature(const std::string& input, const std::vector<std::size_t>& steps) {
  const auto ing = asve::io::ingest(input);
  const auto ticks = asve::to_tick_time(ing.data, ing.data.prices.front());
  const auto rv = asve::io::signature(ticks, steps);
  std::cout << "step,rv\n";
  for (std::size_t i = 0; i < steps.size(); ++i) std::cout << steps[i] << ',' << asve::io::format_double(rv[i]) << '\n';
  return 0;
}

int run_calibrate() {
  std::cout << "index,c_star_tau_over_sigma,mse_const,ref_c,ref_mse\n";
  for (const auto& r : asve::table1())
    std::cout << r.index << ',' << asve::io::format_double(r.c_star_over_snr) << ','
              << asve::io::format_double(r.mse_const) << ',' << r.ref_c << ',' << r.ref_mse << '\n';
  return 0;
}

int run_mc(const std::string& study, std::size_t reps, std::uint64_t seed, std::size_t n) {
  using asve::io::format_double;
  if (study == "table1") return run_calibrate();
  if (reps < 100) throw asve::InvalidInput("mc: need at least 100 replications");
  if (study == "table2") {
    std::cout << "noise_std,mise_gaussian,se_gaussian,q95_gaussian,mise_uniform,se_uniform,q95_uniform,reference\n";
    for (const auto& r : asve::studies::table2(reps, seed, n))
      std::cout << format_double(r.noise_std) << ',' << format_double(r.gaussian.mean) << ','
                << format_double(r.gaussian.se) << ',' << format_double(r.gaussian.q95) << ','
                << format_double(r.uniform.mean) << ',' << format_double(r.uniform.se) << ','
                << format_double(r.uniform.q95) << ',' << format_double(r.reference) << '\n';
    return 0;
  }
  if (study == "table3") {
    std::cout << "column,detection,mise,se,reference\n";
    for (const auto& c : asve::studies::table3(reps, seed, n))
      std::cout << c.column << ',' << (c.detection ? "with" : "without") << ',' << format_double(c.mise.mean) << ','
                << format_double(c.mise.se) << ',' << format_double(c.reference) << '\n';
    return 0;
  }
  throw asve::InvalidInput("mc: study must be table1, table2 or table3");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive spot volatility estimation from noisy high-frequency prices"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* est = app.add_subcommand("estimate", "spot volatility curve from a tick CSV");
  EstimateFlags est_flags;
  std::string est_in, est_out = ".", est_scheme;
  bool est_svg = false;
  est->add_option("input", est_in, "tick CSV with header time,price")->required();
  est->add_option("-o,--out-dir", est_out, "output directory");
  est->add_option("--time-scheme", est_scheme, "tick or real")->check(CLI::IsMember({"tick", "real"}));
  est->add_flag("--svg", est_svg, "also write plot.svg");
  est_flags.add(est);

  auto* sim = app.add_subcommand("simulate", "Heston day with noise, jumps and rounding");
  SimFlags sf;
  std::string sim_out = "ticks.csv";
  sim->add_option("-o,--out", sim_out, "tick CSV; truth and manifest are written next to it");
  sim->add_option("--n", sf.n, "number of ticks")->check(CLI::Range(std::size_t{16}, std::size_t{1} << 28));
  sim->add_option("--seed", sf.seed, "master seed");
  sim->add_option("--noise", sf.noise, "noise standard deviation");
  sim->add_option("--noise-kind", sf.noise_kind, "gaussian or uniform");
  sim->add_option("--jump-intensity", sf.jump_intensity, "compound Poisson intensity per day");
  sim->add_option("--jump-std", sf.jump_std, "jump size standard deviation");
  sim->add_flag("--rounding", sf.rounding, "round prices to 0.01");

  auto* cov = app.add_subcommand("covol", "spot covolatility of two synchronous tick CSVs");
  EstimateFlags cov_flags;
  std::string cov_a, cov_b, cov_out = ".";
  cov->add_option("input1", cov_a)->required();
  cov->add_option("input2", cov_b)->required();
  cov->add_option("-o,--out-dir", cov_out, "output directory");
  cov_flags.add(cov);

  auto* sig = app.add_subcommand("signature", "realized variance per subsampling step");
  std::string sig_in;
  std::vector<std::size_t> steps{1, 2, 5, 10, 20, 50, 100};
  sig->add_option("input", sig_in)->required();
  sig->add_option("--steps", steps, "subsampling steps")->delimiter(',');

  auto* cal = app.add_subcommand("calibrate-table", "optimal tuning constants for the weight catalog");

  auto* mc = app.add_subcommand("mc", "Monte Carlo tables");
  std::string study = "table2";
  std::size_t reps = 1000, mc_n = 15000;
  std::uint64_t mc_seed = 20240101;
  mc->add_option("--study", study, "table1, table2 or table3");
  mc->add_option("--reps", reps, "replications");
  mc->add_option("--seed", mc_seed, "master seed");
  mc->add_option("--n", mc_n, "ticks per day");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*est) return run_estimate(est_flags, est_in, est_out, est_scheme, est_svg);
    if (*sim) return run_simulate(sf, sim_out);
    if (*cov) return run_covol(cov_flags, cov_a, cov_b, cov_out);
    if (*sig) return run_signature(sig_in, steps);
    if (*cal) return run_calibrate();
    if (*mc) return run_mc(study, reps, mc_seed, mc_n);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
