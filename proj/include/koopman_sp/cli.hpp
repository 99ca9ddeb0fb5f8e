#pragma once

// Command-line frontend. `run` is the whole program; main() only forwards argv.
// Exit codes: 0 success, 1 computation failure or failed verification, 2 usage.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "koopman_sp/constants.hpp"
#include "koopman_sp/cycle.hpp"
#include "koopman_sp/field.hpp"
#include "koopman_sp/grid_io.hpp"
#include "koopman_sp/model.hpp"
#include "koopman_sp/singular.hpp"
#include "koopman_sp/spectral.hpp"
#include "koopman_sp/sweep.hpp"
#include "koopman_sp/verify.hpp"

namespace koopman_sp::cli {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Effective settings of one run. Defaults, then the config file, then flags.
struct RunConfig {
  double epsilon = 0.0;  ///< 0 means not given
  GridSpec grid;
  double rtol = 1e-9;
  double atol = 1e-11;
  std::string integrator = "dopri5";
  double fixed_step = 1e-3;
  std::string method = "time-of-flight";
  double capture = 0.0;
  long max_steps = 0;
  double max_time = 500.0;
  std::uint64_t seed = 20240601;
  std::string suite = "fast";
  // execution only; they never change output bytes and are not echoed
  std::string out_dir = "out";
  std::string output;
  unsigned workers = 0;

  IntegratorConfig integrator_config() const {
    IntegratorConfig c;
    c.rtol = rtol;
    c.atol = atol;
    c.method = integrator == "rk4" ? Method::RungeKutta4 : Method::DormandPrince45;
    c.fixed_step = fixed_step;
    return c;
  }

  SpectralOptions spectral_options() const {
    SpectralOptions o;
    o.capture = capture;
    o.max_steps = max_steps;
    o.max_time = max_time;
    o.method = method == "fourier-average" ? PhaseMethod::FourierAverage : PhaseMethod::TimeOfFlight;
    return o;
  }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string normalize_key(std::string k) {
  for (char& c : k) {
    if (c == '-') c = '_';
  }
  return k;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  if (std::is_unsigned_v<T> && v.find('-') != std::string::npos) throw UsageError("bad value for " + key + ": '" + v + "'");
  std::istringstream in(v);
  in >> out;
  if (in.fail() || !(in >> std::ws).eof()) throw UsageError("bad value for " + key + ": '" + v + "'");
  return out;
}

inline void expect_one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (v == a) return;
  }
  std::string msg = "bad value for " + key + ": '" + v + "' (expected";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw UsageError(msg + ")");
}

}  // namespace detail

inline void set_value(RunConfig& c, const std::string& raw_key, const std::string& value) {
  using detail::parse_number;
  const std::string key = detail::normalize_key(raw_key);
  if (key == "epsilon") c.epsilon = parse_number<double>(key, value);
  else if (key == "x_min") c.grid.x_min = parse_number<double>(key, value);
  else if (key == "x_max") c.grid.x_max = parse_number<double>(key, value);
  else if (key == "y_min") c.grid.y_min = parse_number<double>(key, value);
  else if (key == "y_max") c.grid.y_max = parse_number<double>(key, value);
  else if (key == "nx") c.grid.nx = parse_number<std::size_t>(key, value);
  else if (key == "ny") c.grid.ny = parse_number<std::size_t>(key, value);
  else if (key == "rtol") c.rtol = parse_number<double>(key, value);
  else if (key == "atol") c.atol = parse_number<double>(key, value);
  else if (key == "integrator") {
    detail::expect_one_of(key, value, {"dopri5", "rk4"});
    c.integrator = value;
  } else if (key == "fixed_step") c.fixed_step = parse_number<double>(key, value);
  else if (key == "method") {
    detail::expect_one_of(key, value, {"time-of-flight", "fourier-average"});
    c.method = value;
  } else if (key == "capture") c.capture = parse_number<double>(key, value);
  else if (key == "max_steps") c.max_steps = parse_number<long>(key, value);
  else if (key == "max_time") c.max_time = parse_number<double>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "suite") {
    detail::expect_one_of(key, value, {"fast", "full"});
    c.suite = value;
  } else if (key == "out_dir") c.out_dir = value;
  else if (key == "output") c.output = value;
  else if (key == "workers") c.workers = parse_number<unsigned>(key, value);
  else throw UsageError("unknown config key '" + raw_key + "'");
}

/// Flat `key = value` lines; '#' starts a comment.
inline void apply_config_text(RunConfig& c, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(n) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(n) + ": empty key");
    set_value(c, key, value);
  }
}

inline void apply_config_file(RunConfig& c, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(c, ss.str());
}

/// Everything that can change output bytes, in a fixed order.
inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["epsilon"] = c.epsilon;
  j["x_min"] = c.grid.x_min;
  j["x_max"] = c.grid.x_max;
  j["y_min"] = c.grid.y_min;
  j["y_max"] = c.grid.y_max;
  j["nx"] = c.grid.nx;
  j["ny"] = c.grid.ny;
  j["rtol"] = c.rtol;
  j["atol"] = c.atol;
  j["integrator"] = c.integrator;
  j["fixed_step"] = c.fixed_step;
  j["method"] = c.method;
  j["capture"] = c.capture;
  j["max_steps"] = c.max_steps;
  j["max_time"] = c.max_time;
  j["seed"] = c.seed;
  j["suite"] = c.suite;
  return j;
}

/// The echoed settings as a config file that reproduces the run.
inline std::string to_config_text(const RunConfig& c) {
  std::string out;
  const nlohmann::ordered_json j = to_json(c);
  for (const auto& [k, v] : j.items()) {
    out += k + " = ";
    if (v.is_string()) out += v.get<std::string>();
    else if (v.is_number_float()) out += koopman_sp::detail::format_double(v.get<double>());
    else out += v.dump();
    out += '\n';
  }
  return out;
}

namespace detail {

inline void require_epsilon(const RunConfig& c, const char* cmd) {
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) {
    throw UsageError(std::string(cmd) + " needs --epsilon > 0 (the singular limit is covered by singular-grid)");
  }
}

inline void require_grid(const RunConfig& c) {
  try {
    c.grid.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

struct Writer {
  std::filesystem::path dir;
  nlohmann::ordered_json config;
  std::vector<std::string> written;

  std::vector<std::string> comments() const { return {"config " + config.dump()}; }

  template <class T>
  void csv(const Field<T>& f, const std::string& name) {
    write_csv(f, dir / name, config);
    written.push_back((dir / name).string());
  }
  template <class T>
  void ppm(const Field<T>& f, const std::string& name, Transform t, Colormap cmap) {
    write_heatmap(f, dir / name, t, cmap, std::nullopt, comments());
    written.push_back((dir / name).string());
  }
};

inline Writer make_writer(const RunConfig& c) {
  std::filesystem::create_directories(c.out_dir);
  Writer w{c.out_dir, to_json(c), {}};
  std::ofstream cfg(w.dir / "run.cfg", std::ios::binary);
  if (!cfg) throw IoError("cannot write " + (w.dir / "run.cfg").string());
  cfg << to_config_text(c);
  w.written.push_back((w.dir / "run.cfg").string());
  return w;
}

inline void report(std::ostream& out, const Writer& w, std::size_t failures, std::size_t cells) {
  for (const auto& p : w.written) out << "wrote " << p << '\n';
  out << "sentinel cells: " << failures << " of " << cells << '\n';
}

inline int cmd_cycle(const RunConfig& c, std::ostream& out) {
  require_epsilon(c, "cycle");
  const VanDerPol sys(c.epsilon);
  nlohmann::ordered_json j = koopman_sp::to_json(cycle_report(sys, c.integrator_config()));
  j["config"] = to_json(c);
  if (c.output.empty()) {
    out << j.dump(2) << '\n';
  } else {
    std::ofstream f(c.output, std::ios::binary);
    if (!f) throw IoError("cannot write " + c.output);
    f << j.dump(2) << '\n';
    out << "wrote " << c.output << '\n';
  }
  return 0;
}

inline int cmd_phase_grid(const RunConfig& c, std::ostream& out) {
  require_epsilon(c, "phase-grid");
  require_grid(c);
  const VanDerPol sys(c.epsilon);
  const auto cfg = c.integrator_config();
  const CycleGeometry geo(sys, find_limit_cycle(sys, cfg));
  const auto r = phase_grid(geo, c.grid, cfg, c.spectral_options(), c.workers);
  Writer w = make_writer(c);
  w.csv(r.field, "phase.csv");
  w.ppm(r.field, "phase_angle.ppm", Transform::Angle, Colormap::Twilight);
  if (c.grid.nx >= 3) {
    const auto dx = finite_difference_field(r.field, Axis::X, Transform::Angle);
    w.csv(dx, "phase_dx.csv");
    w.ppm(dx, "phase_dx.ppm", Transform::LogAbs, Colormap::Viridis);
  }
  if (c.grid.ny >= 3) {
    const auto dy = finite_difference_field(r.field, Axis::Y, Transform::Angle);
    w.csv(dy, "phase_dy.csv");
    w.ppm(dy, "phase_dy.ppm", Transform::LogAbs, Colormap::Viridis);
  }
  report(out, w, r.failures, c.grid.size());
  return 0;
}

inline int cmd_isostable_grid(const RunConfig& c, std::ostream& out) {
  require_epsilon(c, "isostable-grid");
  require_grid(c);
  const VanDerPol sys(c.epsilon);
  const auto cfg = c.integrator_config();
  const CycleGeometry geo(sys, find_limit_cycle(sys, cfg));
  const auto r = amplitude_grid(geo, c.grid, cfg, c.spectral_options(), c.workers);
  Writer w = make_writer(c);
  const auto [log_abs, sign] = split_log_real(r.field);
  w.csv(log_abs, "isostable_logabs.csv");
  w.csv(sign, "isostable_sign.csv");
  w.ppm(r.field, "isostable_logabs.ppm", Transform::LogAbs, Colormap::Viridis);
  if (c.grid.nx >= 3) {
    const auto dx = finite_difference_field(r.field, Axis::X, Transform::LogAbs);
    w.csv(dx, "isostable_dx.csv");
    w.ppm(dx, "isostable_dx.ppm", Transform::LogAbs, Colormap::Viridis);
  }
  if (c.grid.ny >= 3) {
    const auto dy = finite_difference_field(r.field, Axis::Y, Transform::LogAbs);
    w.csv(dy, "isostable_dy.csv");
    w.ppm(dy, "isostable_dy.ppm", Transform::LogAbs, Colormap::Viridis);
  }
  report(out, w, r.failures, c.grid.size());
  return 0;
}

inline int cmd_singular_grid(const RunConfig& c, std::ostream& out) {
  require_grid(c);
  FieldMeta meta{0.0, {0.0, SingularConstants::omega0()}, "closed-form", "singular phase", "none"};
  const auto r = sweep<std::complex<double>>(
      c.grid, [](State s) -> std::optional<std::complex<double>> { return singular_eigenfunction(s); }, c.workers,
      std::move(meta));
  Writer w = make_writer(c);
  w.csv(r.field, "singular.csv");
  w.ppm(r.field, "singular_angle.ppm", Transform::Angle, Colormap::Twilight);
  w.ppm(r.field, "singular_re.ppm", Transform::Re, Colormap::Viridis);
  report(out, w, r.failures, c.grid.size());
  return 0;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out) {
  verify::Options opt;
  opt.suite = c.suite == "full" ? verify::Suite::Full : verify::Suite::Fast;
  opt.workers = c.workers;
  opt.seed = c.seed;
  std::size_t pass = 0, fail = 0, skip = 0;
  for (const auto& o : verify::run_all(opt)) {
    out << verify::format_line(o) << std::endl;
    if (o.skipped) ++skip;
    else if (o.passed) ++pass;
    else ++fail;
  }
  out << pass << " passed, " << fail << " failed, " << skip << " skipped\n";
  return fail == 0 ? 0 : 1;
}

}  // namespace detail

/// Runs one command line. Output goes to `out`, diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Koopman spectral analysis of the van der Pol oscillator", "koopman_sp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  std::map<std::string, std::string> flags;
  std::string config_path;

  auto add = [&](CLI::App* sub, const std::string& key, const std::string& help) {
    std::string name = "--" + key;
    for (char& ch : name) {
      if (ch == '_') ch = '-';
    }
    sub->add_option(name, flags[key], help);
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    add(sub, "rtol", "relative tolerance");
    add(sub, "atol", "absolute tolerance");
    add(sub, "integrator", "dopri5 or rk4");
    add(sub, "fixed_step", "rk4 step, fast time");
  };
  auto grid = [&](CLI::App* sub) {
    for (const char* k : {"x_min", "x_max", "y_min", "y_max"}) add(sub, k, "grid bound");
    add(sub, "nx", "nodes along x");
    add(sub, "ny", "nodes along y");
    add(sub, "out_dir", "output directory");
    add(sub, "workers", "worker threads (default KOOPMAN_SP_WORKERS or all cores)");
  };
  auto spectral = [&](CLI::App* sub) {
    add(sub, "epsilon", "time-scale ratio, > 0");
    add(sub, "capture", "cycle capture distance, 0 = automatic");
    add(sub, "max_steps", "step budget per cell, 0 = 1e4/eps");
    add(sub, "max_time", "slow-time budget per cell");
  };

  auto* cycle = app.add_subcommand("cycle", "limit cycle period, frequency and Floquet exponent as JSON");
  common(cycle);
  add(cycle, "epsilon", "time-scale ratio, > 0");
  add(cycle, "output", "JSON file (default stdout)");

  auto* phase = app.add_subcommand("phase-grid", "phase eigenfunction on a grid");
  common(phase);
  grid(phase);
  spectral(phase);
  add(phase, "method", "time-of-flight or fourier-average");

  auto* iso = app.add_subcommand("isostable-grid", "amplitude eigenfunction on a grid");
  common(iso);
  grid(iso);
  spectral(iso);

  auto* sing = app.add_subcommand("singular-grid", "singular-limit phase eigenfunction on a grid");
  common(sing);
  grid(sing);

  auto* ver = app.add_subcommand("verify", "run the acceptance checks");
  common(ver);
  add(ver, "suite", "fast or full");
  add(ver, "seed", "seed for sample points");
  add(ver, "workers", "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  RunConfig c;
  try {
    if (!config_path.empty()) apply_config_file(c, config_path);
    for (const auto& [key, value] : flags) {
      const CLI::App* sub = app.get_subcommands().front();
      std::string name = "--" + key;
      for (char& ch : name) {
        if (ch == '_') ch = '-';
      }
      const CLI::Option* opt = sub->get_option_no_throw(name);
      if (opt != nullptr && opt->count() > 0) set_value(c, key, value);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (cycle->parsed()) return detail::cmd_cycle(c, out);
    if (phase->parsed()) return detail::cmd_phase_grid(c, out);
    if (iso->parsed()) return detail::cmd_isostable_grid(c, out);
    if (sing->parsed()) return detail::cmd_singular_grid(c, out);
    return detail::cmd_verify(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace koopman_sp::cli
