#pragma once

// Field serialization.
//
// CSV: one header row, then one row per node in row-major order (row 0 = y_min):
//   complex  x,y,re,im
//   real     x,y,value
// Numbers use the shortest decimal form that reads back to the same double; the
// not-computed sentinel is the token NaN. Metadata goes to <path>.meta.json.
//
// Heatmap: binary PPM (P6). Header "P6", comment lines "# ...", "nx ny", "255",
// then nx*ny RGB triplets, first row = y_max.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "koopman_sp/colormap_data.hpp"
#include "koopman_sp/field.hpp"
#include "koopman_sp/spectral.hpp"

namespace koopman_sp {

namespace detail {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s, std::size_t line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw IoError("malformed number '" + std::string(s) + "' on line " + std::to_string(line));
  }
  return v;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(',', start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

template <class T>
constexpr bool is_complex_field() {
  return std::is_same_v<T, std::complex<double>>;
}

inline nlohmann::ordered_json grid_json(const GridSpec& g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min},
          {"y_max", g.y_max}, {"nx", g.nx},       {"ny", g.ny}};
}

inline nlohmann::ordered_json meta_json(const FieldMeta& m) {
  return {{"epsilon", m.epsilon},
          {"eigenvalue", {m.eigenvalue.real(), m.eigenvalue.imag()}},
          {"method", m.method},
          {"observable", m.observable},
          {"transform", m.transform}};
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p += ".meta.json";
  return p;
}

/// Writes the CSV and its metadata sidecar. `config` is stored verbatim.
template <class T>
void write_csv(const Field<T>& field, const std::filesystem::path& path,
               const nlohmann::ordered_json& config = nlohmann::ordered_json::object()) {
  static_assert(std::is_same_v<T, double> || detail::is_complex_field<T>(), "CSV holds real or complex fields");
  field.grid.validate();
  if (field.values.size() != field.grid.size()) throw DomainError("field size does not match its grid");
  {
    std::ofstream out = detail::open_out(path);
    std::string buf;
    buf.reserve(64 * field.values.size() + 16);
    buf += detail::is_complex_field<T>() ? "x,y,re,im\n" : "x,y,value\n";
    for (std::size_t k = 0; k < field.values.size(); ++k) {
      const State s = field.grid.node(k);
      buf += detail::format_double(s.x);
      buf += ',';
      buf += detail::format_double(s.y);
      buf += ',';
      if constexpr (detail::is_complex_field<T>()) {
        const bool sent = field.is_sentinel(k);
        buf += sent ? "NaN" : detail::format_double(field.values[k].real());
        buf += ',';
        buf += sent ? "NaN" : detail::format_double(field.values[k].imag());
      } else {
        buf += detail::format_double(field.values[k]);
      }
      buf += '\n';
    }
    out << buf;
    detail::finish(out, path);
  }
  nlohmann::ordered_json side;
  side["kind"] = detail::is_complex_field<T>() ? "complex" : "real";
  side["grid"] = detail::grid_json(field.grid);
  side["meta"] = detail::meta_json(field.meta);
  side["sentinels"] = field.sentinel_count();
  side["config"] = config;
  const auto sp = sidecar_path(path);
  std::ofstream out = detail::open_out(sp);
  out << side.dump(2) << '\n';
  detail::finish(out, sp);
}

/// Reads a CSV written by write_csv. The grid is recovered from the node
/// coordinates; metadata comes from the sidecar when it exists.
template <class T>
Field<T> read_csv(const std::filesystem::path& path) {
  static_assert(std::is_same_v<T, double> || detail::is_complex_field<T>(), "CSV holds real or complex fields");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expect = detail::is_complex_field<T>() ? "x,y,re,im" : "x,y,value";
  if (line != expect) throw IoError(path.string() + ": header '" + line + "', expected '" + expect + "'");
  const std::size_t cols = detail::is_complex_field<T>() ? 4 : 3;

  std::vector<double> xs, ys;
  std::vector<T> vals;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto parts = detail::split_commas(line);
    if (parts.size() != cols) {
      throw IoError(path.string() + ": line " + std::to_string(lineno) + " has " + std::to_string(parts.size()) +
                    " columns, expected " + std::to_string(cols));
    }
    xs.push_back(detail::parse_double(parts[0], lineno));
    ys.push_back(detail::parse_double(parts[1], lineno));
    if constexpr (detail::is_complex_field<T>()) {
      const double re = detail::parse_double(parts[2], lineno);
      const double im = detail::parse_double(parts[3], lineno);
      vals.push_back(std::isnan(re) || std::isnan(im) ? Sentinel<T>::value() : T(re, im));
    } else {
      vals.push_back(detail::parse_double(parts[2], lineno));
    }
  }
  if (vals.empty()) throw IoError(path.string() + ": no data rows");

  GridSpec g;
  std::size_t nx = 1;
  while (nx < ys.size() && ys[nx] == ys[0]) ++nx;
  if (vals.size() % nx != 0) throw IoError(path.string() + ": row count is not a multiple of the row length");
  g.nx = nx;
  g.ny = vals.size() / nx;
  g.x_min = xs.front();
  g.x_max = xs[nx - 1];
  g.y_min = ys.front();
  g.y_max = ys.back();
  try {
    g.validate();
  } catch (const DomainError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  for (std::size_t k = 0; k < vals.size(); ++k) {
    const State s = g.node(k);
    if (s.x != xs[k] || s.y != ys[k]) {
      throw IoError(path.string() + ": line " + std::to_string(k + 2) + " is off the grid");
    }
  }

  Field<T> f(g);
  f.values = std::move(vals);
  const auto sp = sidecar_path(path);
  if (std::filesystem::exists(sp)) {
    std::ifstream sin(sp);
    nlohmann::json side;
    try {
      side = nlohmann::json::parse(sin);
      const auto& m = side.at("meta");
      f.meta.epsilon = m.at("epsilon").get<double>();
      f.meta.eigenvalue = {m.at("eigenvalue").at(0).get<double>(), m.at("eigenvalue").at(1).get<double>()};
      f.meta.method = m.at("method").get<std::string>();
      f.meta.observable = m.at("observable").get<std::string>();
      f.meta.transform = m.at("transform").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw IoError(sp.string() + ": " + e.what());
    }
  }
  return f;
}

/// Splits an amplitude field into ln|phi| and its sign, both real fields.
inline std::pair<ScalarField, ScalarField> split_log_real(const LogRealField& f) {
  FieldMeta lm = f.meta, sm = f.meta;
  lm.transform = "log_abs";
  sm.transform = "sign";
  ScalarField l(f.grid, lm), s(f.grid, sm);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (f.is_sentinel(k)) continue;
    l.values[k] = f.values[k].log_abs;
    s.values[k] = f.values[k].sign;
  }
  return {std::move(l), std::move(s)};
}

// ---------------------------------------------------------------------------
// Heatmaps

enum class Colormap { Twilight, Viridis };

inline const char* to_string(Colormap c) { return c == Colormap::Twilight ? "twilight" : "viridis"; }

struct Clip {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr colormap_data::Rgb kSentinelColor{128, 128, 128};

/// Colormap index of a transformed value: angles wrap with 0 at the middle entry,
/// other transforms are clipped linearly to [lo, hi].
inline int colormap_index(double v, Transform t, Clip clip) {
  if (t == Transform::Angle) {
    const double u = v / (2.0 * std::numbers::pi) + 0.5;
    long idx = static_cast<long>(std::floor(u * 256.0));
    idx %= 256;
    if (idx < 0) idx += 256;
    return static_cast<int>(idx);
  }
  const double span = clip.hi - clip.lo;
  const double u = span > 0.0 ? (std::clamp(v, clip.lo, clip.hi) - clip.lo) / span : 0.5;
  return std::min(255, static_cast<int>(std::floor(u * 256.0)));
}

/// Renders one pixel per node. Without `clip`, non-angle transforms use the
/// finite range of the data. `comments` become PPM comment lines.
template <class T>
void write_heatmap(const Field<T>& field, const std::filesystem::path& path, Transform t, Colormap cmap,
                   std::optional<Clip> clip = std::nullopt, const std::vector<std::string>& comments = {}) {
  field.grid.validate();
  if (field.values.empty()) throw DomainError("heatmap of an empty field");
  const std::vector<double> v = transformed_values(field, t);
  Clip c{0.0, 0.0};
  if (clip) {
    c = *clip;
  } else if (t != Transform::Angle) {
    bool any = false;
    for (double x : v) {
      if (!std::isfinite(x)) continue;
      if (!any) c = {x, x};
      c.lo = std::min(c.lo, x);
      c.hi = std::max(c.hi, x);
      any = true;
    }
  }
  const auto& lut = cmap == Colormap::Twilight ? colormap_data::kTwilight : colormap_data::kViridis;

  std::ostringstream head;
  head << "P6\n";
  for (const std::string& line : comments) {
    std::string clean = line;
    std::replace(clean.begin(), clean.end(), '\n', ' ');
    head << "# " << clean << '\n';
  }
  head << "# transform " << to_string(t) << " colormap " << to_string(cmap);
  if (t != Transform::Angle) head << " clip " << detail::format_double(c.lo) << ' ' << detail::format_double(c.hi);
  head << '\n' << field.grid.nx << ' ' << field.grid.ny << "\n255\n";

  std::string bytes = head.str();
  bytes.reserve(bytes.size() + 3 * field.grid.size());
  for (std::size_t jj = 0; jj < field.grid.ny; ++jj) {
    const std::size_t j = field.grid.ny - 1 - jj;
    for (std::size_t i = 0; i < field.grid.nx; ++i) {
      const double x = v[field.grid.index(i, j)];
      const colormap_data::Rgb px = std::isfinite(x) ? lut[static_cast<std::size_t>(colormap_index(x, t, c))]
                                                     : kSentinelColor;
      bytes.append(reinterpret_cast<const char*>(px.data()), 3);
    }
  }
  std::ofstream out = detail::open_out(path);
  out << bytes;
  detail::finish(out, path);
}

}  // namespace koopman_sp
