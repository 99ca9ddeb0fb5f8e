#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "koopman_sp/types.hpp"

namespace koopman_sp {

/// Node grid over [x_min, x_max] x [y_min, y_max]. A direction with a single
/// node must have min == max.
struct GridSpec {
  double x_min = -4.0, x_max = 4.0;
  double y_min = -2.0, y_max = 2.0;
  std::size_t nx = 201, ny = 101;

  void validate() const {
    auto check = [](double lo, double hi, std::size_t n, const char* axis) {
      if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError(std::string("grid bounds on ") + axis + " must be finite");
      if (n == 0) throw DomainError(std::string("grid needs at least one node along ") + axis);
      if (n == 1 && lo != hi) throw DomainError(std::string("single-node axis ") + axis + " needs min == max");
      if (n >= 2 && !(lo < hi)) throw DomainError(std::string("grid axis ") + axis + " needs min < max");
    };
    check(x_min, x_max, nx, "x");
    check(y_min, y_max, ny, "y");
  }

  double hx() const { return nx > 1 ? (x_max - x_min) / static_cast<double>(nx - 1) : 0.0; }
  double hy() const { return ny > 1 ? (y_max - y_min) / static_cast<double>(ny - 1) : 0.0; }
  double x(std::size_t i) const { return nx > 1 ? x_min + static_cast<double>(i) * hx() : x_min; }
  double y(std::size_t j) const { return ny > 1 ? y_min + static_cast<double>(j) * hy() : y_min; }
  std::size_t size() const { return nx * ny; }
  /// Row-major: rows run along x at fixed y, row 0 is y_min.
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  State node(std::size_t idx) const { return {x(idx % nx), y(idx / nx)}; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Real eigenfunction value kept in log space: value = sign * exp(log_abs).
/// A point on the limit cycle is log_abs = -inf, sign = 0.
struct LogReal {
  double log_abs = 0.0;
  int sign = 0;
  friend bool operator==(const LogReal&, const LogReal&) = default;
};

template <class T>
struct Sentinel;

template <>
struct Sentinel<double> {
  static double value() { return std::numeric_limits<double>::quiet_NaN(); }
  static bool is(double v) { return std::isnan(v); }
};

template <>
struct Sentinel<std::complex<double>> {
  static std::complex<double> value() {
    const double n = std::numeric_limits<double>::quiet_NaN();
    return {n, n};
  }
  static bool is(const std::complex<double>& v) { return std::isnan(v.real()) || std::isnan(v.imag()); }
};

template <>
struct Sentinel<LogReal> {
  static LogReal value() { return {std::numeric_limits<double>::quiet_NaN(), 0}; }
  static bool is(const LogReal& v) { return std::isnan(v.log_abs); }
};

struct FieldMeta {
  double epsilon = 0.0;
  std::complex<double> eigenvalue{0.0, 0.0};
  std::string method;      ///< how values were produced
  std::string observable;  ///< what the values are (phase, amplitude, d/dx angle, ...)
  std::string transform = "none";
};

template <class T>
struct Field {
  GridSpec grid;
  std::vector<T> values;
  FieldMeta meta;

  Field() = default;
  explicit Field(GridSpec g, FieldMeta m = {})
      : grid(g), values(g.size(), Sentinel<T>::value()), meta(std::move(m)) {}

  T& at(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
  const T& at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
  bool is_sentinel(std::size_t idx) const { return Sentinel<T>::is(values[idx]); }

  std::size_t sentinel_count() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < values.size(); ++k) n += is_sentinel(k) ? 1 : 0;
    return n;
  }
};

using ComplexField = Field<std::complex<double>>;
using ScalarField = Field<double>;
using LogRealField = Field<LogReal>;

}  // namespace koopman_sp
