#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace koopman_sp {

/// A point of the (x, y) state plane; x is the fast variable, y the slow one.
struct State {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const State&, const State&) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline State operator+(State a, State b) { return {a.x + b.x, a.y + b.y}; }
inline State operator-(State a, State b) { return {a.x - b.x, a.y - b.y}; }
inline State operator*(double k, State a) { return {k * a.x, k * a.y}; }
inline State operator-(State a) { return {-a.x, -a.y}; }

inline double norm(State a) { return std::hypot(a.x, a.y); }
inline double dot(State a, State b) { return a.x * b.x + a.y * b.y; }
/// z-component of the planar cross product a x b.
inline double cross(State a, State b) { return a.x * b.y - a.y * b.x; }

inline std::string to_string(State s) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << s.x << ", " << s.y << ")";
  return os.str();
}

/// Fast time t or slow time tau = epsilon * t.
enum class TimeScale { Fast, Slow };

inline const char* to_string(TimeScale s) { return s == TimeScale::Fast ? "fast" : "slow"; }

// ---------------------------------------------------------------------------
// Errors. Everything thrown by the library derives from koopman_sp::Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (branch domains, excluded points).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Value outside the range of an inverse, or a numerically refused regime.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Projection onto the attracting branches is undefined on the repelling branch.
class ProjectionUndefined : public DomainError {
 public:
  explicit ProjectionUndefined(State s)
      : DomainError("projection undefined on the repelling branch at " + to_string(s)), state(s) {}
  State state;
};

/// Vector field evaluated to a non-finite value.
class EvaluationError : public Error {
 public:
  explicit EvaluationError(State s)
      : Error("non-finite vector field evaluation at " + to_string(s)), state(s) {}
  State state;
};

/// Step size underflow or step budget exhausted.
class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, double t, State last)
      : Error(what + " at t=" + std::to_string(t) + ", last accepted state " + to_string(last)),
        time(t),
        last_state(last) {}
  double time;
  State last_state;
};

/// Numerical solution left the finite reals.
class DivergenceError : public Error {
 public:
  DivergenceError(double t, State last)
      : Error("solution diverged at t=" + std::to_string(t) + " after " + to_string(last)),
        time(t),
        last_state(last) {}
  double time;
  State last_state;
};

/// No section crossing before the time limit.
class NoEventError : public Error {
 public:
  using Error::Error;
};

class CycleNotFoundError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace koopman_sp
