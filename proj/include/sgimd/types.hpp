#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgimd {

inline constexpr std::size_t kJoints = 6;
inline constexpr std::size_t kKnots = 4;
inline constexpr std::size_t kParamDim = kJoints * kKnots + 1;

// Error types. Each operation throws the most specific one.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error { using Error::Error; };
struct InvalidParams : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct EmptyMemoryError : Error { using Error::Error; };
struct DuplicateIndexError : Error { using Error::Error; };
struct DegenerateGoalError : Error { using Error::Error; };
struct MissingAttemptsError : Error { using Error::Error; };
struct OutOfBoundsError : Error { using Error::Error; };
struct CalibrationError : Error { using Error::Error; };
struct SizeError : Error { using Error::Error; };
struct ResolutionError : Error { using Error::Error; };
struct NonFiniteObjectiveError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };

/// A point of the 2-D task space. Outcomes are reached points, goals are targets.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
};

using Outcome = Vec2;
using Goal = Vec2;

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double squared_distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}
inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Axis-aligned rectangle [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
  Vec2 lo{-1.0, -1.0};
  Vec2 hi{1.0, 1.0};

  friend constexpr bool operator==(const Box&, const Box&) = default;

  double lower(std::size_t dim) const { return dim == 0 ? lo.x : lo.y; }
  double upper(std::size_t dim) const { return dim == 0 ? hi.x : hi.y; }
  double width(std::size_t dim) const { return upper(dim) - lower(dim); }
  double diameter() const { return std::hypot(hi.x - lo.x, hi.y - lo.y); }
  bool contains(Vec2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  Vec2 clip(Vec2 p) const {
    return {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y)};
  }
};

inline double coord(Vec2 p, std::size_t dim) { return dim == 0 ? p.x : p.y; }

/// Default task space T = [-1, 1]^2.
inline constexpr Box kUnitTaskSpace{{-1.0, -1.0}, {1.0, 1.0}};

enum class StrategyTag { autonomous, imitation, demonstration };

std::string to_string(StrategyTag tag);
StrategyTag strategy_tag_from_string(const std::string& s);

}  // namespace sgimd
