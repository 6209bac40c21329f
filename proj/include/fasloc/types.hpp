#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fasloc {

/// Cartesian position in meters.
using Position3 = Eigen::Vector3d;

/// Random stream used throughout. Every consumer receives its stream
/// explicitly so concurrent rollouts never share state.
using Rng = std::mt19937_64;

inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Thrown when an input violates a documented precondition (bad angle, port
/// index, shape, config value).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numeric routine is asked to evaluate outside its domain
/// (coincident points, singular geometry).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Derives an independent stream seed from a base seed and a tag sequence
/// (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace fasloc
