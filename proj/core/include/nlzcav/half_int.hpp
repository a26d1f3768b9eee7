#pragma once

#include <compare>
#include <cstdlib>
#include <ostream>
#include <string>

namespace nlzcav {

/// Angular momentum quantum number stored as twice its value, so that
/// integer and half-integer values compare exactly.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  // NOLINTNEXTLINE(google-explicit-constructor): integers are valid angular momenta.
  constexpr HalfInt(int value) : twice_(2 * value) {}

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }
  /// numerator/2, e.g. HalfInt::half(3) == 3/2.
  static constexpr HalfInt half(int numerator) { return from_twice(numerator); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  /// Degeneracy 2j+1; only meaningful for magnitudes.
  constexpr int multiplicity() const { return twice_ + 1; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
  constexpr HalfInt& operator+=(HalfInt o) {
    twice_ += o.twice_;
    return *this;
  }
  constexpr HalfInt& operator-=(HalfInt o) {
    twice_ -= o.twice_;
    return *this;
  }

  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string str() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

 private:
  int twice_ = 0;
};

constexpr HalfInt abs(HalfInt h) { return HalfInt::from_twice(h.twice() < 0 ? -h.twice() : h.twice()); }

/// Exact integer difference a - b; caller guarantees a - b is integral.
constexpr int integer_difference(HalfInt a, HalfInt b) { return (a.twice() - b.twice()) / 2; }

inline std::ostream& operator<<(std::ostream& os, HalfInt h) { return os << h.str(); }

}  // namespace nlzcav
