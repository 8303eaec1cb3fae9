#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>

namespace topdown {

using BigInt = boost::multiprecision::cpp_int;

/// Exact dyadic rational num / 2^exp.
///
/// Every probability computed over {±1}^n under the uniform distribution is
/// of this form, so expectations, influences, biases and distances are kept
/// exact and only converted to floating point at output boundaries. Values
/// are normalized (odd numerator or zero with exp 0), so equality is
/// structural.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(BigInt num, int exp);  // NOLINT(google-explicit-constructor)
  static Dyadic from_int(std::int64_t v) { return Dyadic(BigInt(v), 0); }
  /// count / 2^free_count
  static Dyadic ratio(std::uint64_t count, int free_count) {
    return Dyadic(BigInt(count), free_count);
  }
  static Dyadic zero() { return {}; }
  static Dyadic one() { return from_int(1); }
  static Dyadic half() { return Dyadic(BigInt(1), 1); }

  const BigInt& numerator() const { return num_; }
  int exponent() const { return exp_; }
  BigInt denominator() const { return BigInt(1) << exp_; }

  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_.sign(); }

  double to_double() const;
  long double to_long_double() const;
  /// Reduced fraction "num/den"; zero prints as "0/1".
  std::string to_string() const;

  Dyadic operator-() const { return Dyadic(-num_, exp_); }
  Dyadic& operator+=(const Dyadic& o);
  Dyadic& operator-=(const Dyadic& o);
  Dyadic& operator*=(const Dyadic& o);
  /// Multiply by 2^-k (k may be negative).
  Dyadic scaled(int k) const;

  friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
  friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
  friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }
  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exp_ == b.exp_ && a.num_ == b.num_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

  friend Dyadic abs(const Dyadic& a) { return a.sign() < 0 ? -a : a; }
  friend const Dyadic& min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
  friend const Dyadic& max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

 private:
  void normalize();

  BigInt num_ = 0;
  int exp_ = 0;
};

}  // namespace topdown
