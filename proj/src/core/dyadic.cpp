#include "dyadic.hpp"

#include <cmath>

namespace topdown {

Dyadic::Dyadic(BigInt num, int exp) : num_(std::move(num)), exp_(exp) { normalize(); }

void Dyadic::normalize() {
  if (num_ == 0) {
    exp_ = 0;
    return;
  }
  if (exp_ < 0) {
    num_ <<= -exp_;
    exp_ = 0;
    return;
  }
  const BigInt mag = abs(num_);
  const auto tz = static_cast<int>(boost::multiprecision::lsb(mag));
  const int shift = tz < exp_ ? tz : exp_;
  if (shift > 0) {
    const bool neg = num_.sign() < 0;
    num_ = mag >> shift;
    if (neg) num_ = -num_;
    exp_ -= shift;
  }
}

double Dyadic::to_double() const { return static_cast<double>(to_long_double()); }

long double Dyadic::to_long_double() const {
  if (num_ == 0) return 0.0L;
  // Shift the numerator into long double range before scaling.
  const BigInt mag = abs(num_);
  const auto bits = static_cast<int>(boost::multiprecision::msb(mag)) + 1;
  const int drop = bits > 64 ? bits - 64 : 0;
  const BigInt top = mag >> drop;
  const auto mant = top.convert_to<long double>();
  const long double v = std::ldexp(mant, drop - exp_);
  return num_.sign() < 0 ? -v : v;
}

std::string Dyadic::to_string() const {
  if (num_ == 0) return "0/1";
  return num_.str() + "/" + denominator().str();
}

Dyadic& Dyadic::operator+=(const Dyadic& o) {
  if (o.exp_ > exp_) {
    num_ <<= (o.exp_ - exp_);
    exp_ = o.exp_;
    num_ += o.num_;
  } else {
    num_ += BigInt(o.num_) << (exp_ - o.exp_);
  }
  normalize();
  return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& o) { return *this += -o; }

Dyadic& Dyadic::operator*=(const Dyadic& o) {
  num_ *= o.num_;
  exp_ += o.exp_;
  normalize();
  return *this;
}

Dyadic Dyadic::scaled(int k) const { return Dyadic(num_, exp_ + k); }

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  const int e = a.exp_ > b.exp_ ? a.exp_ : b.exp_;
  const BigInt lhs = a.num_ << (e - a.exp_);
  const BigInt rhs = b.num_ << (e - b.exp_);
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace topdown
