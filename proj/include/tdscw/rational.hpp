#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace tdscw {

// Exact fraction on 128-bit integers. Large enough for lattice path counts on
// desk-scale grids (binomials up to ~C(120,60)); operations that would overflow
// throw instead of wrapping.
class Rational {
 public:
  using Int = __int128;

  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(Int num, Int den) : num_(num), den_(den) { normalize(); }

  // Accepts "3", "-3", "9/20", "0.45".
  static Rational from_string(const std::string& s);

  Int num() const { return num_; }
  Int den() const { return den_; }

  bool is_zero() const { return num_ == 0; }

  Rational operator+(const Rational& o) const {
    return Rational(checked_add(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator-(const Rational& o) const {
    return Rational(checked_sub(checked_mul(num_, o.den_), checked_mul(o.num_, den_)),
                    checked_mul(den_, o.den_));
  }
  Rational operator*(const Rational& o) const {
    Rational a(num_, o.den_);  // cross-reduce before multiplying
    Rational b(o.num_, den_);
    return Rational(checked_mul(a.num_, b.num_), checked_mul(a.den_, b.den_));
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
    return *this * Rational(o.den_, o.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return checked_mul(num_, o.den_) < checked_mul(o.num_, den_);
  }
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // "9/20" when the denominator is not 1, "3" otherwise.
  std::string to_fraction_string() const;
  // Decimal string, exact when terminating, else 17 significant digits.
  std::string to_decimal_string() const;

 private:
  void normalize() {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    Int g = gcd128(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  static Int gcd128(Int a, Int b) {
    while (b != 0) { Int t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }
  static Int checked_add(Int a, Int b) {
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("Rational overflow");
    return r;
  }
  static Int checked_sub(Int a, Int b) {
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("Rational overflow");
    return r;
  }
  static Int checked_mul(Int a, Int b) {
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("Rational overflow");
    return r;
  }

  Int num_, den_;  // den_ > 0, gcd(|num_|, den_) == 1
};

namespace detail {
std::string int128_to_string(Rational::Int v);
}

// C(n, k) in exact 128-bit arithmetic; throws on overflow.
Rational::Int binomial128(int n, int k);

}  // namespace tdscw
