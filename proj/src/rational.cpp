#include "tdscw/rational.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tdscw {

namespace detail {

std::string int128_to_string(Rational::Int v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace detail

Rational Rational::from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    long long n = std::stoll(s.substr(0, slash));
    long long d = std::stoll(s.substr(slash + 1));
    return Rational(static_cast<Int>(n), static_cast<Int>(d));
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    return Rational(static_cast<Int>(std::stoll(s)), 1);
  }
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  int frac_len = static_cast<int>(s.size() - dot - 1);
  Int den = 1;
  for (int i = 0; i < frac_len; ++i) den *= 10;
  return Rational(static_cast<Int>(std::stoll(digits)), den);
}

std::string Rational::to_fraction_string() const {
  if (den_ == 1) return detail::int128_to_string(num_);
  return detail::int128_to_string(num_) + "/" + detail::int128_to_string(den_);
}

std::string Rational::to_decimal_string() const {
  // Terminating decimal iff den = 2^a * 5^b.
  Int d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d == 1) {
    int shift = std::max(twos, fives);
    Int scale = 1;
    bool overflow = false;
    for (int i = 0; i < shift && !overflow; ++i) {
      overflow = __builtin_mul_overflow(scale, static_cast<Int>(10), &scale);
    }
    Int scaled;
    if (!overflow) overflow = __builtin_mul_overflow(num_, scale / den_, &scaled);
    if (!overflow) {
      std::string digits = detail::int128_to_string(scaled < 0 ? -scaled : scaled);
      while (static_cast<int>(digits.size()) <= shift) digits.insert(digits.begin(), '0');
      std::string out = digits.substr(0, digits.size() - shift);
      if (shift > 0) out += "." + digits.substr(digits.size() - shift);
      return (num_ < 0 ? "-" : "") + out;
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << to_double();
  return os.str();
}

Rational::Int binomial128(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  Rational::Int result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n-k+i) is divisible by i at every step
    Rational::Int next;
    if (__builtin_mul_overflow(result, static_cast<Rational::Int>(n - k + i), &next)) {
      throw std::overflow_error("binomial128 overflow");
    }
    result = next / i;
  }
  return result;
}

}  // namespace tdscw
