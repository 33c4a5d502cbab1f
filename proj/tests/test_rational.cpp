#include "doctest.h"

#include <stdexcept>

#include "tdscw/rational.hpp"

using tdscw::Rational;
using tdscw::binomial128;

TEST_CASE("rational arithmetic normalizes") {
  Rational a(9, 20);
  CHECK(a.to_fraction_string() == "9/20");
  CHECK(a.to_decimal_string() == "0.45");
  Rational b(6, 10);
  CHECK(b == Rational(3, 5));
  CHECK((a + b).to_fraction_string() == "21/20");
  CHECK((a * b) == Rational(27, 100));
  CHECK((b - a) == Rational(3, 20));
  CHECK(a < b);
}

TEST_CASE("rational string round trip") {
  CHECK(Rational::from_string("9/20") == Rational(9, 20));
  CHECK(Rational::from_string("0.45") == Rational(9, 20));
  CHECK(Rational::from_string("3") == Rational(3));
  CHECK(Rational::from_string("-2.5") == Rational(-5, 2));
  CHECK(Rational::from_string("4").to_decimal_string() == "4");
}

TEST_CASE("binomials") {
  CHECK(binomial128(6, 3) == 20);
  CHECK(binomial128(5, 2) == 10);
  CHECK(binomial128(0, 0) == 1);
  CHECK(binomial128(10, 11) == 0);
  // C(106,53) needs ~101 bits; must not throw.
  CHECK_NOTHROW(binomial128(106, 53));
  CHECK_THROWS_AS(binomial128(300, 150), std::overflow_error);
}

TEST_CASE("division by zero throws") {
  CHECK_THROWS_AS(Rational(1, 2) / Rational(0), std::domain_error);
}
