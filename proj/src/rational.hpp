#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace mtlab {

// Exact rational with arbitrary-precision numerator and denominator, always
// held in lowest terms with a positive denominator.
class Rational {
 public:
  using Integer = boost::multiprecision::cpp_int;

  Rational() = default;
  Rational(long long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(const Integer& numerator, const Integer& denominator);

  Integer numerator() const { return boost::multiprecision::numerator(value_); }
  Integer denominator() const { return boost::multiprecision::denominator(value_); }

  double to_double() const { return value_.convert_to<double>(); }
  // "p/q", or just "p" when the denominator is 1.
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.value_ + b.value_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.value_ - b.value_); }
  friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.value_ * b.value_); }
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-value_); }
  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.value_ != b.value_; }

 private:
  using Value = boost::multiprecision::cpp_rational;
  explicit Rational(Value v) : value_(std::move(v)) {}

  Value value_{0};
};

// Binomial coefficient C(n, k) as an exact integer; zero outside 0 <= k <= n.
Rational::Integer binomial(int n, int k);

}  // namespace mtlab
