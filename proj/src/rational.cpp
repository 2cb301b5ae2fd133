#include "rational.hpp"

#include "error.hpp"

namespace mtlab {

Rational::Rational(const Integer& numerator, const Integer& denominator) {
  require(denominator != 0, ErrorCode::kDomain, "rational with zero denominator");
  value_ = Value(numerator, denominator);
}

Rational operator/(const Rational& a, const Rational& b) {
  require(b.value_ != 0, ErrorCode::kDomain, "rational division by zero");
  return Rational(a.value_ / b.value_);
}

std::string Rational::str() const {
  const Integer den = denominator();
  if (den == 1) return numerator().str();
  return numerator().str() + "/" + den.str();
}

Rational::Integer binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  Rational::Integer result = 1;
  for (int j = 1; j <= k; ++j) {
    result *= n - k + j;
    result /= j;
  }
  return result;
}

}  // namespace mtlab
