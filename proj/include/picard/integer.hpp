// Arbitrary-precision integers and the error types shared by every module.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace picard {

using Integer = boost::multiprecision::cpp_int;
using IntVector = std::vector<Integer>;

/// Raised when caller-supplied data violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an internal consistency check fails. Always a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline Integer abs_value(const Integer& a) { return a < 0 ? Integer(-a) : a; }

inline bool is_unit(const Integer& a) { return a == 1 || a == -1; }

/// Quotient rounded toward negative infinity.
inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Remainder in [0, |m|).
inline Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += abs_value(m);
  return r;
}

inline Integer gcd(const Integer& a, const Integer& b) {
  return boost::multiprecision::gcd(abs_value(a), abs_value(b));
}

inline std::string to_string(const Integer& a) { return a.str(); }

inline IntVector zero_vector(std::size_t n) { return IntVector(n, Integer(0)); }

inline bool is_zero_vector(const IntVector& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline IntVector add(const IntVector& a, const IntVector& b) {
  if (a.size() != b.size()) throw InvalidInput("vector length mismatch");
  IntVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline IntVector sub(const IntVector& a, const IntVector& b) {
  if (a.size() != b.size()) throw InvalidInput("vector length mismatch");
  IntVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline IntVector scale(const Integer& k, const IntVector& a) {
  IntVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = k * a[i];
  return r;
}

inline IntVector concat(const IntVector& a, const IntVector& b) {
  IntVector r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

}  // namespace picard
