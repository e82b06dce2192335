#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <sstream>
#include <stdexcept>
#include <string>

namespace qk {

using Rational = boost::multiprecision::cpp_rational;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

enum class Mode { Exact, Approx };

// Errors carry a stable kind tag so callers/tests can match on them.
enum class ErrorKind {
  ShapeMismatch,
  NotPositiveDefinite,
  IdentityViolated,
  AdjointnessViolated,
  NotPrimitive,
  MissingBidegree,
  DecompositionGap,
  NotSelfAdjoint,
  DegeneratePairing,
  VanishingViolated,
  HermitianIdentityViolated,
  RelationViolated,
  InvalidQ,
  ConfigError,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::IdentityViolated: return "IdentityViolated";
    case ErrorKind::AdjointnessViolated: return "AdjointnessViolated";
    case ErrorKind::NotPrimitive: return "NotPrimitive";
    case ErrorKind::MissingBidegree: return "MissingBidegree";
    case ErrorKind::DecompositionGap: return "DecompositionGap";
    case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorKind::DegeneratePairing: return "DegeneratePairing";
    case ErrorKind::VanishingViolated: return "VanishingViolated";
    case ErrorKind::HermitianIdentityViolated: return "HermitianIdentityViolated";
    case ErrorKind::RelationViolated: return "RelationViolated";
    case ErrorKind::InvalidQ: return "InvalidQ";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

// Field traits for the two scalar modes.
template <class F>
struct FieldOps;

template <>
struct FieldOps<Rational> {
  static constexpr Mode mode = Mode::Exact;
  static Rational from_rational(const Rational& r) { return r; }
  static bool is_zero(const Rational& x) { return x == 0; }
  static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
  static std::string str(const Rational& x) { return x.str(); }
};

template <>
struct FieldOps<BigFloat> {
  static constexpr Mode mode = Mode::Approx;
  static BigFloat from_rational(const Rational& r) {
    return BigFloat(boost::multiprecision::numerator(r)) /
           BigFloat(boost::multiprecision::denominator(r));
  }
  static bool is_zero(const BigFloat& x) { return x == 0; }
  static BigFloat abs(const BigFloat& x) { return x < 0 ? BigFloat(-x) : x; }
  static std::string str(const BigFloat& x) {
    std::ostringstream os;
    os.precision(40);
    os << x;
    return os.str();
  }
};

// Complex scalar over the field F; all adjoints use conjugate-transpose.
template <class F>
struct Cx {
  F re{};
  F im{};

  Cx() = default;
  Cx(F r) : re(std::move(r)) {}
  Cx(F r, F i) : re(std::move(r)), im(std::move(i)) {}

  static Cx zero() { return Cx(); }
  static Cx one() { return Cx(F(1)); }
  static Cx i() { return Cx(F(0), F(1)); }
  static Cx from_rational(const Rational& r) {
    return Cx(FieldOps<F>::from_rational(r));
  }

  bool is_zero() const {
    return FieldOps<F>::is_zero(re) && FieldOps<F>::is_zero(im);
  }
  Cx conj() const { return Cx(re, -im); }

  Cx operator-() const { return Cx(-re, -im); }
  Cx operator+(const Cx& o) const { return Cx(re + o.re, im + o.im); }
  Cx operator-(const Cx& o) const { return Cx(re - o.re, im - o.im); }
  Cx operator*(const Cx& o) const {
    return Cx(re * o.re - im * o.im, re * o.im + im * o.re);
  }
  Cx operator/(const Cx& o) const {
    F d = o.re * o.re + o.im * o.im;
    if (FieldOps<F>::is_zero(d)) throw Error(ErrorKind::Internal, "division by zero");
    return Cx((re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d);
  }
  Cx& operator+=(const Cx& o) { re += o.re; im += o.im; return *this; }
  Cx& operator-=(const Cx& o) { re -= o.re; im -= o.im; return *this; }
  Cx& operator*=(const Cx& o) { *this = *this * o; return *this; }
  bool operator==(const Cx& o) const { return re == o.re && im == o.im; }
  bool operator!=(const Cx& o) const { return !(*this == o); }

  // max(|re|,|im|): cheap magnitude for residual reporting, avoids sqrt.
  F mag() const {
    F a = FieldOps<F>::abs(re), b = FieldOps<F>::abs(im);
    return a < b ? b : a;
  }
  std::string str() const {
    if (FieldOps<F>::is_zero(im)) return FieldOps<F>::str(re);
    return FieldOps<F>::str(re) + (im < 0 ? "-" : "+") +
           FieldOps<F>::str(FieldOps<F>::abs(im)) + "i";
  }
};

template <class F>
Cx<F> operator*(const F& a, const Cx<F>& z) { return Cx<F>(a) * z; }

// Parse "p/s" or "p" into an exact rational.
inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      return Rational(boost::multiprecision::cpp_int(s));
    }
    boost::multiprecision::cpp_int num(s.substr(0, slash));
    boost::multiprecision::cpp_int den(s.substr(slash + 1));
    if (den == 0) throw Error(ErrorKind::ConfigError, "zero denominator: " + s);
    return Rational(num, den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigError, "not a rational: '" + s + "'");
  }
}

}  // namespace qk
