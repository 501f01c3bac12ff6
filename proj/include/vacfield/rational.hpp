#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <string>

namespace vacfield {

using Rational = boost::multiprecision::cpp_rational;

// Exact complex number with rational real and imaginary parts.  All symbolic
// bookkeeping in the algebra module runs on these; floating point enters only
// when a polynomial is evaluated at a concrete m.
struct RationalComplex {
  Rational re{0};
  Rational im{0};

  RationalComplex() = default;
  RationalComplex(Rational r) : re(std::move(r)) {}
  RationalComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  RationalComplex(int r) : re(r) {}

  bool is_zero() const { return re == 0 && im == 0; }

  RationalComplex operator-() const { return {-re, -im}; }

  RationalComplex& operator+=(const RationalComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }

  RationalComplex& operator*=(const RationalComplex& o) {
    Rational r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }

  friend RationalComplex operator+(RationalComplex a, const RationalComplex& b) { return a += b; }
  friend RationalComplex operator*(RationalComplex a, const RationalComplex& b) { return a *= b; }
  friend bool operator==(const RationalComplex&, const RationalComplex&) = default;

  // Lexicographic order; only used to canonicalize term lists.
  friend std::strong_ordering operator<=>(const RationalComplex& a, const RationalComplex& b) {
    if (a.re != b.re) return a.re < b.re ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.im != b.im) return a.im < b.im ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  double to_double_real() const { return static_cast<double>(re); }

  std::string str() const {
    if (im == 0) return re.str();
    return "(" + re.str() + (im < 0 ? "" : "+") + im.str() + "i)";
  }
};

}  // namespace vacfield
