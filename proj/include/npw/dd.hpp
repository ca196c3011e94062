#pragma once

#include <cmath>
#include <limits>

namespace npw {

/// Double-double value: unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
/// Carries ~106 significand bits (~32 significant decimal digits), which is
/// the extended-precision contract used by the reference solvers.
struct DD {
  double hi = 0.0;
  double lo = 0.0;

  DD() = default;
  DD(double x) : hi(x), lo(0.0) {}
  DD(double h, double l) : hi(h), lo(l) {}

  double to_double() const { return hi; }
  explicit operator double() const { return hi; }
};

namespace dd_detail {

/* fl(a+b) and err(a+b), assuming |a| >= |b|. */
inline DD quick_two_sum(double a, double b) {
  double s = a + b;
  return DD(s, b - (s - a));
}

/* fl(a+b) and err(a+b). */
inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return DD(s, (a - (s - bb)) + (b - bb));
}

/* fl(a*b) and err(a*b) via fused multiply-add. */
inline DD two_prod(double a, double b) {
  double p = a * b;
  return DD(p, std::fma(a, b, -p));
}

}  // namespace dd_detail

inline DD operator-(DD a) { return DD(-a.hi, -a.lo); }

inline DD operator+(DD a, DD b) {
  DD s = dd_detail::two_sum(a.hi, b.hi);
  DD t = dd_detail::two_sum(a.lo, b.lo);
  double c = s.lo + t.hi;
  DD v = dd_detail::quick_two_sum(s.hi, c);
  return dd_detail::quick_two_sum(v.hi, t.lo + v.lo);
}

inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
  DD p = dd_detail::two_prod(a.hi, b.hi);
  double t = a.hi * b.lo + a.lo * b.hi;
  return dd_detail::quick_two_sum(p.hi, p.lo + t);
}

inline DD operator/(DD a, DD b) {
  double q1 = a.hi / b.hi;
  DD r = a - b * DD(q1);
  double q2 = r.hi / b.hi;
  r = r - b * DD(q2);
  double q3 = r.hi / b.hi;
  DD q = dd_detail::quick_two_sum(q1, q2);
  return q + DD(q3);
}

inline DD operator+(DD a, double b) { return a + DD(b); }
inline DD operator+(double a, DD b) { return DD(a) + b; }
inline DD operator-(DD a, double b) { return a - DD(b); }
inline DD operator-(double a, DD b) { return DD(a) - b; }
inline DD operator*(DD a, double b) { return a * DD(b); }
inline DD operator*(double a, DD b) { return DD(a) * b; }
inline DD operator/(DD a, double b) { return a / DD(b); }
inline DD operator/(double a, DD b) { return DD(a) / b; }

inline DD& operator+=(DD& a, DD b) { return a = a + b; }
inline DD& operator-=(DD& a, DD b) { return a = a - b; }
inline DD& operator*=(DD& a, DD b) { return a = a * b; }
inline DD& operator/=(DD& a, DD b) { return a = a / b; }

inline bool operator==(DD a, DD b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(DD a, DD b) { return !(a == b); }
inline bool operator<(DD a, DD b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(DD a, DD b) { return b < a; }
inline bool operator<=(DD a, DD b) { return !(b < a); }
inline bool operator>=(DD a, DD b) { return !(a < b); }

inline DD dd_abs(DD a) { return a.hi < 0.0 ? -a : a; }

inline DD dd_sqrt(DD a) {
  if (a.hi == 0.0) return DD(0.0);
  if (a.hi < 0.0) {
    double nan = std::numeric_limits<double>::quiet_NaN();
    return DD(nan, nan);
  }
  // One Newton step on the double-precision seed doubles the digits.
  double x = 1.0 / std::sqrt(a.hi);
  DD ax = DD(a.hi * x);
  return ax + (a - ax * ax) * DD(x * 0.5);
}

/// sqrt(a^2 + b^2); the atmospheric magnitudes used here are nowhere near
/// overflow, so no rescaling is needed.
inline DD dd_hypot(DD a, DD b) { return dd_sqrt(a * a + b * b); }

inline DD dd_ldexp(DD a, int n) { return DD(std::ldexp(a.hi, n), std::ldexp(a.lo, n)); }

/// exp(a) to ~30 significant digits: reduce by ln 2 and 2^-9, Taylor on the
/// remainder, then square back up (the QD recipe).
inline DD dd_exp(DD a) {
  static const DD kLn2(6.93147180559945286e-01, 2.319046813846299558e-17);
  if (a.hi <= -709.0) return DD(0.0);
  if (a.hi >= 709.0) return DD(std::numeric_limits<double>::infinity());
  if (a.hi == 0.0 && a.lo == 0.0) return DD(1.0);

  double m = std::floor(a.hi / kLn2.hi + 0.5);
  DD r = dd_ldexp(a - kLn2 * DD(m), -9);
  DD p = r * r * DD(0.5);
  DD s = r + p;
  for (int i = 3; i <= 24; ++i) {
    p = p * r / DD(static_cast<double>(i));
    s += p;
    if (std::abs(p.hi) < 1e-35) break;
  }
  for (int j = 0; j < 9; ++j) s = dd_ldexp(s, 1) + s * s;  // (1+s)^2 - 1
  s += DD(1.0);
  return dd_ldexp(s, static_cast<int>(m));
}

/// sin(a) and cos(a) with double-double argument reduction; keeps ~1e-30
/// absolute accuracy for |a| up to ~1e10 rad (the phase accumulations here
/// stay far below that).
inline void dd_sincos(DD a, DD& sin_out, DD& cos_out) {
  static const DD kTwoPi(6.28318530717958623e+00, 2.449293598294706414e-16);
  static const DD kHalfPi(1.57079632679489656e+00, 6.123233995736766036e-17);
  double m = std::floor(a.hi / kTwoPi.hi + 0.5);
  DD r = a - kTwoPi * DD(m);
  int q = static_cast<int>(std::floor(r.hi / kHalfPi.hi + 0.5));
  DD t = r - kHalfPi * DD(static_cast<double>(q));

  // |t| <= pi/4 + eps: Taylor for sin, Pythagoras for cos (cos >= 1/sqrt2).
  DD term = t;
  DD s = t;
  DD tt = t * t;
  for (int i = 1; i <= 16; ++i) {
    term = -(term * tt) / DD(static_cast<double>(2 * i * (2 * i + 1)));
    s += term;
    if (std::abs(term.hi) < 1e-35) break;
  }
  DD c = dd_sqrt(DD(1.0) - s * s);

  switch (q) {
    case 0: sin_out = s; cos_out = c; break;
    case 1: sin_out = c; cos_out = -s; break;
    case -1: sin_out = -c; cos_out = s; break;
    default: sin_out = -s; cos_out = -c; break;  // q = +-2
  }
}

/// Complex value over DD components, time convention e^{+jwt}.
struct DDComplex {
  DD re, im;

  DDComplex() = default;
  DDComplex(DD r, DD i) : re(r), im(i) {}
  DDComplex(double r, double i) : re(r), im(i) {}
};

inline DDComplex operator+(DDComplex a, DDComplex b) { return {a.re + b.re, a.im + b.im}; }
inline DDComplex operator-(DDComplex a, DDComplex b) { return {a.re - b.re, a.im - b.im}; }
inline DDComplex operator*(DDComplex a, DDComplex b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline DDComplex operator/(DDComplex a, DDComplex b) {
  DD d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline DD dd_cabs(DDComplex z) { return dd_hypot(z.re, z.im); }

/// Principal complex square root (Re >= 0).
inline DDComplex dd_csqrt(DDComplex z) {
  DD m = dd_cabs(z);
  if (m.hi == 0.0) return {DD(0.0), DD(0.0)};
  if (z.re.hi >= 0.0) {
    DD u = dd_sqrt((m + z.re) * DD(0.5));
    return {u, z.im / (u * DD(2.0))};
  }
  DD w = dd_sqrt((m - z.re) * DD(0.5));
  if (z.im.hi < 0.0) w = -w;
  return {z.im / (w * DD(2.0)), w};
}

}  // namespace npw
