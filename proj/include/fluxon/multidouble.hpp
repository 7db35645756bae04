#pragma once

#include <cmath>
#include <complex>

// Unevaluated double-double numbers (about 106 significant bits), enough to
// carry the Cauchy-type condensate systems past the point where double
// elimination loses every digit. Requires strict IEEE evaluation: the translation
// units using this header are compiled with -ffp-contract=off.
namespace fluxon::dd {

struct real {
    double hi = 0.0, lo = 0.0;
    real() = default;
    real(double h) : hi(h) {}
    real(double h, double l) : hi(h), lo(l) {}
    explicit operator double() const { return hi + lo; }
};

namespace detail {
inline real quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}
inline real two_sum(double a, double b) {
    const double s = a + b, bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}
// Dekker's split; avoids relying on a hardware fma.
inline void split(double a, double& h, double& l) {
    const double t = 134217729.0 * a;
    h = t - (t - a);
    l = a - h;
}
inline real two_prod(double a, double b) {
    const double p = a * b;
    double ah, al, bh, bl;
    split(a, ah, al);
    split(b, bh, bl);
    return {p, ((ah * bh - p) + ah * bl + al * bh) + al * bl};
}
}  // namespace detail

inline real operator-(real a) { return {-a.hi, -a.lo}; }

inline real operator+(real a, real b) {
    real s = detail::two_sum(a.hi, b.hi);
    const real t = detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return detail::quick_two_sum(s.hi, s.lo);
}
inline real operator-(real a, real b) { return a + (-b); }

inline real operator*(real a, real b) {
    real p = detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return detail::quick_two_sum(p.hi, p.lo);
}

inline real operator/(real a, real b) {
    const double q1 = a.hi / b.hi;
    real r = a - real(q1) * b;
    const double q2 = r.hi / b.hi;
    r = r - real(q2) * b;
    const double q3 = r.hi / b.hi;
    return detail::quick_two_sum(q1, q2) + real(q3);
}

inline real& operator+=(real& a, real b) { return a = a + b; }
inline real& operator-=(real& a, real b) { return a = a - b; }

// Complex double-double; std::complex is unspecified for non-arithmetic types.
struct cplx {
    real re, im;
    cplx() = default;
    cplx(double r) : re(r) {}
    cplx(real r, real i = real()) : re(r), im(i) {}
    cplx(std::complex<double> z) : re(z.real()), im(z.imag()) {}
    std::complex<double> to_std() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

inline cplx operator+(cplx a, cplx b) { return {a.re + b.re, a.im + b.im}; }
inline cplx operator-(cplx a, cplx b) { return {a.re - b.re, a.im - b.im}; }
inline cplx operator-(cplx a) { return {-a.re, -a.im}; }
inline cplx operator*(cplx a, cplx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline cplx operator/(cplx a, cplx b) {
    // Scale by a power of two first so |b|^2 cannot overflow.
    const int e = std::ilogb(std::max(std::abs(b.re.hi), std::abs(b.im.hi)));
    const real s(std::ldexp(1.0, -e));
    b = {b.re * s, b.im * s};
    const real den = b.re * b.re + b.im * b.im;
    const cplx num = a * cplx(b.re, -b.im);
    return {num.re * s / den, num.im * s / den};
}
inline cplx& operator+=(cplx& a, cplx b) { return a = a + b; }
inline cplx& operator-=(cplx& a, cplx b) { return a = a - b; }
inline cplx conj(cplx a) { return {a.re, -a.im}; }
inline double abs1(cplx a) { return std::abs(a.re.hi) + std::abs(a.im.hi); }

}  // namespace fluxon::dd
