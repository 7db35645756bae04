#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fluxon/errors.hpp"

namespace fluxon {

struct quadrature_failure : numeric_failure {
    using numeric_failure::numeric_failure;
};

// Fixed n-point Gauss-Legendre rule on [-1,1].
struct GaussLegendre {
    std::vector<double> x, w;
    explicit GaussLegendre(int n);
};

const GaussLegendre& gauss_legendre(int n);  // cached, thread-safe

namespace detail {
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

// 7-point Gauss / 15-point Kronrod nodes on [-1,1].
inline constexpr double gk_x[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.0};
inline constexpr double gk_wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F, class T>
T gk_segment(F& f, double a, double b, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T fc = f(c);
    T kron = fc * gk_wk[7];
    T gauss = fc * gk_wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk_x[j];
        T f1 = f(c - dx), f2 = f(c + dx);
        kron += (f1 + f2) * gk_wk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * gk_wg[j / 2];
    }
    err = magnitude((kron - gauss) * h);
    return kron * h;
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) on [a,b]: the segment with the largest
// error estimate is bisected until the summed estimate meets abs_tol or falls
// to the roundoff level of the integrand. A segment whose bisection does not
// lower an error already at roundoff level (cancellation noise in f) is frozen
// and no longer refined. Throws quadrature_failure once max_segments is reached.
template <class T = double, class F>
T integrate(F&& f, double a, double b, double abs_tol = 1e-12, int max_segments = 4000) {
    struct Seg {
        double a, b, err;
        T val;
        double mag;
    };
    auto cmp = [](const Seg& x, const Seg& y) { return x.err < y.err; };
    std::vector<Seg> heap;
    double err = 0.0;
    T val = detail::gk_segment<F, T>(f, a, b, err);
    heap.push_back({a, b, err, val, detail::magnitude(val)});
    double total_err = err, total_mag = detail::magnitude(val);
    T frozen{};
    int n_frozen = 0;
    while (total_err > abs_tol && total_err > 64 * 2.2e-16 * total_mag) {
        if (static_cast<int>(heap.size()) + n_frozen >= max_segments)
            throw quadrature_failure("adaptive quadrature did not converge");
        std::pop_heap(heap.begin(), heap.end(), cmp);
        const Seg s = heap.back();
        heap.pop_back();
        const double c = 0.5 * (s.a + s.b);
        if (!(c > s.a && c < s.b)) throw quadrature_failure("adaptive quadrature exhausted the interval resolution");
        double e1 = 0.0, e2 = 0.0;
        T v1 = detail::gk_segment<F, T>(f, s.a, c, e1);
        T v2 = detail::gk_segment<F, T>(f, c, s.b, e2);
        const double m1 = detail::magnitude(v1), m2 = detail::magnitude(v2);
        total_mag += m1 + m2 - s.mag;
        if (e1 + e2 >= s.err && s.err <= 256 * 2.2e-16 * total_mag) {
            frozen += v1 + v2;
            n_frozen += 2;
            total_err -= s.err;
            if (total_err < 0.0) total_err = 0.0;
            if (heap.empty()) break;
            continue;
        }
        heap.push_back({s.a, c, e1, v1, m1});
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back({c, s.b, e2, v2, m2});
        std::push_heap(heap.begin(), heap.end(), cmp);
        total_err += e1 + e2 - s.err;
        if (total_err < 0.0) total_err = 0.0;
    }
    T r = frozen;
    for (const auto& s : heap) r += s.val;
    return r;
}

// Fixed-rule sum over [a,b] using a cached Gauss-Legendre rule.
template <class T = double, class F>
T integrate_fixed(F&& f, double a, double b, int n) {
    const auto& gl = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T s{};
    for (std::size_t j = 0; j < gl.x.size(); ++j) s += f(c + h * gl.x[j]) * gl.w[j];
    return s * h;
}

}  // namespace fluxon
