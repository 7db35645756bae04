#include "fluxon/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fluxon/quadrature.hpp"

namespace fluxon {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int max_landen_depth = 40;

void require_parameter(double m, const char* who) {
    if (!(m > 0.0 && m < 1.0)) throw std::domain_error(std::string(who) + ": parameter m must lie in (0,1)");
}

}  // namespace

EllipticKE elliptic_KE(double m) {
    require_parameter(m, "elliptic_KE");
    double a = 1.0, b = std::sqrt(1.0 - m), c = std::sqrt(m);
    double sum = 0.5 * m;  // 2^{n-1} c_n^2 accumulated from n = 0
    double pow2 = 0.5;
    for (int n = 0; n < max_landen_depth; ++n) {
        double an = 0.5 * (a + b);
        double bn = std::sqrt(a * b);
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        pow2 *= 2.0;
        sum += pow2 * c * c;
        if (std::abs(c) < 1e-17 * a) break;
    }
    const double K = pi / (2.0 * a);
    return {K, K * (1.0 - sum)};
}

double elliptic_K(double m) { return elliptic_KE(m).K; }

EllipticTriple jacobi(double u, double m) {
    require_parameter(m, "jacobi");
    const double K = elliptic_K(m);
    // Reduce into [-2K, 2K): sn and cn are 4K-periodic and dn inherits it.
    const double period = 4.0 * K;
    double ur = u - period * std::floor(u / period + 0.5);

    std::array<double, max_landen_depth + 1> a{}, c{};
    a[0] = 1.0;
    double b = std::sqrt(1.0 - m);
    c[0] = std::sqrt(m);
    int n = 0;
    while (std::abs(c[n]) > 1e-16 * a[n]) {
        if (n == max_landen_depth) throw std::runtime_error("jacobi: Landen recursion did not terminate");
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = c[n] * c[n] / (4.0 * a[n + 1]);  // = (a - b)/2 without cancellation
        b = std::sqrt(a[n] * b);
        ++n;
    }
    double phi = std::ldexp(a[n] * ur, n);
    for (int k = n; k > 0; --k) phi = 0.5 * (phi + std::asin(c[k] / a[k] * std::sin(phi)));
    const double sn = std::sin(phi), cn = std::cos(phi);
    return {sn, cn, std::sqrt(1.0 - m * sn * sn)};
}

namespace {

// Index window [lo, hi] outside which every term of the theta series is below
// e^{-38} times the largest term.
std::pair<long, long> theta_window(cplx z, cplx H) {
    if (!(H.real() < 0.0)) throw std::domain_error("theta: Re H must be negative");
    const double h = -H.real();
    const double centre = z.real() / h;
    const double spread = std::sqrt(2.0 * 38.0 / h);
    return {static_cast<long>(std::floor(centre - spread)) - 1, static_cast<long>(std::ceil(centre + spread)) + 1};
}

}  // namespace

cplx theta(cplx z, cplx H) {
    auto [lo, hi] = theta_window(z, H);
    cplx s = 0.0;
    for (long n = lo; n <= hi; ++n) {
        const double dn = static_cast<double>(n);
        s += std::exp(0.5 * H * dn * dn + dn * z);
    }
    return s;
}

cplx theta_d1(cplx z, cplx H) {
    auto [lo, hi] = theta_window(z, H);
    cplx s = 0.0;
    for (long n = lo; n <= hi; ++n) {
        const double dn = static_cast<double>(n);
        s += dn * std::exp(0.5 * H * dn * dn + dn * z);
    }
    return s;
}

double mean_inv_dn2(double m) {
    const auto [K, E] = elliptic_KE(m);
    return E / ((1.0 - m) * K);
}

double p_periodic(double w, double m) {
    const double K = elliptic_K(m);
    const double mean = mean_inv_dn2(m);
    // Zero mean over a period lets the upper limit be reduced into [0, 2K).
    double upper = w + K;
    upper -= 2.0 * K * std::floor(upper / (2.0 * K));
    auto f = [&](double zeta) {
        const double d = jacobi(zeta, m).dn;
        return mean - 1.0 / (d * d);
    };
    // dn^-2 is symmetric about K; split there so each panel is monotone.
    if (upper <= K) return integrate(f, 0.0, upper, 1e-13);
    return integrate(f, 0.0, K, 1e-13) + integrate(f, K, upper, 1e-13);
}

double rho(double m) {
    const auto [K, E] = elliptic_KE(m);
    return E / (K * std::sqrt(m * (1.0 - m))) - std::sqrt((1.0 - m) / m);
}

double whitham_J(double energy) {
    if (!(energy > -1.0 && energy < 1.0)) throw std::domain_error("whitham_J: energy must lie in (-1,1)");
    const double m = 0.5 * (1.0 + energy);
    const auto [K, E] = elliptic_KE(m);
    return 8.0 / pi * (E + (m - 1.0) * K);
}

}  // namespace fluxon
