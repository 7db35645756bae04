#include "fluxon/identities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fluxon/quadrature.hpp"
#include "fluxon/specfun.hpp"

namespace fluxon {

namespace {
constexpr double pi = std::numbers::pi;
const cplx iu(0.0, 1.0);

double rel(cplx lhs, cplx rhs, double scale) { return std::abs(lhs - rhs) / std::max(scale, 1e-300); }

// Real negative theta parameter of modulus m.
double H0_of(double m) { return -2.0 * pi * elliptic_K(1.0 - m) / elliptic_K(m); }

struct Recorder {
    Recorder() { out.reserve(32); }  // add() hands out references
    std::vector<IdentityCheck> out;
    IdentityCheck& add(const std::string& name, double tol) {
        out.push_back({name, 0, 0.0, tol});
        return out.back();
    }
};

void record(IdentityCheck& c, double err) {
    ++c.draws;
    c.max_error = std::isfinite(err) ? std::max(c.max_error, err) : std::numeric_limits<double>::infinity();
}
}  // namespace

std::vector<IdentityCheck> identity_suite(std::uint64_t seed, int draws) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> reH(-6.0, -1.0), imH(-pi, pi), rez(-1.5, 1.5), imz(-pi, pi), um(0.05, 0.95),
        uu(-8.0, 8.0);
    auto draw_H = [&] { return cplx(reH(rng), imH(rng)); };
    auto draw_z = [&] { return cplx(rez(rng), imz(rng)); };

    Recorder r;
    auto& even = r.add("theta even", 1e-12);
    auto& period = r.add("theta 2 pi i periodic", 1e-10);
    auto& quasi = r.add("theta quasi-periodic in H", 1e-10);
    auto& zero = r.add("theta zero at i pi + H/2", 1e-10);
    auto& dK = r.add("theta' at the zero", 1e-10);
    auto& dbl = r.add("theta double argument", 1e-10);
    auto& shift = r.add("theta parameter shift by 2 pi i", 1e-10);
    auto& watson = r.add("theta Watson addition", 1e-10);
    auto& elim = r.add("theta values at 0, i pi, H0/2 from K(m)", 1e-10);
    auto& fourth = r.add("theta fourth power at H0/4 - i pi/2", 1e-10);
    auto& jrho = r.add("pi J = 8 K sqrt(m(1-m)) rho", 1e-10);
    auto& legendre = r.add("Legendre relation", 1e-12);
    auto& jac = r.add("Jacobi sn^2 + cn^2 = 1, dn^2 = 1 - m sn^2", 1e-12);
    auto& mean = r.add("mean of dn^-2 = E/((1-m)K)", 1e-10);
    auto& pder = r.add("p'(w) = <dn^-2> - dn(w+K)^-2", 1e-6);

    for (int k = 0; k < draws; ++k) {
        const cplx H = draw_H(), z = draw_z(), z2 = draw_z();
        const double tz = std::abs(theta(z, H));
        record(even, rel(theta(-z, H), theta(z, H), tz));
        record(period, rel(theta(z + 2.0 * pi * iu, H), theta(z, H), tz));
        record(quasi, rel(theta(z + H, H), std::exp(-0.5 * H - z) * theta(z, H), tz));

        const cplx Kc = iu * pi + 0.5 * H;
        record(zero, std::abs(theta(Kc, H)) / std::abs(theta(0.0, H)));
        const cplx rhs_dK = 0.5 * theta(0.5 * H, H) * theta(0.0, H) * theta(iu * pi, H);
        record(dK, rel(theta_d1(Kc, H), rhs_dK, std::abs(rhs_dK)));

        const cplx t4 = std::pow(theta(z, H), 4), s4 = std::exp(0.5 * H + 2.0 * z) * std::pow(theta(z + 0.5 * H, H), 4);
        const cplx rhs0 = std::pow(theta(iu * pi, H), 3) * theta(2.0 * z + iu * pi, H);
        record(dbl, rel(t4 - s4, rhs0, std::abs(t4) + std::abs(s4)));

        record(shift, rel(theta(z, H + 2.0 * pi * iu), theta(z + iu * pi, H), tz));

        const cplx H2 = 2.0 * H;
        const cplx w1 = theta(z + z2, H2) * theta(z - z2, H2);
        const cplx w2 = std::exp(0.5 * H + z) * theta(z + z2 + H, H2) * theta(z - z2 + H, H2);
        record(watson, rel(theta(z, H) * theta(z2, H), w1 + w2, std::abs(w1) + std::abs(w2)));

        const double m = um(rng);
        const auto [K, E] = elliptic_KE(m);
        const double H0 = H0_of(m);
        const double base = std::sqrt(2.0 / pi) * std::sqrt(K);
        record(elim, std::max({rel(theta(0.0, H0), base, base),
                               rel(theta(iu * pi, H0), std::pow(1.0 - m, 0.25) * base, base),
                               rel(theta(0.5 * H0, H0), std::pow(m, 0.25) * std::exp(-H0 / 8.0) * base, base)}));

        const double th = 2.0 * std::asin(std::sqrt(m));
        const cplx lhs4 = std::exp(-0.5 * iu * th) * std::pow(theta(0.25 * H0 - 0.5 * iu * pi, H0), 4);
        const double rhs4 = 2.0 * std::pow(m * (1.0 - m), 0.25) * std::exp(-H0 / 8.0) * K * K / (pi * pi);
        record(fourth, rel(lhs4, rhs4, rhs4));

        const double energy = 2.0 * m - 1.0;
        const double lhsJ = pi * whitham_J(energy), rhsJ = 8.0 * K * std::sqrt(m * (1.0 - m)) * rho(m);
        record(jrho, std::abs(lhsJ - rhsJ) / std::abs(rhsJ));

        const auto [Kp, Ep] = elliptic_KE(1.0 - m);
        record(legendre, std::abs(E * Kp + Ep * K - K * Kp - 0.5 * pi) / (0.5 * pi));

        const double u = uu(rng);
        const auto [sn, cn, dn] = jacobi(u, m);
        record(jac, std::max(std::abs(sn * sn + cn * cn - 1.0), std::abs(dn * dn - 1.0 + m * sn * sn)));

        const double avg = integrate(
                               [&](double s) {
                                   const double d = jacobi(s, m).dn;
                                   return 1.0 / (d * d);
                               },
                               0.0, K, 1e-13) /
                           K;
        record(mean, std::abs(avg - mean_inv_dn2(m)) / mean_inv_dn2(m));

        const double w = uu(rng), h = 1e-4;
        const double fd = (p_periodic(w + h, m) - p_periodic(w - h, m)) / (2.0 * h);
        const double dw = jacobi(w + K, m).dn;
        record(pder, std::abs(fd - (mean_inv_dn2(m) - 1.0 / (dw * dw))));
    }
    return r.out;
}

std::vector<IdentityCheck> catastrophe_identities(const CatastropheData& c) {
    Recorder r;
    const double K = elliptic_K(c.m_gc);
    record(r.add("B = 2 K(m_gc)", 1e-8), std::abs(c.B - 2.0 * K) / (2.0 * K));
    record(r.add("A/(B sin theta) + cot theta = -rho(m_gc)", 1e-8),
           std::abs(c.A / (c.B * std::sin(c.theta)) + 1.0 / std::tan(c.theta) + rho(c.m_gc)) / rho(c.m_gc));
    record(r.add("b = -a rho(m_gc)", 1e-12), std::abs(c.b + c.a * rho(c.m_gc)) / std::abs(c.b));
    record(r.add("m_gc = sin^2(theta/2)", 1e-12), std::abs(c.m_gc - std::pow(std::sin(0.5 * c.theta), 2)));
    return r.out;
}

}  // namespace fluxon
