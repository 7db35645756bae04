#include "fluxon/laxmap.hpp"

#include <algorithm>
#include <cmath>

// Boost 1.74's pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fluxon/quadrature.hpp"

namespace fluxon {

namespace {
constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};
constexpr int cheb_order = 64;
}  // namespace

cplx sqrt_neg(cplx w) {
    if (w.imag() == 0.0 && w.real() >= 0.0) throw branch_cut_error("w lies on the branch cut [0, inf)");
    return std::sqrt(-w);
}

cplx E_of(cplx w) {
    const cplx s = sqrt_neg(w);
    return 0.25 * I * (s + 1.0 / s);
}

cplx D_of(cplx w) {
    const cplx s = sqrt_neg(w);
    return 0.25 * I * (s - 1.0 / s);
}

cplx Q_of(cplx w, double x, double t) { return E_of(w) * x + D_of(w) * t; }

cplx dE_of(cplx w) {
    const cplx s = sqrt_neg(w);
    return -0.125 * I * (1.0 / s - 1.0 / (s * s * s));
}

cplx dD_of(cplx w) {
    const cplx s = sqrt_neg(w);
    return -0.125 * I * (1.0 / s + 1.0 / (s * s * s));
}

// ---------------------------------------------------------------- profiles

ImpulseProfile ImpulseProfile::sech(double amplitude, bool closed_form) {
    if (!(amplitude > 0.0 && amplitude < 0.5)) throw std::domain_error("sech profile needs 0 < A < 1/2");
    ImpulseProfile p;
    p.name = "sech";
    p.G = [amplitude](double x) { return -4.0 * amplitude / std::cosh(x); };
    p.half_width = 45.0;
    p.G_imag = [amplitude](double s) { return -4.0 * amplitude / std::cos(s); };
    p.imag_limit = 0.5 * pi;
    p.sech_amplitude = closed_form ? amplitude : 0.0;
    return p;
}

ImpulseProfile ImpulseProfile::gaussian(double depth, double width) {
    if (!(depth > 0.0 && depth < 2.0) || !(width > 0.0)) throw std::domain_error("gaussian profile needs 0 < depth < 2");
    ImpulseProfile p;
    p.name = "gaussian";
    p.G = [=](double x) { return -depth * std::exp(-(x / width) * (x / width)); };
    p.half_width = 7.0 * width;
    p.G_imag = [=](double s) { return -depth * std::exp((s / width) * (s / width)); };
    p.imag_limit = 3.0 * width;
    return p;
}

ImpulseProfile ImpulseProfile::tabulated(const std::vector<double>& x, const std::vector<double>& g) {
    if (x.size() != g.size() || x.size() < 4) throw std::invalid_argument("tabulated profile needs >= 4 matching samples");
    // Keep the x >= 0 half; if negative abscissae are present they must mirror.
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size(); ++i) pts.emplace_back(x[i], g[i]);
    std::sort(pts.begin(), pts.end());
    std::vector<double> xs, gs;
    for (auto [xi, gi] : pts) {
        if (xi < 0.0) {
            auto it = std::find_if(pts.begin(), pts.end(), [&](auto& q) { return std::abs(q.first + xi) < 1e-12; });
            if (it == pts.end() || std::abs(it->second - gi) > 1e-12)
                throw std::domain_error("tabulated profile is not even");
            continue;
        }
        xs.push_back(xi);
        gs.push_back(gi);
    }
    if (xs.size() < 4 || xs.front() != 0.0) throw std::domain_error("tabulated profile must include x = 0");
    const double xmax = xs.back();
    auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(xs), std::move(gs));
    ImpulseProfile p;
    p.name = "tabulated";
    p.G = [spline, xmax](double xv) {
        const double a = std::abs(xv);
        return a >= xmax ? (*spline)(xmax) : (*spline)(a);
    };
    p.half_width = xmax;
    return p;
}

ImpulseProfile ImpulseProfile::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile file " + path);
    std::string line;
    std::vector<double> x, g;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double a, b;
        if (!(ss >> a >> b)) continue;  // header row
        x.push_back(a);
        g.push_back(b);
    }
    return tabulated(x, g);
}

void ImpulseProfile::validate() const {
    const double g0 = G0();
    if (!(g0 > -2.0 && g0 < 0.0)) throw std::domain_error("profile must satisfy -2 < G(0) < 0");
    for (int i = 1; i <= 64; ++i) {
        const double x = half_width * i / 64.0;
        if (std::abs(G(x) - G(-x)) > 1e-12) throw std::domain_error("profile is not even");
        if (G(x) < g0 - 1e-14) throw std::domain_error("profile minimum is not at x = 0");
    }
}

double turning_point(const ImpulseProfile& p, double v) {
    const double target = 4.0 * v;
    if (target >= -p.G0()) return 0.0;
    double lo = 0.0, hi = p.half_width;
    if (-p.G(hi) >= target) return hi;  // truncated support
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (-p.G(mid) > target ? lo : hi) = mid;
    }
    // Secant polish on the bracket.
    double a = lo, b = hi, fa = -p.G(a) - target, fb = -p.G(b) - target;
    if (fa != fb) {
        const double c = b - fb * (b - a) / (fb - fa);
        if (c >= lo && c <= hi) return c;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------- phase integral

PhaseIntegral::PhaseIntegral(ImpulseProfile profile) : profile_(std::move(profile)) {
    profile_.validate();
    v0_ = -0.25 * profile_.G0();
    if (closed_form()) {
        intG_ = -4.0 * profile_.sech_amplitude * pi;
        cheb_hi_ = 0.5;
        return;
    }
    intG_ = 2.0 * integrate([&](double x) { return profile_.G(x); }, 0.0, profile_.half_width, 1e-13);
    build_chebyshev();
}

double PhaseIntegral::psi_real_direct(double v) const {
    const double xp = turning_point(profile_, v);
    if (xp == 0.0) return 0.0;
    const double c = 16.0 * v * v;
    // x = x_+ sin(pi s / 2) removes the square-root endpoint behaviour.
    auto f = [&](double s) {
        const double x = xp * std::sin(0.5 * pi * s);
        const double g = profile_.G(x);
        const double r = g * g - c;
        return (r > 0.0 ? std::sqrt(r) : 0.0) * xp * 0.5 * pi * std::cos(0.5 * pi * s);
    };
    return 0.5 * integrate(f, 0.0, 1.0, 1e-13);
}

double PhaseIntegral::psi_beyond(double v) const {
    if (!profile_.G_imag) throw std::domain_error("phase integral cannot be continued past v0 for this profile");
    const double target = 4.0 * v;
    double lo = 0.0, hi = profile_.imag_limit;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (-profile_.G_imag(mid) < target ? lo : hi) = mid;
    }
    const double sp = 0.5 * (lo + hi);
    const double c = target * target;
    auto f = [&](double s) {
        const double sig = sp * std::sin(0.5 * pi * s);
        const double g = profile_.G_imag(sig);
        const double r = c - g * g;
        return (r > 0.0 ? std::sqrt(r) : 0.0) * sp * 0.5 * pi * std::cos(0.5 * pi * s);
    };
    return -0.5 * integrate(f, 0.0, 1.0, 1e-13);
}

double PhaseIntegral::psi_imag(double v) const {
    if (closed_form()) return pi * (profile_.sech_amplitude - v);
    if (v < 0.0) throw std::domain_error("psi_imag needs v >= 0");
    return v <= v0_ ? psi_real_direct(v) : psi_beyond(v);
}

void PhaseIntegral::build_chebyshev() {
    cheb_hi_ = profile_.G_imag ? 0.5 : v0_;
    const int n = cheb_order;
    std::vector<double> f(n);
    for (int j = 0; j < n; ++j) {
        const double s = std::cos(pi * (j + 0.5) / n);
        f[j] = psi_imag(0.5 * cheb_hi_ * (1.0 + s));
    }
    cheb_.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += f[j] * std::cos(pi * k * (j + 0.5) / n);
        cheb_[k] = 2.0 * acc / n;
    }
    cheb_[0] *= 0.5;
}

namespace {
// Clenshaw sum of sum_k c_k T_k(s) and its s-derivative at complex s.
std::pair<cplx, cplx> clenshaw(const std::vector<double>& c, cplx s) {
    cplx b1 = 0.0, b2 = 0.0, d1 = 0.0, d2 = 0.0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
        const cplx b0 = 2.0 * s * b1 - b2 + c[k];
        const cplx d0 = 2.0 * b1 + 2.0 * s * d1 - d2;
        b2 = b1;
        b1 = b0;
        d2 = d1;
        d1 = d0;
    }
    return {s * b1 - b2 + c[0], b1 + s * d1 - d2};
}
}  // namespace

cplx PhaseIntegral::psi(cplx lambda) const {
    if (closed_form()) return I * pi * lambda + pi * profile_.sech_amplitude;
    const cplx v = -I * lambda;
    return clenshaw(cheb_, 2.0 * v / cheb_hi_ - 1.0).first;
}

cplx PhaseIntegral::dpsi(cplx lambda) const {
    if (closed_form()) return I * pi;
    const cplx v = -I * lambda;
    // d/dlambda = -i d/dv, and ds/dv = 2 / cheb_hi.
    return -I * clenshaw(cheb_, 2.0 * v / cheb_hi_ - 1.0).second * (2.0 / cheb_hi_);
}

double epsilon_N(const PhaseIntegral& pi_, int N) {
    if (N < 1) throw std::domain_error("epsilon_N needs N >= 1");
    return -pi_.integral_G() / (4.0 * pi * N);
}

cplx theta0(const PhaseIntegral& p, cplx w) { return p.psi(E_of(w)); }

cplx dtheta0(const PhaseIntegral& p, cplx w) { return p.dpsi(E_of(w)) * dE_of(w); }

cplx L_of(const PhaseIntegral& p, cplx w) {
    const double v0 = p.v0();
    // Both arcs run from e^{+-i mu} to 1; v = Im E is the common coordinate.
    auto f = [&](double v) {
        const double psi = 2.0 * std::asin(2.0 * v);
        const double dpsi = 4.0 / std::sqrt(1.0 - 4.0 * v * v);
        const double th = p.closed_form() ? p.psi_imag(v) : p.psi(cplx(0.0, v)).real();
        const cplx y1 = std::polar(1.0, psi), y2 = std::conj(y1);
        const cplx s1 = std::sqrt(-y1), s2 = std::sqrt(-y2);
        // y / sqrt(-y) = -sqrt(-y); dy/dv = +-i y psi'.
        const cplx up = -I * s1 / (y1 - w);
        const cplx lo = I * s2 / (y2 - w);
        return th * dpsi * (up + lo);
    };
    const cplx J = integrate<cplx>(f, 0.0, v0, 1e-11);
    return -sqrt_neg(w) / pi * J;
}

cplx k_of(const PhaseIntegral& p, cplx w, double x, double t) {
    return 2.0 * I * Q_of(w, x, t) + L_of(p, w) - I * theta0(p, w);
}

}  // namespace fluxon
