#include "fluxon/gfunction.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <deque>
#include <json.hpp>
#include <limits>
#include <numbers>

#include "fluxon/quadrature.hpp"
#include "fluxon/specfun.hpp"

namespace fluxon {

namespace {
constexpr double pi = std::numbers::pi;
constexpr cplx iu{0.0, 1.0};
constexpr double quad_tol = 1e-12;
constexpr int polyline_points = 96;

// A straight segment or an arc of a circle centred at 0, parametrized on [0, 1].
struct Leg {
    bool is_arc = false;
    cplx a, b;
    double r = 0.0, th0 = 0.0, th1 = 0.0;

    static Leg segment(cplx a, cplx b) { return {false, a, b}; }
    static Leg arc(double r, double th0, double th1) { return {true, {}, {}, r, th0, th1}; }

    cplx at(double s) const { return is_arc ? std::polar(r, th0 + (th1 - th0) * s) : a + (b - a) * s; }
    cplx d(double s) const { return is_arc ? iu * (th1 - th0) * at(s) : b - a; }
    // at(s) - at(0) without cancellation.
    cplx offset(double s) const {
        if (!is_arc) return (b - a) * s;
        const double phi = (th1 - th0) * s, h = std::sin(0.5 * phi);
        return std::polar(r, th0) * cplx(-2.0 * h * h, std::sin(phi));
    }
};

// Integral of f(w, w - start) dw along a leg. A square-root endpoint at the
// start is removed by s = u^2.
template <class F>
cplx leg_integral(const Leg& leg, F&& f, bool singular_start, double tol = quad_tol) {
    if (singular_start) {
        return integrate<cplx>(
            [&](double u) { return f(leg.at(u * u), leg.offset(u * u)) * leg.d(u * u) * (2.0 * u); }, 0.0, 1.0, tol);
    }
    return integrate<cplx>([&](double s) { return f(leg.at(s), leg.offset(s)) * leg.d(s); }, 0.0, 1.0, tol);
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_meet(cplx p1, cplx p2, cplx q1, cplx q2) {
    const double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

// Nonzero winding rule; the polygon is closed implicitly.
int winding(const std::vector<cplx>& poly, cplx w) {
    int wn = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const cplx a = poly[i], b = poly[(i + 1) % poly.size()];
        if (a.imag() <= w.imag()) {
            if (b.imag() > w.imag() && cross(b - a, w - a) > 0) ++wn;
        } else if (b.imag() <= w.imag() && cross(b - a, w - a) < 0) {
            --wn;
        }
    }
    return wn;
}

void append_leg(std::vector<cplx>& pts, const Leg& leg, int n) {
    for (int k = 0; k < n; ++k) pts.push_back(leg.at(static_cast<double>(k) / n));
}
}  // namespace

double pole_arc_angle(const PhaseIntegral& p) { return 2.0 * std::asin(2.0 * p.v0()); }

// ------------------------------------------------------------ axis reduction

AxisEndpoint::AxisEndpoint(const PhaseIntegral& p, double theta) : pi_(&p), theta_(theta) {
    if (!(theta > 0.0 && theta < pi)) throw std::domain_error("axis endpoint needs 0 < theta < pi");
    va_ = 0.5 * std::sin(0.5 * theta);
    const double d = va_ * va_ - p.v0() * p.v0();
    if (d < -1e-14) throw std::domain_error("axis endpoint lies inside the pole arc");
    if (va_ > p.v0() && !p.continuable())
        throw std::domain_error("phase integral cannot be continued to the endpoint");
    u0_ = std::sqrt(std::max(d, 0.0));
    if (!p.closed_form()) {
        const double h = 1e-4;
        dpsi_v_alpha_ = (psi_v(va_ + h) - psi_v(va_ - h)) / (2.0 * h);
    }
}

double AxisEndpoint::g_of_v(double v) const { return psi_v(v) * std::sqrt(1.0 - 4.0 * v * v); }

cplx AxisEndpoint::G_of_lambda(cplx lambda) const {
    return 2.0 * iu * pi_->dpsi(lambda) * std::sqrt(lambda * lambda + 0.25);
}

cplx AxisEndpoint::K_regular(cplx lambda, cplx c2) const {
    const cplx G = G_of_lambda(lambda);
    return integrate<cplx>(
        [&](double u) { return (g_of_v(std::sqrt(va_ * va_ - u * u)) - G) / (c2 - u * u); }, 0.0, u0_, quad_tol);
}

cplx AxisEndpoint::K_of(cplx lambda) const {
    if (u0_ == 0.0) return 0.0;
    const cplx c2 = lambda * lambda + va_ * va_;
    if (std::abs(c2) > 4.0 * u0_ * u0_) {
        return integrate<cplx>([&](double u) { return g_of_v(std::sqrt(va_ * va_ - u * u)) / (c2 - u * u); }, 0.0,
                               u0_, quad_tol);
    }
    // Principal logs agree with the integral off the real c axis.
    const cplx c = std::sqrt(c2);
    return G_of_lambda(lambda) * (std::log(c + u0_) - std::log(c - u0_)) / (2.0 * c) + K_regular(lambda, c2);
}

double AxisEndpoint::psi_v(double v) const { return (iu * pi_->dpsi(cplx(0.0, v))).real(); }

double AxisEndpoint::dg_over_u2(double u) const {
    // (g(v_u) - g(v_alpha)) / u^2 with v_u^2 = v_alpha^2 - u^2, free of cancellation.
    const double vu = std::sqrt(va_ * va_ - u * u);
    const double su = std::sqrt(1.0 - 4.0 * vu * vu), sa = std::sqrt(1.0 - 4.0 * va_ * va_);
    const double pu = psi_v(vu);
    double dpsi_quot = 0.0;  // (psi_v(v_u) - psi_v(v_alpha)) / u^2
    if (!pi_->closed_form()) {
        const double dv = vu - va_;
        dpsi_quot = std::abs(dv) < 1e-3 ? -dpsi_v_alpha_ / (vu + va_) : (pu - psi_v(va_)) / (u * u);
    }
    return pu * 4.0 / (su + sa) + dpsi_quot * sa;
}

double AxisEndpoint::t_of_H_zero() const {
    if (u0_ == 0.0) throw std::domain_error("H has no zero at the pole arc endpoint");
    const double ga = g_of_v(va_);
    const double tail = integrate([&](double u) { return dg_over_u2(u); }, 0.0, u0_, quad_tol);
    return (-ga / u0_ + tail) / (2.0 * pi);
}

std::pair<double, double> AxisEndpoint::I_affine() const {
    // Semicircle from i v_alpha down to 0 through the first quadrant, where
    // lambda = E(w) pulls back the exterior path from alpha to w = 1.
    auto integrand = [&](double r) {
        const double s = r * r;
        const cplx e = std::exp(iu * (0.5 * pi - pi * s));
        const cplx lambda = 0.5 * iu * va_ + 0.5 * va_ * e;
        const cplx dl = 0.5 * va_ * (-iu * pi) * e * (2.0 * r);
        const cplx D = std::sqrt(lambda * lambda + 0.25);
        const cplx c = std::sqrt(lambda * lambda + va_ * va_);
        const cplx slope = 2.0 * iu * c / D;
        const cplx f0 = (-iu * pi_->dpsi(lambda) + slope * K_of(lambda) / (2.0 * pi)) * dl;
        // Real parts of the constant and t-linear pieces, packed into one complex.
        return cplx(f0.real(), (slope * dl).real());
    };
    const cplx v = integrate<cplx>(integrand, 0.0, 0.5, 1e-12) + integrate<cplx>(integrand, 0.5, 1.0, 1e-12);
    return {v.real(), v.imag()};
}

double AxisEndpoint::I(double t) const {
    const auto [i0, i1] = I_affine();
    return i0 + t * i1;
}

cplx AxisEndpoint::dphi_dlambda(cplx lambda, double t) const {
    const cplx D = std::sqrt(lambda * lambda + 0.25);
    const cplx c = std::sqrt(lambda * lambda + va_ * va_);
    return -iu * pi_->dpsi(lambda) + 2.0 * iu / D * c * (t + K_of(lambda) / (2.0 * pi));
}

cplx AxisEndpoint::H_lambda(cplx lambda, double t) const {
    const cplx D = std::sqrt(lambda * lambda + 0.25);
    if (u0_ == 0.0) return 2.0 * iu / D * t;
    const cplx c2 = lambda * lambda + va_ * va_;
    const cplx c = std::sqrt(c2);
    const cplx z = c / u0_;
    // atanh(c/u0)/c is even in c, so H does not see the branch of c.
    const cplx T = std::abs(z) < 1e-4 ? (1.0 + z * z / 3.0) / u0_ : std::atanh(z) / c;
    return 2.0 * iu / D * (t + (G_of_lambda(lambda) * T + K_regular(lambda, c2)) / (2.0 * pi));
}

cplx AxisEndpoint::H_w(cplx w, double t) const {
    return dE_of(w) * H_lambda(E_of(w), t) / (4.0 * iu * sqrt_neg(w));
}

cplx AxisEndpoint::dH_w_at_alpha(double t, double radius, int points) const {
    const cplx la(0.0, va_);
    cplx h0 = 0.0, h1 = 0.0;
    for (int k = 0; k < points; ++k) {
        const cplx e = std::polar(1.0, 2.0 * pi * k / points);
        const cplx h = H_lambda(la + radius * e, t);
        h0 += h;
        h1 += h / e;
    }
    h0 /= static_cast<double>(points);
    h1 /= static_cast<double>(points) * radius;
    // H_w = q(w) H_lambda(E(w)) with q = E'/(4 i sqrt(-w)).
    const cplx alpha = std::polar(1.0, theta_);
    const cplx s = sqrt_neg(alpha);
    const cplx e1 = dE_of(alpha);
    const cplx e2 = -iu / 16.0 * (1.0 / (s * s * s) - 3.0 / (s * s * s * s * s));
    const cplx q = e1 / (4.0 * iu * s);
    const cplx dq = (e2 * s + e1 / (2.0 * s)) / (4.0 * iu * s * s);
    return q * h1 * e1 + dq * h0;
}

std::pair<double, double> AxisEndpoint::Phi(double t) const {
    // g is anchored at infinity; integrate from infinity to i v_alpha along
    // lambda = i v_alpha + r e^{i pi/4}, with r = s^2/(1-s)^2.
    const cplx dir = std::polar(1.0, 0.25 * pi);
    auto integrand = [&](double s) {
        const double r = s * s / ((1.0 - s) * (1.0 - s));
        const double dr = 2.0 * s / ((1.0 - s) * (1.0 - s) * (1.0 - s));
        const cplx lambda = cplx(0.0, va_) + r * dir;
        const cplx D = std::sqrt(lambda * lambda + 0.25);
        const cplx c = std::sqrt(lambda * lambda + va_ * va_);
        const cplx f = 2.0 * iu * t / D * (-va_ * va_ / (lambda + c)) - iu * c / (pi * D) * K_of(lambda);
        return -f * dir * dr;
    };
    const cplx tail = integrate<cplx>(integrand, 0.0, 0.5, 1e-12) + integrate<cplx>(integrand, 0.5, 1.0, 1e-12);
    const cplx phi = 2.0 * t * 0.5 * std::cos(0.5 * theta_) - pi_->psi(cplx(0.0, va_)) + iu * tail;
    return {phi.real(), phi.imag()};
}

// ------------------------------------------------------------- w-plane form

GFunction::GFunction(const PhaseIntegral& p, EndpointState s, ContourChoice c) : pi_(&p), s_(s), c_(c) {
    if (!(s.alpha.imag() > 0.0)) throw std::domain_error("alpha must lie in the upper half plane");
    mu_ = pole_arc_angle(p);
    theta_ = std::arg(s.alpha);
    rabs_ = std::abs(s.alpha);
    rbeta_ = std::max(1.0, rabs_) + c.beta_offset;
    kappa_ = std::min(c.beta_low_angle, 0.5 * theta_);
    build_beta();
}

namespace {
// gamma~ oriented from alpha to e^{i mu}; the bool marks a square-root endpoint at the start.
std::vector<std::pair<Leg, bool>> gamma_legs(cplx alpha, double mu, bool chord) {
    const double ra = std::abs(alpha), th = std::arg(alpha);
    if (chord) return {{Leg::segment(alpha, std::polar(1.0, mu)), true}};
    if (std::abs(ra - 1.0) < 1e-14) return {{Leg::arc(1.0, th, mu), true}};
    return {{Leg::arc(ra, th, mu), true}, {Leg::segment(std::polar(ra, mu), std::polar(1.0, mu)), false}};
}
}  // namespace

void GFunction::build_beta() {
    beta_.clear();
    append_leg(beta_, Leg::segment(s_.alpha, std::polar(rbeta_, theta_)), 8);
    append_leg(beta_, Leg::arc(rbeta_, theta_, kappa_), polyline_points);
    append_leg(beta_, Leg::segment(std::polar(rbeta_, kappa_), 1.0), 8);
    beta_.push_back(1.0);

    boundary_C_ = {0.0};
    for (auto it = beta_.rbegin(); it != beta_.rend(); ++it) boundary_C_.push_back(*it);

    boundary_D_.clear();
    append_leg(boundary_D_, Leg::arc(1.0, 0.0, mu_), polyline_points);
    std::vector<cplx> g;
    for (const auto& [leg, singular] : gamma_legs(s_.alpha, mu_, c_.gamma_chord)) append_leg(g, leg, polyline_points);
    g.push_back(std::polar(1.0, mu_));
    boundary_D_.insert(boundary_D_.end(), g.rbegin(), g.rend());
    boundary_D_.insert(boundary_D_.end(), beta_.begin() + 1, beta_.end() - 1);
}

bool GFunction::in_C(cplx w) const { return winding(boundary_C_, w) != 0; }

bool GFunction::in_lens(cplx w) const { return winding(boundary_D_, w) != 0; }

bool GFunction::crosses_cut(cplx a, cplx b) const {
    for (std::size_t i = 0; i + 1 < beta_.size(); ++i)
        if (segments_meet(a, b, beta_[i], beta_[i + 1])) return true;
    // |a + s (b - a)| = 1 at an angle inside the pole arc.
    const cplx d = b - a;
    const double qa = std::norm(d), qb = 2.0 * (a.real() * d.real() + a.imag() * d.imag()), qc = std::norm(a) - 1.0;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (qa == 0.0 || disc < 0.0) return false;
    for (double sgn : {-1.0, 1.0}) {
        const double s = (-qb + sgn * std::sqrt(disc)) / (2.0 * qa);
        if (s < 0.0 || s > 1.0) continue;
        const double ang = std::arg(a + s * d);
        if (ang >= 0.0 && ang <= mu_) return true;
    }
    return false;
}

cplx GFunction::R_A(cplx w, cplx d) const {
    // d = w - alpha, supplied exactly near alpha where 1 - alpha/w cancels.
    return w * std::sqrt(d / w) * std::sqrt(1.0 - std::conj(s_.alpha) / w);
}

cplx GFunction::R(cplx w) const {
    if (w.imag() < 0.0) return std::conj(R(std::conj(w)));
    return R(w, w - s_.alpha);
}

cplx GFunction::R(cplx w, cplx d) const {
    const cplx r = R_A(w, d);
    return in_C(w) ? -r : r;
}

template <class F>
cplx GFunction::gamma_integral(F&& fn) const {
    // Over gamma~ (e^{i mu} -> alpha) and its mirror image; the density
    // theta0' sqrt(-xi) / R is real-symmetric.
    cplx total = 0.0;
    for (const auto& [leg, singular] : gamma_legs(s_.alpha, mu_, c_.gamma_chord)) {
        auto body = [&](double s, double ds) {
            const cplx xi = leg.at(s), dxi = leg.d(s) * ds;
            const cplx off = singular ? leg.offset(s) : xi - s_.alpha;
            const cplx f = dtheta0(*pi_, xi) * sqrt_neg(xi) / R(xi, off);
            const cplx xb = std::conj(xi);
            return fn(xi, off, f) * dxi + fn(xb, xb - s_.alpha, std::conj(f)) * std::conj(dxi);
        };
        if (singular)
            total -= integrate<cplx>([&](double u) { return body(u * u, 2.0 * u); }, 0.0, 1.0, quad_tol);
        else
            total -= integrate<cplx>([&](double s) { return body(s, 1.0); }, 0.0, 1.0, quad_tol);
    }
    return total;
}

template <class F>
cplx GFunction::along_beta(F&& fn) const {
    const cplx top = std::polar(rbeta_, theta_), low = std::polar(rbeta_, kappa_);
    auto far = [&](cplx w, cplx) { return fn(w, w - s_.alpha); };
    return leg_integral(Leg::segment(s_.alpha, top), fn, true) + leg_integral(Leg::arc(rbeta_, theta_, kappa_), far, false) +
           leg_integral(Leg::segment(low, 1.0), far, false);
}

cplx GFunction::J(cplx w) const { return J_at(w, w - s_.alpha); }

cplx GFunction::J_at(cplx, cplx d) const {
    // xi - w formed from offsets to alpha, which are exact near alpha.
    return gamma_integral([d](cplx, cplx xoff, cplx f) { return f / (xoff - d); });
}

cplx GFunction::Y(cplx w, cplx Jv) const {
    const double rho = rabs_;
    return -1.0 / (4.0 * sqrt_neg(w)) * ((s_.x - s_.t) / (w * rho) - 4.0 / pi * Jv);
}

cplx GFunction::phi_prime(cplx w) const {
    if (w.imag() < 0.0) return std::conj(phi_prime(std::conj(w)));
    return phi_prime_at(w, w - s_.alpha);
}

cplx GFunction::phi_prime_at(cplx w, cplx d) const {
    const cplx r = R(w, d);
    cplx Jv = J_at(w, d);
    // Inside the lens the Cauchy integral has crossed gamma~.
    if (in_lens(w)) Jv += 2.0 * pi * iu * dtheta0(*pi_, w) * sqrt_neg(w) / r;
    return -iu * dtheta0(*pi_, w) + r * Y(w, Jv);
}

cplx GFunction::H(cplx w) const {
    if (w.imag() < 0.0) return std::conj(H(std::conj(w)));
    return phi_prime(w) / R(w);
}

cplx GFunction::phi_prime_exterior(cplx w, cplx d) const { return -iu * dtheta0(*pi_, w) + R_A(w, d) * Y(w, J_at(w, d)); }

double GFunction::M() const {
    const cplx g = gamma_integral([](cplx, cplx, cplx f) { return f; });
    return 4.0 / pi * g.real() + s_.x + s_.t + (s_.x - s_.t) / rabs_;
}

double GFunction::I() const {
    return along_beta([this](cplx w, cplx d) { return phi_prime_exterior(w, d); }).real();
}

double GFunction::A() const {
    return 2.0 * along_beta([this](cplx w, cplx d) { return sqrt_neg(w) / R_A(w, d); }).real();
}

double GFunction::B() const {
    return 2.0 * along_beta([this](cplx w, cplx d) { return 1.0 / (R_A(w, d) * sqrt_neg(w)); }).real();
}

double GFunction::re_phi(cplx w) const {
    if (std::abs(rabs_ - 1.0) > 1e-12) throw std::domain_error("re_phi path planner needs |alpha| = 1");
    if (w.imag() < 0.0) w = std::conj(w);
    if (w == s_.alpha) return 0.0;  // phi(alpha) is purely imaginary
    const double aw = std::arg(w), rw = std::abs(w);
    std::vector<Leg> legs;
    if (in_lens(w)) {
        // Leave alpha slightly clockwise at radius |w|, then follow that circle.
        const double delta = std::min(0.05, 0.5 * std::acos(std::min(1.0, 1.0 / rw)));
        const cplx q = std::polar(rw, theta_ - delta);
        legs = {Leg::segment(s_.alpha, q), Leg::arc(rw, theta_ - delta, aw)};
    } else if (in_C(w)) {
        legs = {Leg::segment(s_.alpha, w)};
    } else if (aw >= theta_) {
        legs = {Leg::arc(1.0, theta_, aw), Leg::segment(std::polar(1.0, aw), w)};
    } else {
        const double tm = 0.5 * (theta_ + pi), rb = rbeta_ + 1.0;
        legs = {Leg::arc(1.0, theta_, tm), Leg::segment(std::polar(1.0, tm), std::polar(rb, tm)),
                Leg::arc(rb, tm, aw), Leg::segment(std::polar(rb, aw), w)};
    }
    double total = 0.0;
    for (std::size_t k = 0; k < legs.size(); ++k)
        total += leg_integral(legs[k], [&](cplx z, cplx d) { return phi_prime_at(z, k == 0 ? d : z - s_.alpha); },
                              k == 0, 1e-11)
                     .real();
    return total;
}

// ------------------------------------------------------------ x = 0 solvers

namespace {
double t_reality(const PhaseIntegral& p, double theta) {
    const auto [i0, i1] = AxisEndpoint(p, theta).I_affine();
    return -i0 / i1;
}
}  // namespace

EndpointState solve_alpha_on_circle(const PhaseIntegral& p, double t) {
    if (t < 0.0) throw std::domain_error("solve_alpha_on_circle needs t >= 0");
    const double mu = pole_arc_angle(p);
    if (t == 0.0) return {std::polar(1.0, mu), 0.0, 0.0};
    using boost::math::tools::eps_tolerance;
    auto f = [&](double th) { return t_reality(p, th) - t; };
    const double h = 0.02;
    double prev = mu, fprev = -t;
    for (double th = mu + h; th < pi - 1e-3; th += h) {
        const double fv = f(th);
        if (fv >= 0.0) {
            std::uintmax_t iters = 100;
            const auto [lo, hi] = boost::math::tools::toms748_solve(f, prev, th, fprev, fv, eps_tolerance<double>(50), iters);
            return {std::polar(1.0, 0.5 * (lo + hi)), 0.0, t};
        }
        if (fv < fprev) {
            // t(theta) turned over between prev - h and th; its maximum is t_gc.
            const auto [tmax_at, neg] = boost::math::tools::brent_find_minima(
                [&](double x) { return -t_reality(p, x); }, std::max(mu + 1e-9, prev - h), th, 40);
            if (-neg - t < 0.0) throw root_lost(fmt::format("no endpoint on the circle for t = {} beyond t_gc", t));
            std::uintmax_t iters = 100;
            const double flo = f(prev - h);
            const double a = flo < 0.0 ? prev - h : prev;
            const auto [lo, hi] =
                boost::math::tools::toms748_solve(f, a, tmax_at, f(a), -neg - t, eps_tolerance<double>(50), iters);
            return {std::polar(1.0, 0.5 * (lo + hi)), 0.0, t};
        }
        prev = th;
        fprev = fv;
    }
    throw root_lost(fmt::format("endpoint continuation failed at t = {}", t));
}

CatastropheData locate_catastrophe(const PhaseIntegral& p) {
    using boost::math::tools::eps_tolerance;
    const double mu = pole_arc_angle(p);
    // With t eliminated through H(alpha) = 0 only the reality condition is left.
    auto F = [&](double th) {
        AxisEndpoint ae(p, th);
        const auto [i0, i1] = ae.I_affine();
        return i0 + ae.t_of_H_zero() * i1;
    };
    const double h = 0.02;
    double best_theta = 0.0, best_t = std::numeric_limits<double>::infinity();
    double prev = mu + h, fprev = F(prev);
    for (double th = prev + h; th < pi - h; th += h) {
        double fv = 0.0;
        try {
            fv = F(th);
        } catch (const quadrature_failure&) {
            break;  // the reduction degenerates as theta approaches pi
        }
        if ((fv > 0.0) != (fprev > 0.0)) {
            std::uintmax_t iters = 100;
            const auto [lo, hi] = boost::math::tools::toms748_solve(F, prev, th, fprev, fv, eps_tolerance<double>(52), iters);
            const double root = 0.5 * (lo + hi);
            const double t = AxisEndpoint(p, root).t_of_H_zero();
            if (t > 0.0 && t < best_t) {
                best_t = t;
                best_theta = root;
            }
        }
        prev = th;
        fprev = fv;
    }
    if (!std::isfinite(best_t)) throw numeric_failure("no gradient catastrophe found on the t axis");

    CatastropheData c;
    c.theta = best_theta;
    c.t_gc = best_t;
    c.alpha_gc = std::polar(1.0, best_theta);
    const double sh = std::sin(0.5 * best_theta);
    c.m_gc = sh * sh;
    c.omega_gc = -pi / (2.0 * elliptic_K(c.m_gc));
    c.rho = rho(c.m_gc);

    AxisEndpoint ae(p, best_theta);
    c.H_residual = std::abs(ae.H_w(c.alpha_gc, best_t));
    c.I_residual = std::abs(ae.I(best_t));
    c.Hprime = ae.dH_w_at_alpha(best_t);
    if (std::abs(c.Hprime) < 1e-3) throw numeric_failure("catastrophe is not simple: |H'(alpha_gc)| < 1e-3");

    GFunction gf(p, {c.alpha_gc, 0.0, best_t});
    c.A = gf.A();
    c.B = gf.B();

    // |W'_gc| = |(5/4) f5|^{2/5} with f5 = -(1/5) H' e^{i pi/4} sqrt(2 sin theta).
    c.W_prime = std::pow(std::abs(0.25 * c.Hprime) * std::sqrt(2.0 * std::sin(best_theta)), 0.4);
    c.sigma = std::sqrt(c.W_prime);
    const double m = c.m_gc;
    c.a = -std::pow(m * (1.0 - m), 0.25) / (2.0 * c.sigma);
    c.b = -c.a * c.rho;
    c.M = 2.0 / c.sigma * std::pow(m / (1.0 - m), 0.25);

    try {
        const auto [re, im] = ae.Phi(best_t);
        if (std::abs(im) < 1e-8) c.Phi_gc = re;
    } catch (const quadrature_failure&) {
    }
    return c;
}

double phase_Phi(const PhaseIntegral& p, double t) {
    const EndpointState s = solve_alpha_on_circle(p, t);
    if (t == 0.0) return 0.0;
    const auto [re, im] = AxisEndpoint(p, std::arg(s.alpha)).Phi(t);
    if (std::abs(im) > 1e-8) throw numeric_failure(fmt::format("phase has imaginary residual {:.3e}", im));
    return re;
}

// ------------------------------------------------------------- sign charts

PhiField phi_field(const GFunction& g, const std::vector<double>& re_w, const std::vector<double>& im_w) {
    PhiField out{re_w, im_w, std::vector<double>(re_w.size() * im_w.size(), std::nan(""))};
    // Work on the distinct positive |Im w| rows; the lower half follows by symmetry.
    std::vector<double> rows;
    for (double y : im_w)
        if (y != 0.0) rows.push_back(std::abs(y));
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    const std::size_t nx = re_w.size(), ny = rows.size();
    if (nx == 0 || ny == 0) return out;

    const cplx alpha = g.state().alpha;
    auto node = [&](std::size_t i, std::size_t j) { return cplx(re_w[i], rows[j]); };
    auto usable = [&](cplx w) {
        for (cplx s : {alpha, std::polar(1.0, g.pole_arc()), cplx(1.0, 0.0), cplx(0.0, 0.0)})
            if (std::abs(w - s) < 1e-9) return false;
        return true;
    };
    auto edge = [&](cplx a, cplx b, bool singular, double& val) {
        try {
            val = leg_integral(Leg::segment(a, b), [&](cplx z, cplx d) { return singular ? g.phi_prime_at(z, d) : g.phi_prime(z); }, singular, 1e-10).real();
            return std::isfinite(val);
        } catch (const std::exception&) {
            return false;
        }
    };

    std::vector<double> half(nx * ny, std::nan(""));
    std::vector<std::size_t> order(nx * ny);
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(node(a % nx, a / nx) - alpha) < std::abs(node(b % nx, b / nx) - alpha);
    });
    std::deque<std::size_t> queue;
    auto flood = [&] {
        while (!queue.empty()) {
            const std::size_t k = queue.front();
            queue.pop_front();
            const std::size_t i = k % nx, j = k / nx;
            const cplx w = node(i, j);
            const std::pair<long, long> steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (auto [di, dj] : steps) {
                const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
                if (ii < 0 || jj < 0 || ii >= static_cast<long>(nx) || jj >= static_cast<long>(ny)) continue;
                const std::size_t kk = static_cast<std::size_t>(jj) * nx + static_cast<std::size_t>(ii);
                if (!std::isnan(half[kk])) continue;
                const cplx wn = node(ii, jj);
                double v = 0.0;
                if (!usable(wn) || g.crosses_cut(w, wn) || !edge(w, wn, false, v)) continue;
                half[kk] = half[k] + v;
                queue.push_back(kk);
            }
        }
    };
    for (std::size_t k : order) {
        const cplx w = node(k % nx, k / nx);
        double v = 0.0;
        if (!usable(w) || g.crosses_cut(alpha, w) || !edge(alpha, w, true, v)) continue;
        half[k] = v;
        queue.push_back(k);
        break;
    }
    flood();
    // Components the grid cannot enter (a lens narrower than the spacing) are
    // seeded by a planned path from alpha.
    if (std::abs(std::abs(alpha) - 1.0) < 1e-12) {
        for (std::size_t k : order) {
            if (!std::isnan(half[k])) continue;
            const cplx w = node(k % nx, k / nx);
            if (!usable(w)) continue;
            try {
                half[k] = g.re_phi(w);
            } catch (const std::exception&) {
                continue;
            }
            queue.push_back(k);
            flood();
        }
    }
    for (std::size_t j = 0; j < im_w.size(); ++j) {
        if (im_w[j] == 0.0) continue;
        const std::size_t row = std::lower_bound(rows.begin(), rows.end(), std::abs(im_w[j])) - rows.begin();
        for (std::size_t i = 0; i < nx; ++i) out.re_phi[j * nx + i] = half[row * nx + i];
    }
    return out;
}

void write_phi_csv(const PhiField& f, const std::string& path) {
    auto out = fmt::output_file(path);
    out.print("re_w,im_w,re_phi\n");
    for (std::size_t j = 0; j < f.im_w.size(); ++j)
        for (std::size_t i = 0; i < f.re_w.size(); ++i)
            out.print("{:.17g},{:.17g},{:.17g}\n", f.re_w[i], f.im_w[j], f.re_phi[j * f.re_w.size() + i]);
}

std::string catastrophe_json(const CatastropheData& c) {
    nlohmann::ordered_json j;
    j["theta"] = c.theta;
    j["t_gc"] = c.t_gc;
    j["m_gc"] = c.m_gc;
    j["omega_gc"] = c.omega_gc;
    j["rho"] = c.rho;
    j["A"] = c.A;
    j["B"] = c.B;
    j["Hprime_re"] = c.Hprime.real();
    j["Hprime_im"] = c.Hprime.imag();
    j["sigma"] = c.sigma;
    j["a"] = c.a;
    j["b"] = c.b;
    j["M"] = c.M;
    if (c.Phi_gc) j["Phi_gc"] = *c.Phi_gc;
    return j.dump(2);
}

}  // namespace fluxon
