#include "fluxon/condensate.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <cmath>
#include <json.hpp>
#include <numbers>

#include "fluxon/dense_lu.hpp"
#include "fluxon/parallel.hpp"

namespace fluxon {

namespace {
constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};
// Below this double-precision estimate the solve is repeated in double-double.
constexpr double extended_rcond = 1e-6;
// Double-double keeps roughly 32 - log10(1/rcond) digits.
constexpr double min_extended_rcond = 1e-31;
}  // namespace

std::vector<double> bohr_sommerfeld(const PhaseIntegral& p, int N, double epsilon) {
    const double v0 = p.v0();
    std::vector<double> v(N);
    for (int k = 0; k < N; ++k) {
        const double target = pi * epsilon * (k + 0.5);
        auto f = [&](double vv) { return p.psi_imag(vv) - target; };
        double lo = 0.0, hi = v0;
        double flo = f(lo), fhi = f(hi);
        if (!(flo > 0.0 && fhi < 0.0)) throw numeric_failure("Bohr-Sommerfeld root is not bracketed");
        // Bisection to a tight bracket, then secant steps on it.
        for (int it = 0; it < 200 && hi - lo > 1e-14 * v0; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if (fm > 0.0) lo = mid, flo = fm;
            else hi = mid, fhi = fm;
        }
        double x = lo - flo * (hi - lo) / (fhi - flo);
        for (int it = 0; it < 4; ++it) {
            const double fx = f(x);
            if (std::abs(fx) < 1e-15) break;
            const double h = 1e-9 * v0;
            x -= fx * h / (f(x + h) - fx);
        }
        if (std::abs(f(x)) > 1e-12) throw numeric_failure("Bohr-Sommerfeld residual above 1e-12");
        v[k] = x;
    }
    for (int k = 1; k < N; ++k)
        if (!(v[k] < v[k - 1])) throw numeric_failure("eigenvalues are not strictly ordered");
    return v;
}

std::pair<cplx, cplx> pole_preimages(double v) {
    if (!(v > 0.0 && v < 0.5)) throw std::domain_error("pole preimages need 0 < -i lambda < 1/2");
    // On |w| = 1, w = e^{i psi}: E = (i/2) sin(psi/2).
    const cplx w = std::polar(1.0, 2.0 * std::asin(2.0 * v));
    return {w, std::conj(w)};
}

namespace {

// sqrt(-y) for the unfolded pole z (z^2 = y, Im z > 0): sqrt(-y) = -i z.
cplx E_from_z(cplx z) { return 0.25 * (z - 1.0 / z); }
cplx D_from_z(cplx z) { return 0.25 * (z + 1.0 / z); }
cplx dEdw_from_z(cplx z) {
    const cplx s = -I * z;
    return -0.125 * I * (1.0 / s - 1.0 / (s * s * s));
}

}  // namespace

SpectralData build_spectral_data(const PhaseIntegral& p, int N) {
    if (N < 1) throw std::domain_error("N must be positive");
    if (N > condensate_max_N) throw cap_exceeded(fmt::format("N = {} exceeds the double-precision cap {}", N, condensate_max_N));
    SpectralData sd;
    sd.N = N;
    sd.epsilon = epsilon_N(p, N);
    sd.v = bohr_sommerfeld(p, N, sd.epsilon);
    for (int k = 0; k < N; ++k) {
        const auto [w, wc] = pole_preimages(sd.v[k]);
        sd.w.push_back(w);
        sd.gamma.push_back(k % 2 == 0 ? -1 : 1);
        const double c = std::sqrt(1.0 - 4.0 * sd.v[k] * sd.v[k]);
        const cplx zk(c, 2.0 * sd.v[k]);
        sd.z.push_back(zk);
        sd.z.push_back(-std::conj(zk));
    }
    for (int k = 0; k < N; ++k) {
        // log of prod_{j != k} (lambda_k + lambda_j)/(lambda_k - lambda_j), all factors real.
        cplx log_prod = 0.0;
        for (int j = 0; j < N; ++j) {
            if (j == k) continue;
            log_prod += std::log(cplx((sd.v[k] + sd.v[j]) / (sd.v[k] - sd.v[j])));
        }
        const cplx lam(0.0, sd.v[k]);
        for (int m = 0; m < 2; ++m) {
            const cplx z = sd.z[2 * k + m];
            sd.log_c0.push_back(std::log(cplx(sd.gamma[k])) + std::log(2.0 * lam / dEdw_from_z(z)) + log_prod);
        }
    }
    return sd;
}

namespace {
cplx log_residue(const SpectralData& sd, int idx, double x, double t) {
    const cplx z = sd.z[idx];
    const cplx Q = E_from_z(z) * x + D_from_z(z) * t;
    return sd.log_c0[idx] + 2.0 * I * Q / sd.epsilon;
}
}  // namespace

std::pair<double, double> residue_constant(const SpectralData& sd, int k, bool conj_member, double x, double t) {
    if (k < 0 || k >= sd.N) throw std::out_of_range("residue_constant: k out of range");
    const cplx lc = log_residue(sd, 2 * k + (conj_member ? 1 : 0), x, t);
    if (lc.real() > sd.log_bound) throw numeric_failure("residue constant overflows the configured bound");
    return {lc.real(), std::remainder(lc.imag(), 2.0 * pi)};
}

namespace {

// xi = u + i v and eta = u - i v decouple the residue equations
//   u_p - kappa_p sum_q v_q/(p+q) = 0,  v_p + kappa_p sum_q u_q/(p+q) = kappa_p
// into (I + s i K C) y = s i kappa with C_pq = 1/(p+q) and s = +1 (xi), -1 (eta).
// Rows with |kappa| > 1 are divided by kappa; columns are scaled by powers of two
// so that no entry is rounded beyond what the working type itself does.
template <class T>
struct HalfSystem {
    std::vector<T> y;
    double rcond = 0.0;
};

template <class T>
HalfSystem<T> solve_half(const std::vector<cplx>& z, const std::vector<cplx>& lk, double sign) {
    const std::size_t P = z.size();
    std::vector<T> a(P * P), rhs(P);
    const T si(cplx(0.0, sign));
    for (std::size_t p = 0; p < P; ++p) {
        const bool big = lk[p].real() > 0.0;
        const T off = big ? si : si * T(std::exp(lk[p]));
        for (std::size_t q = 0; q < P; ++q) a[p * P + q] = off / (T(z[p]) + T(z[q]));
        a[p * P + p] += big ? T(std::exp(-lk[p])) : T(1.0);
        rhs[p] = off;
    }
    std::vector<double> scale(P);
    for (std::size_t q = 0; q < P; ++q) {
        double m = 0.0;
        for (std::size_t p = 0; p < P; ++p) m = std::max(m, std::abs(lu_detail::to_std(a[p * P + q])));
        scale[q] = std::ldexp(1.0, -std::ilogb(m));
        const T sq(scale[q]);
        for (std::size_t p = 0; p < P; ++p) a[p * P + q] = a[p * P + q] * sq;
    }
    DenseLU<T> lu(std::move(a), P);
    HalfSystem<T> out;
    out.rcond = lu.rcond();
    if (out.rcond > 0.0) {
        lu.solve(rhs);
        for (std::size_t q = 0; q < P; ++q) rhs[q] = rhs[q] * T(scale[q]);
    }
    out.y = std::move(rhs);
    return out;
}

template <class T>
CondensateEvaluator::Residues combine(const HalfSystem<T>& xi, const HalfSystem<T>& eta, const std::vector<cplx>& z,
                                      bool extended) {
    const std::size_t P = z.size();
    CondensateEvaluator::Residues r;
    r.u.resize(P);
    r.v.resize(P);
    r.rcond = std::min(xi.rcond, eta.rcond);
    r.extended = extended;
    T f11(1.0), f21(0.0);
    const T half(0.5), mhalfi(cplx(0.0, -0.5));
    for (std::size_t p = 0; p < P; ++p) {
        const T u = half * (xi.y[p] + eta.y[p]);
        const T v = mhalfi * (xi.y[p] - eta.y[p]);
        r.u(p) = lu_detail::to_std(u);
        r.v(p) = lu_detail::to_std(v);
        const T zp(z[p]);
        f11 -= u / zp;
        f21 -= v / zp;
    }
    r.f11 = lu_detail::to_std(f11);
    r.f21 = lu_detail::to_std(f21);
    return r;
}

}  // namespace

CondensateEvaluator::Residues CondensateEvaluator::solve(double x, double t) const {
    const int P = 2 * sd_.N;
    std::vector<cplx> lk(P);  // log kappa_p, kappa_p = c_p / (2p)
    for (int p = 0; p < P; ++p) {
        lk[p] = log_residue(sd_, p, x, t) - std::log(2.0 * sd_.z[p]);
        if (std::abs(lk[p].real()) > sd_.log_bound) throw numeric_failure("residue constant overflows the configured bound");
    }
    // For x < 0 the exponentials grow where they decay for x > 0, so every pole
    // has its residue triangularity reversed: with b(z) = prod_q (z - q)/(z + q),
    // Ft = F diag(b, 1/b) has first-column poles at -p with constants
    // 1/(kappa_p b'(p)^2), the same algebraic form. b(0) = 1 as P is even.
    std::vector<cplx> nodes = sd_.z;
    const bool flipped = x < 0.0;
    if (flipped) {
        for (int p = 0; p < P; ++p) {
            const cplx zp = sd_.z[p];
            cplx logdb = -std::log(2.0 * zp);
            for (int q = 0; q < P; ++q)
                if (q != p) logdb += std::log((zp - sd_.z[q]) / (zp + sd_.z[q]));
            lk[p] = -lk[p] - 2.0 * logdb;
            nodes[p] = -zp;
        }
    }
    auto finish = [&](Residues r) {
        r.nodes = nodes;
        r.flipped = flipped;
        return r;
    };
    {
        const auto xi = solve_half<cplx>(nodes, lk, 1.0);
        const auto eta = solve_half<cplx>(nodes, lk, -1.0);
        if (std::min(xi.rcond, eta.rcond) >= extended_rcond) return finish(combine(xi, eta, nodes, false));
    }
    const auto xi = solve_half<dd::cplx>(nodes, lk, 1.0);
    const auto eta = solve_half<dd::cplx>(nodes, lk, -1.0);
    auto r = combine(xi, eta, nodes, true);
    if (!(r.rcond > min_extended_rcond))
        throw numeric_failure(fmt::format("condensate system is singular to working precision (rcond {:.3e})", r.rcond));
    return finish(std::move(r));
}

CondensateSolution CondensateEvaluator::evaluate(double x, double t) const {
    const auto r = solve(x, t);
    CondensateSolution out;
    out.cos_half = r.f11.real();
    out.sin_half = r.f21.real();
    out.H0 << out.cos_half, -out.sin_half, out.sin_half, out.cos_half;
    out.rcond = r.rcond;
    out.extended_precision = r.extended;
    out.imag_residual = std::max(std::abs(r.f11.imag()), std::abs(r.f21.imag()));
    return out;
}

Eigen::Matrix2cd CondensateEvaluator::H_at(cplx w, double x, double t) const {
    const auto r = solve(x, t);
    const cplx z = I * sqrt_neg(w);
    Eigen::Matrix2cd F = Eigen::Matrix2cd::Identity();
    cplx bz = 1.0;
    for (int p = 0; p < 2 * sd_.N; ++p) {
        const cplx s = r.nodes[p];
        const cplx a = 1.0 / (z - s), b = 1.0 / (z + s);
        F(0, 0) += r.u(p) * a;
        F(1, 0) += r.v(p) * a;
        F(0, 1) += r.v(p) * b;
        F(1, 1) -= r.u(p) * b;
        if (r.flipped) bz *= (z - sd_.z[p]) / (z + sd_.z[p]);
    }
    F.col(0) /= bz;
    F.col(1) *= bz;
    return F;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

FieldGrid grid_evaluate(const CondensateEvaluator& ev, const std::vector<double>& x, const std::vector<double>& t) {
    FieldGrid g;
    g.x = x;
    g.t = t;
    const std::size_t n = x.size() * t.size();
    g.cos_half.assign(n, 0.0);
    g.sin_half.assign(n, 0.0);
    std::vector<char> failed(n, 0);
    parallel_for(n, [&](std::size_t i) {
        try {
            const auto s = ev.evaluate(x[i % x.size()], t[i / x.size()]);
            g.cos_half[i] = s.cos_half;
            g.sin_half[i] = s.sin_half;
        } catch (const std::exception&) {
            g.cos_half[i] = g.sin_half[i] = std::nan("");
            failed[i] = 1;
        }
    });
    for (char f : failed) g.failures += f;
    return g;
}

void write_field_csv(const FieldGrid& g, const std::string& path, const std::string& xname, const std::string& tname) {
    auto out = fmt::output_file(path);
    out.print("{},{},cos_half,sin_half,cos_u\n", xname, tname);
    for (std::size_t j = 0; j < g.nt(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const std::size_t k = j * g.nx() + i;
            out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", g.x[i], g.t[j], g.cos_half[k], g.sin_half[k], g.cos_u(k));
        }
}

std::string field_json(const FieldGrid& g, const std::string& profile, int N, double epsilon, const std::string& frame) {
    nlohmann::ordered_json j;
    j["profile"] = profile;
    j["N"] = N;
    j["epsilon"] = epsilon;
    j["frame"] = frame;
    j["ranges"] = {{"x", {g.x.front(), g.x.back()}}, {"t", {g.t.front(), g.t.back()}}};
    j["nx"] = g.nx();
    j["nt"] = g.nt();
    j["failures"] = g.failures;
    return j.dump(2);
}

}  // namespace fluxon
