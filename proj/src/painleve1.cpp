#include "fluxon/painleve1.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>

#include "fluxon/parallel.hpp"

namespace fluxon {

namespace {
constexpr double pi = std::numbers::pi;

// Taylor coefficients of y about s.tau from the recurrence of y'' = 6y^2 + tau.
std::vector<cplx> taylor(const PIState& s, int order) {
    std::vector<cplx> a(order + 1);
    a[0] = s.y;
    a[1] = s.yprime;
    for (int n = 0; n + 2 <= order; ++n) {
        cplx conv = 0.0;
        for (int k = 0; k <= n; ++k) conv += a[k] * a[n - k];
        cplx rhs = 6.0 * conv;
        if (n == 0) rhs += s.tau;
        if (n == 1) rhs += 1.0;
        a[n + 2] = rhs / static_cast<double>((n + 1) * (n + 2));
    }
    return a;
}

// Root-test estimate, conservative for the double poles of y.
double radius_estimate(const std::vector<cplx>& a) {
    const int N = static_cast<int>(a.size()) - 1;
    double rho = std::numeric_limits<double>::infinity();
    for (int n = N - 5; n <= N; ++n) {
        const double m = std::abs(a[n]);
        if (m > 0.0) rho = std::min(rho, std::pow(m, -1.0 / n));
    }
    return rho;
}

// For y ~ (tau_p - tau)^{-2}: a_{N-1}/a_N = d N/(N+1).
cplx pole_estimate(const PIState& s, const std::vector<cplx>& a) {
    const int N = static_cast<int>(a.size()) - 1;
    return s.tau + a[N - 1] / a[N] * (static_cast<double>(N + 1) / N);
}

PIState advance(const PIState& s, const std::vector<cplx>& a, cplx d) {
    cplx y = 0.0, yp = 0.0, h = 0.0;
    for (int n = static_cast<int>(a.size()) - 1; n >= 0; --n) {
        y = y * d + a[n];
        h = h * d + a[n] / static_cast<double>(n + 1);
        if (n >= 1) yp = yp * d + a[n] * static_cast<double>(n);
    }
    return {s.tau + d, y, yp, s.h + h * d};
}

cplx hamiltonian(cplx tau, cplx y, cplx yp) { return -0.5 * yp * yp + 2.0 * y * y * y + tau * y; }
}  // namespace

PIState tritronquee_init(cplx tau0, const PainleveConfig& cfg) {
    if (std::abs(tau0) < cfg.R_min * (1.0 - 1e-12))
        throw std::domain_error(fmt::format("asymptotic data needs |tau0| >= {}", cfg.R_min));
    const cplx s = -tau0;
    if (std::abs(std::arg(s)) > 0.8 * pi - 0.05) throw std::domain_error("tau0 lies outside the pole-free sector");
    // y = -(s/6)^{1/2} (1 + c1 s^{-5/2} + c2 s^{-5}), s = -tau.
    const double a = 1.0 / std::sqrt(6.0);
    const double c1 = 1.0 / (8.0 * std::sqrt(6.0)), c2 = -49.0 / 768.0;
    const cplx r = std::sqrt(s);
    const cplx y = -a * (r + c1 / (s * s) + c2 / (s * s * s * s * r));
    const cplx dy_ds = -a * (0.5 / r - 2.0 * c1 / (s * s * s) - 4.5 * c2 / (s * s * s * s * s * r));
    const cplx yp = -dy_ds;
    return {tau0, y, yp, hamiltonian(tau0, y, yp)};
}

PIState continue_path(PIState s, const std::vector<cplx>& path, const PainleveConfig& cfg) {
    for (cplx target : path) {
        for (int steps = 0;; ++steps) {
            const cplx rem = target - s.tau;
            if (std::abs(rem) == 0.0) break;
            if (steps > 1000000) throw numeric_failure("Taylor continuation exceeded its step budget");
            const auto a = taylor(s, cfg.order);
            const double rho = radius_estimate(a);
            if (rho < cfg.min_radius)
                throw pole_proximity(fmt::format("path meets a pole near tau = {:.6f}", s.tau.real()),
                                     pole_estimate(s, a));
            const double scale = std::max(1.0, std::abs(s.y));
            const double trunc = std::abs(a.back()) > 0.0
                                     ? std::pow(cfg.step_tol * scale / std::abs(a.back()), 1.0 / cfg.order)
                                     : rho;
            const double h = std::min(0.5 * rho, trunc);
            const double len = std::abs(rem);
            s = advance(s, a, len <= h ? rem : rem * (h / len));
            if (len <= h) {
                s.tau = target;
                break;
            }
        }
    }
    return s;
}

double sigma_form_residual(const PIState& s) {
    // h' = y and h'' = y'.
    const cplx hp = s.y, hpp = s.yprime;
    const cplx r = hpp * hpp + 2.0 * s.h - 4.0 * hp * hp * hp - 2.0 * s.tau * hp;
    const double scale = std::norm(hpp) + 2.0 * std::abs(s.h) + 4.0 * std::pow(std::abs(hp), 3) +
                         2.0 * std::abs(s.tau * hp);
    return std::abs(r) / std::max(scale, 1.0);
}

cplx laurent_h(cplx tau_p, cplx h0, cplx tau, int order) {
    // y = u^{-2} sum c_k u^k with c_6 fixed by h0; h_n = c_{n+1}/n.
    std::vector<cplx> c(order + 2, 0.0);
    c[0] = 1.0;
    if (order + 1 >= 4) c[4] = -tau_p / 10.0;
    if (order + 1 >= 5) c[5] = -1.0 / 6.0;
    const cplx h3 = -tau_p / 30.0;
    if (order + 1 >= 6) c[6] = (2.0 * h0 + 36.0 * h3 * h3) / 28.0;
    for (int k = 7; k <= order + 1; ++k) {
        cplx conv = 0.0;
        for (int i = 1; i < k; ++i) conv += c[i] * c[k - i];
        c[k] = 6.0 * conv / static_cast<double>((k - 6) * (k + 1));
    }
    const cplx u = tau - tau_p;
    cplx h = -1.0 / u + h0, un = 1.0;
    for (int n = 1; n <= order; ++n) {
        un *= u;
        h += c[n + 1] / static_cast<double>(n) * un;
    }
    return h;
}

PIState tritronquee_in_sector(cplx tau, const PainleveConfig& cfg) {
    // Linearized perturbations behave like exp(+-i c s^{5/4}), s = -tau, so they
    // neither grow nor decay along Im s^{5/4} = const. Follow that level curve in
    // from |s| = R_min.
    const cplx s_t = tau == 0.0 ? cplx(0.0) : -tau;
    if (std::abs(std::arg(s_t)) > 0.8 * pi - 0.05) throw std::domain_error("tau lies outside the pole-free sector");
    const cplx z_t = std::pow(s_t, 1.25);
    const double Y = z_t.imag();
    const double Z0 = std::pow(cfg.R_min, 1.25);
    if (std::abs(Y) >= 0.5 * Z0) throw std::domain_error("tau is too far out for the asymptotic data");
    const double u0 = std::sqrt(Z0 * Z0 - Y * Y);
    auto on_curve = [&](double u) { return -std::pow(cplx(u, Y), 0.8); };
    // Vertices dense enough that the chords stay close to the curve.
    std::vector<cplx> path;
    const double u_t = z_t.real();
    const int nv = 200;
    for (int k = 1; k < nv; ++k) {
        const double f = static_cast<double>(k) / nv;
        path.push_back(on_curve(u_t + (u0 - u_t) * (1.0 - f) * (1.0 - f)));
    }
    path.push_back(tau);
    return continue_path(tritronquee_init(on_curve(u0), cfg), path, cfg);
}

// ------------------------------------------------------------ lattice field

Tritronquee::Tritronquee(double R, PainleveConfig cfg) : R_(R), cfg_(cfg) {
    if (!(R > 0.0)) throw std::domain_error("pole field radius must be positive");
    if (R > cfg.max_radius) throw cap_exceeded(fmt::format("pole field radius {} exceeds the cap {}", R, cfg.max_radius));
    build_lattice();
    find_poles();
}

cplx Tritronquee::node_tau(long i, long j) const {
    const long m = (n_ - 1) / 2;
    return {static_cast<double>(i - m) * cfg_.spacing, static_cast<double>(j - m) * cfg_.spacing};
}

void Tritronquee::build_lattice() {
    const long m = static_cast<long>(std::ceil((R_ + 1.0) / cfg_.spacing));
    n_ = 2 * m + 1;
    nodes_.assign(static_cast<std::size_t>(n_ * n_), Node{});
    const double d = cfg_.spacing;

    auto settle = [&](long i, long j, const PIState& st) {
        Node& nd = nodes_[index(i, j)];
        nd.s = st;
        nd.reached = true;
        const auto a = taylor(st, cfg_.order);
        nd.rho = radius_estimate(a);
        if (nd.rho < 1.5 * d) seeds_.push_back(pole_estimate(st, a));
    };
    // Anchors: every node well inside the pole-free sector, each on its own
    // neutral path. The rest of the lattice is reached from them.
    std::vector<std::pair<long, long>> anchors;
    for (long j = 0; j < n_; ++j)
        for (long i = 0; i < n_; ++i)
            if (std::abs(std::arg(-node_tau(i, j))) <= 0.8 * pi - 0.25) anchors.emplace_back(i, j);
    std::vector<std::optional<PIState>> anchored(anchors.size());
    parallel_for(anchors.size(), [&](std::size_t k) {
        try {
            anchored[k] = tritronquee_in_sector(node_tau(anchors[k].first, anchors[k].second), cfg_);
        } catch (const pole_proximity&) {
        }
    });
    std::deque<std::pair<long, long>> queue;
    for (std::size_t k = 0; k < anchors.size(); ++k) {
        if (!anchored[k]) continue;
        settle(anchors[k].first, anchors[k].second, *anchored[k]);
        queue.push_back(anchors[k]);
    }
    while (!queue.empty()) {
        const auto [i, j] = queue.front();
        queue.pop_front();
        const Node& nd = nodes_[index(i, j)];
        // The straight step stays inside the disk of convergence.
        if (d > 0.8 * nd.rho) continue;
        const std::pair<long, long> steps[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto [di, dj] : steps) {
            const long ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= n_ || jj >= n_ || nodes_[index(ii, jj)].reached) continue;
            try {
                settle(ii, jj, continue_path(nd.s, {node_tau(ii, jj)}, cfg_));
            } catch (const pole_proximity&) {
                continue;
            }
            queue.emplace_back(ii, jj);
        }
    }
}

PIState Tritronquee::evaluate(cplx tau) const {
    // The solution is real on the real axis; use the symmetry exactly.
    if (tau.imag() < 0.0) {
        const PIState u = evaluate_upper(std::conj(tau));
        return {tau, std::conj(u.y), std::conj(u.yprime), std::conj(u.h)};
    }
    PIState s = evaluate_upper(tau);
    if (tau.imag() == 0.0) {
        s.y.imag(0.0);
        s.yprime.imag(0.0);
        s.h.imag(0.0);
    }
    return s;
}

PIState Tritronquee::evaluate_upper(cplx tau) const {
    const long m = (n_ - 1) / 2;
    const long ci = std::lround(tau.real() / cfg_.spacing) + m, cj = std::lround(tau.imag() / cfg_.spacing) + m;
    if (ci < 0 || cj < 0 || ci >= n_ || cj >= n_)
        throw std::domain_error(fmt::format("tau = {}{:+}i lies outside the computed field", tau.real(), tau.imag()));
    // Nodes whose disk of convergence covers tau come first, then the nearest.
    std::vector<std::pair<double, const Node*>> cand;
    for (long j = std::max(0L, cj - 3); j <= std::min(n_ - 1, cj + 3); ++j) {
        for (long i = std::max(0L, ci - 3); i <= std::min(n_ - 1, ci + 3); ++i) {
            const Node& nd = nodes_[index(i, j)];
            if (!nd.reached) continue;
            const double dist = std::abs(tau - nd.s.tau);
            cand.emplace_back(dist < 0.8 * nd.rho ? dist - 1e3 : dist, &nd);
        }
    }
    std::sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::optional<pole_proximity> last;
    for (std::size_t k = 0; k < std::min<std::size_t>(cand.size(), 4); ++k) {
        try {
            return continue_path(cand[k].second->s, {tau}, cfg_);
        } catch (const pole_proximity& e) {
            last = e;
        }
    }
    if (last) throw *last;
    throw pole_proximity("no lattice node near tau was reached", tau);
}

PoleRecord Tritronquee::locate_pole(cplx seed) const {
    cplx tau = seed;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        PIState s;
        try {
            s = evaluate(tau);
        } catch (const pole_proximity&) {
            converged = true;  // closer than the minimum radius
            break;
        }
        // Newton on 1/h, whose derivative is -y/h^2.
        const cplx step = s.h / s.y;
        tau += step;
        if (!std::isfinite(std::abs(tau)) || std::abs(tau - seed) > 0.5) break;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(tau))) {
            converged = true;
            break;
        }
    }
    if (!converged || std::abs(tau - seed) > 0.5) throw numeric_failure("Newton iteration for a pole diverged");
    if (std::abs(tau.imag()) < 1e-8) tau.imag(0.0);

    // Cauchy integrals of h and h/(tau - tau_p) on a circle of radius r.
    const int npts = 64;
    const double r = 0.15;
    PIState s = evaluate(tau + r);
    cplx mean = 0.0, res = 0.0;
    for (int k = 0; k < npts; ++k) {
        const cplx e = std::polar(1.0, 2.0 * pi * k / npts);
        if (k > 0) s = continue_path(s, {tau + r * e}, cfg_);
        mean += s.h;
        res += s.h * r * e;
    }
    PoleRecord p{tau, mean / static_cast<double>(npts), std::abs(res / static_cast<double>(npts) + 1.0)};
    if (p.residue_check > 1e-4) throw numeric_failure("located singularity is not a simple pole of h with residue -1");
    return p;
}

void Tritronquee::find_poles() {
    // Cluster the seeds, refine each cluster once, and keep the upper half plane.
    std::vector<cplx> reps;
    for (cplx s : seeds_) {
        if (s.imag() < -0.5 * cfg_.spacing) continue;
        if (std::none_of(reps.begin(), reps.end(), [&](cplx r) { return std::abs(r - s) < 0.5 * cfg_.spacing; }))
            reps.push_back(s);
    }
    std::vector<PoleRecord> found;
    for (cplx s : reps) {
        try {
            PoleRecord p = locate_pole(s);
            if (p.tau_p.imag() < 0.0) continue;
            if (std::none_of(found.begin(), found.end(), [&](const PoleRecord& q) { return std::abs(q.tau_p - p.tau_p) < 1e-6; }))
                found.push_back(p);
        } catch (const numeric_failure&) {
            ++unmatched_;
        } catch (const std::domain_error&) {
            // The refinement contour left the lattice: a pole beyond the radius.
            if (std::abs(s) < R_) ++unmatched_;
        }
    }
    for (const auto& p : found) {
        if (std::abs(p.tau_p) > R_) continue;
        poles_.push_back(p);
        if (p.tau_p.imag() != 0.0) poles_.push_back({std::conj(p.tau_p), std::conj(p.h0), p.residue_check});
    }
    std::sort(poles_.begin(), poles_.end(), [](const PoleRecord& a, const PoleRecord& b) {
        return a.tau_p.real() != b.tau_p.real() ? a.tau_p.real() < b.tau_p.real() : a.tau_p.imag() < b.tau_p.imag();
    });
}

HGrid h_grid(const Tritronquee& field, const std::vector<double>& re_tau, const std::vector<double>& im_tau,
             double exclusion) {
    HGrid g{re_tau, im_tau, std::vector<cplx>(re_tau.size() * im_tau.size())};
    const double nan = std::nan("");
    parallel_for(g.h.size(), [&](std::size_t k) {
        const cplx tau(re_tau[k % re_tau.size()], im_tau[k / re_tau.size()]);
        for (const auto& p : field.poles()) {
            if (std::abs(tau - p.tau_p) < exclusion) {
                g.h[k] = cplx(nan, nan);
                return;
            }
        }
        try {
            g.h[k] = field.evaluate(tau).h;
        } catch (const std::exception&) {
            g.h[k] = cplx(nan, nan);
        }
    });
    return g;
}

void write_pole_csv(const std::vector<PoleRecord>& poles, const std::string& path) {
    auto out = fmt::output_file(path);
    out.print("re_tau,im_tau,re_h0,im_h0,residue_check\n");
    for (const auto& p : poles)
        out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.3e}\n", p.tau_p.real(), p.tau_p.imag(), p.h0.real(), p.h0.imag(),
                  p.residue_check);
}

void write_h_grid_csv(const HGrid& g, const std::string& path) {
    auto out = fmt::output_file(path);
    out.print("re_tau,im_tau,re_h,im_h\n");
    for (std::size_t k = 0; k < g.h.size(); ++k)
        out.print("{:.17g},{:.17g},{:.17g},{:.17g}\n", g.re_tau[k % g.re_tau.size()], g.im_tau[k / g.re_tau.size()],
                  g.h[k].real(), g.h[k].imag());
}

}  // namespace fluxon
