#include "fluxon/defect.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <numbers>
#include <stdexcept>

#include "fluxon/parallel.hpp"
#include "fluxon/specfun.hpp"

namespace fluxon {

Defect::Defect(DefectParams p) : p_(p) {
    if (!(p.m > 0.0 && p.m < 1.0)) throw std::domain_error(fmt::format("defect modulus m = {} outside (0,1)", p.m));
    if (!std::isfinite(p.Omega)) throw std::domain_error("defect phase must be finite");
    K_ = elliptic_K(p.m);
    rho_ = rho(p.m);
    shift_ = 2.0 * K_ * p.Omega / std::numbers::pi;
    s1m_ = std::sqrt(1.0 - p.m);
    smm_ = std::sqrt(p.m * (1.0 - p.m));
}

DefectSample Defect::sample_with_p(double X, double T, double p) const {
    const double m = p_.m;
    const auto [sn, cn, dn] = jacobi(phase_arg(T), m);
    const double lin = (1.0 - m) * p - smm_ * rho_ * T;
    DefectSample s;
    s.q = -(sn * dn + lin * cn) / (2.0 * s1m_);
    s.r = (m - dn * dn - m * (1.0 - m) * X * X - lin * lin) / (4.0 * smm_);
    const double n2 = s.q * s.q + s.r * s.r;
    const double c = (s.r * s.r - s.q * s.q) / n2, si = 2.0 * s.q * s.r / n2;
    s.R = {{{c, -si}, {si, c}}};
    const double C = dn, S = -std::sqrt(m) * sn;
    s.cos_half = c * C - si * S;
    s.sin_half = si * C + c * S;
    return s;
}

DefectSample Defect::sample(double X, double T) const { return sample_with_p(X, T, p_periodic(phase_arg(T), p_.m)); }

std::pair<double, double> Defect::q_r(double X, double T) const {
    const auto s = sample(X, T);
    return {s.q, s.r};
}

DefectGrid defect_grid(const Defect& d, const std::vector<double>& X, const std::vector<double>& T) {
    DefectGrid g{d.params(), X, T, std::vector<double>(X.size() * T.size()), std::vector<double>(X.size() * T.size())};
    parallel_for(T.size(), [&](std::size_t j) {
        const double p = p_periodic(d.phase_arg(T[j]), d.params().m);
        for (std::size_t i = 0; i < X.size(); ++i) {
            const auto s = d.sample_with_p(X[i], T[j], p);
            g.cos_half[j * X.size() + i] = s.cos_half;
            g.sin_half[j * X.size() + i] = s.sin_half;
        }
    });
    return g;
}

double pde_residual(const Defect& d, double L, double h) {
    const int n = static_cast<int>(std::lround(2.0 * L / h)) + 1;
    std::vector<double> axis(n);
    for (int k = 0; k < n; ++k) axis[k] = -L + k * h;
    const auto g = defect_grid(d, axis, axis);
    std::vector<double> U(g.cos_half.size());
    for (std::size_t k = 0; k < U.size(); ++k) U[k] = 2.0 * std::atan2(g.sin_half[k], g.cos_half[k]);
    // The half angles fix U modulo 4 pi; neighbours differ by far less.
    auto rel = [&](std::size_t a, std::size_t c) {
        const double two_pi = 2.0 * std::numbers::pi;
        return std::remainder(U[a] - U[c], 2.0 * two_pi);
    };
    double worst = 0.0;
    for (int j = 1; j + 1 < n; ++j) {
        for (int i = 1; i + 1 < n; ++i) {
            const std::size_t c = static_cast<std::size_t>(j) * n + i;
            const double utt = (rel(c + n, c) + rel(c - n, c)) / (h * h);
            const double uxx = (rel(c + 1, c) + rel(c - 1, c)) / (h * h);
            worst = std::max(worst, std::abs(utt - uxx + sin_full(g.cos_half[c], g.sin_half[c])));
        }
    }
    return worst;
}

void write_defect_csv(const DefectGrid& g, const std::string& path) {
    auto out = fmt::output_file(path);
    out.print("X,T,cos_half,sin_half,cos_u\n");
    for (std::size_t j = 0; j < g.T.size(); ++j) {
        for (std::size_t i = 0; i < g.X.size(); ++i) {
            const std::size_t k = j * g.X.size() + i;
            out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", g.X[i], g.T[j], g.cos_half[k], g.sin_half[k],
                      cos_full(g.cos_half[k], g.sin_half[k]));
        }
    }
}

std::string defect_json(const DefectParams& p) {
    nlohmann::ordered_json j;
    j["m"] = p.m;
    j["Omega"] = p.Omega;
    return j.dump(2);
}

std::string defect_json(const DefectGrid& g) {
    nlohmann::ordered_json j;
    j["m"] = g.params.m;
    j["Omega"] = g.params.Omega;
    j["nX"] = g.X.size();
    j["nT"] = g.T.size();
    return j.dump(2);
}

std::vector<std::string> defect_catalog(const std::vector<double>& ms, double L, int n, const std::string& dir) {
    if (n < 2) throw std::domain_error("catalog grids need at least two points per axis");
    std::filesystem::create_directories(dir);
    std::vector<double> axis(n);
    for (int k = 0; k < n; ++k) axis[k] = -L + 2.0 * L * k / (n - 1);
    std::vector<std::string> paths;
    for (double m : ms) {
        for (int k = 0; k < 4; ++k) {
            const DefectParams p{m, k * std::numbers::pi / 3.0};
            const std::string stem = fmt::format("{}/defect_m{:.6f}_omega{}pi3", dir, m, k);
            const auto g = defect_grid(Defect(p), axis, axis);
            write_defect_csv(g, stem + ".csv");
            fmt::output_file(stem + ".json").print("{}\n", defect_json(g));
            paths.push_back(stem + ".csv");
        }
    }
    return paths;
}

}  // namespace fluxon
