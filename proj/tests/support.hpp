#pragma once

// Finite-difference checks shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace fluxon::testing {

// Half angles at a point, as (cos(u/2), sin(u/2)).
using HalfAngleFn = std::function<std::pair<double, double>(double, double)>;

// u(x+dx) - u(x) from half angles, valid while |du| < 2 pi.
inline double angle_step(std::pair<double, double> from, std::pair<double, double> to) {
    // u/2 difference = arg(to * conj(from)).
    const double c = to.first * from.first + to.second * from.second;
    const double s = to.second * from.first - to.first * from.second;
    return 2.0 * std::atan2(s, c);
}

// max |eps^2 (u_tt - u_xx) + sin u| over the given centres, with 5-point stencils of step h.
inline double sine_gordon_residual(const HalfAngleFn& f, double eps, double h,
                                   const std::vector<std::pair<double, double>>& centres) {
    double worst = 0.0;
    for (const auto& [x, t] : centres) {
        const auto c = f(x, t);
        const double u_xx = (angle_step(c, f(x + h, t)) + angle_step(c, f(x - h, t))) / (h * h);
        const double u_tt = (angle_step(c, f(x, t + h)) + angle_step(c, f(x, t - h))) / (h * h);
        const double sin_u = 2.0 * c.first * c.second;
        worst = std::max(worst, std::abs(eps * eps * (u_tt - u_xx) + sin_u));
    }
    return worst;
}

// Ratios r(h)/r(h/2) for successive halvings.
inline std::vector<double> richardson_ratios(const std::vector<double>& residuals) {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < residuals.size(); ++k) out.push_back(residuals[k] / residuals[k + 1]);
    return out;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    return lines;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / ("fluxon_test_" + name);
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace fluxon::testing
