#pragma once

#include <array>
#include <string>
#include <vector>

namespace fluxon {

struct DefectParams {
    double m = 0.5;      // 0 < m < 1
    double Omega = 0.0;  // phase, mod 2 pi
};

struct DefectSample {
    double cos_half = 1.0, sin_half = 0.0;
    double q = 0.0, r = 0.0;
    std::array<std::array<double, 2>, 2> R{};  // rotation taking (dn, -sqrt(m) sn) to the half angles
};

// Localized defect U(X, T; m, Omega) of U_TT - U_XX + sin U = 0 on the
// X-independent pendulum background with modulus m.
class Defect {
public:
    explicit Defect(DefectParams p);

    const DefectParams& params() const { return p_; }
    // Elliptic argument 2 K Omega / pi + T.
    double phase_arg(double T) const { return shift_ + T; }

    std::pair<double, double> q_r(double X, double T) const;
    DefectSample sample(double X, double T) const;
    // Same as sample() with p(phase_arg(T); m) supplied by the caller.
    DefectSample sample_with_p(double X, double T, double p) const;

private:
    DefectParams p_;
    double K_, rho_, shift_, s1m_, smm_;  // s1m = sqrt(1-m), smm = sqrt(m(1-m))
};

struct DefectGrid {
    DefectParams params;
    std::vector<double> X, T;  // axes, X fastest
    std::vector<double> cos_half, sin_half;
};

// Evaluates on the tensor grid; p is computed once per T row.
DefectGrid defect_grid(const Defect& d, const std::vector<double>& X, const std::vector<double>& T);

// max |U_TT - U_XX + sin U| over the interior of the square [-L, L]^2 with
// step h, second-order stencils and neighbour differences unwrapped modulo 4 pi.
double pde_residual(const Defect& d, double L, double h);

inline double cos_full(double c, double s) { return c * c - s * s; }
inline double sin_full(double c, double s) { return 2.0 * s * c; }

void write_defect_csv(const DefectGrid& g, const std::string& path);
std::string defect_json(const DefectParams& p);
// {m, Omega} plus the grid shape.
std::string defect_json(const DefectGrid& g);

// Writes one grid per (m, Omega) with Omega in {0, pi/3, 2 pi/3, pi} into dir;
// returns the CSV paths.
std::vector<std::string> defect_catalog(const std::vector<double>& ms, double L, int n, const std::string& dir);

}  // namespace fluxon
