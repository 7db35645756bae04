#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fluxon/errors.hpp"
#include "fluxon/laxmap.hpp"

namespace fluxon {

inline constexpr int condensate_max_N = 32;

struct SpectralData {
    int N = 0;
    double epsilon = 0.0;
    std::vector<double> v;      // lambda_k = i v_k, v_0 > v_1 > ... > 0
    std::vector<cplx> w;        // upper preimage of lambda_k on the unit circle
    std::vector<int> gamma;     // (-1)^{k+1}
    // The 2N upper-half-plane poles of the unfolded problem, z^2 = w:
    // entry 2k is the preimage of w_k, entry 2k+1 that of conj(w_k).
    std::vector<cplx> z;
    std::vector<cplx> log_c0;   // log of the residue constant at (x,t) = (0,0)
    double log_bound = 700.0;   // residue magnitudes beyond e^{log_bound} are rejected
};

struct CondensateSolution {
    double cos_half = 1.0;
    double sin_half = 0.0;
    Eigen::Matrix2d H0 = Eigen::Matrix2d::Identity();
    double rcond = 1.0;            // reciprocal condition estimate of the scaled system
    bool extended_precision = false;  // solved in double-double after a poor double estimate
    double imag_residual = 0.0;    // largest |Im| discarded from H(0)
};

// Eigenvalues from Psi(lambda_k) = pi eps (k + 1/2).
std::vector<double> bohr_sommerfeld(const PhaseIntegral& pi, int N, double epsilon);

// Unit-circle preimages (w, conj w) of lambda = i v, 0 < v < 1/2.
std::pair<cplx, cplx> pole_preimages(double v);

SpectralData build_spectral_data(const PhaseIntegral& pi, int N);

// gamma_k Res_{w=y} e^{2iQ/eps} Pi_N as (log magnitude, phase); `conj_member`
// selects y = conj(w_k).
std::pair<double, double> residue_constant(const SpectralData& sd, int k, bool conj_member, double x, double t);

class CondensateEvaluator {
public:
    explicit CondensateEvaluator(SpectralData sd) : sd_(std::move(sd)) {}
    const SpectralData& data() const { return sd_; }

    CondensateSolution evaluate(double x, double t) const;
    // Full matrix H(w) for w off the positive axis and off the poles.
    Eigen::Matrix2cd H_at(cplx w, double x, double t) const;

    // First-column residues (u_p, v_p) of the unfolded problem at z = p, and H(0).
    struct Residues {
        Eigen::VectorXcd u, v;
        cplx f11, f21;
        std::vector<cplx> nodes;  // first-column poles of the solved problem
        bool flipped = false;     // nodes are -p; F = Ft diag(1/b, b)
        double rcond = 0.0;
        bool extended = false;
    };
    Residues solve(double x, double t) const;

private:
    SpectralData sd_;
};

struct FieldGrid {
    std::vector<double> x, t;             // axes; samples are row-major with x fastest
    std::vector<double> cos_half, sin_half;
    int failures = 0;

    std::size_t nx() const { return x.size(); }
    std::size_t nt() const { return t.size(); }
    double cos_u(std::size_t i) const { return cos_half[i] * cos_half[i] - sin_half[i] * sin_half[i]; }
};

std::vector<double> linspace(double a, double b, std::size_t n);

FieldGrid grid_evaluate(const CondensateEvaluator& ev, const std::vector<double>& x, const std::vector<double>& t);

void write_field_csv(const FieldGrid& g, const std::string& path, const std::string& xname = "x",
                     const std::string& tname = "t");
// Sidecar {profile, N, epsilon, ranges, nx, nt, frame, failures} for a grid.
std::string field_json(const FieldGrid& g, const std::string& profile, int N, double epsilon,
                       const std::string& frame = "xt");

}  // namespace fluxon
