#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fluxon/specfun.hpp"

namespace fluxon {

struct branch_cut_error : std::domain_error {
    using std::domain_error::domain_error;
};

// sqrt(-w) on the principal branch |arg(-w)| < pi; throws on [0, inf).
cplx sqrt_neg(cplx w);

cplx E_of(cplx w);
cplx D_of(cplx w);
cplx Q_of(cplx w, double x, double t);
cplx dE_of(cplx w);
cplx dD_of(cplx w);

// Even impulse profile G(x) with -2 < G(0) < 0.
struct ImpulseProfile {
    std::string name;
    std::function<double(double)> G;
    double half_width = 40.0;  // |G| negligible beyond this
    // Values G(i s) for real s, which are real for an even real-analytic G.
    // Empty for tabulated data, which cannot be continued.
    std::function<double(double)> G_imag;
    double imag_limit = 0.0;     // G_imag is finite on [0, imag_limit)
    double sech_amplitude = 0.0;  // > 0 when G = -4A sech and the closed form applies

    double G0() const { return G(0.0); }

    static ImpulseProfile sech(double amplitude, bool closed_form = true);
    static ImpulseProfile gaussian(double depth, double width);
    static ImpulseProfile tabulated(const std::vector<double>& x, const std::vector<double>& g);
    static ImpulseProfile from_csv(const std::string& path);

    void validate() const;
};

// Phase integral Psi(lambda) of a profile and its analytic continuation.
class PhaseIntegral {
public:
    explicit PhaseIntegral(ImpulseProfile profile);

    const ImpulseProfile& profile() const { return profile_; }
    double v0() const { return v0_; }            // -G(0)/4, the zero of Psi on the imaginary axis
    double integral_G() const { return intG_; }  // integral of G over the line
    bool closed_form() const { return profile_.sech_amplitude > 0.0; }
    bool continuable() const { return closed_form() || static_cast<bool>(profile_.G_imag); }

    // Psi(i v) for real v in [0, v0] (direct quadrature or closed form), and
    // beyond v0 through the imaginary-axis representation when continuable.
    double psi_imag(double v) const;
    // Psi and dPsi/dlambda at complex lambda (closed form or Chebyshev continuation).
    cplx psi(cplx lambda) const;
    cplx dpsi(cplx lambda) const;
    // Largest v reached by the complex continuation.
    double continuation_limit() const { return cheb_hi_; }

private:
    double psi_real_direct(double v) const;
    double psi_beyond(double v) const;
    void build_chebyshev();

    ImpulseProfile profile_;
    double v0_ = 0.0;
    double intG_ = 0.0;
    double cheb_hi_ = 0.0;
    std::vector<double> cheb_;  // Chebyshev coefficients of Psi(i v) on [0, cheb_hi_]
};

// Turning point x_+ > 0 with |G(x_+)| = 4v.
double turning_point(const ImpulseProfile& p, double v);

double epsilon_N(const PhaseIntegral& pi, int N);

// theta0(w) = Psi(E(w)).
cplx theta0(const PhaseIntegral& pi, cplx w);
cplx dtheta0(const PhaseIntegral& pi, cplx w);

// Cauchy-type integral over the two arcs of P_inf, and the exponent k.
cplx L_of(const PhaseIntegral& pi, cplx w);
cplx k_of(const PhaseIntegral& pi, cplx w, double x, double t);

}  // namespace fluxon
