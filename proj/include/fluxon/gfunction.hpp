#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fluxon/errors.hpp"
#include "fluxon/laxmap.hpp"

namespace fluxon {

// Continuation of the band endpoint lost its root (at or beyond the catastrophe).
struct root_lost : numeric_failure {
    using numeric_failure::numeric_failure;
};

// Endpoint alpha of the band (alpha* = conj(alpha)) at the point (x, t).
struct EndpointState {
    cplx alpha;
    double x = 0.0;
    double t = 0.0;
};

struct CatastropheData {
    double theta = 0.0;
    double t_gc = 0.0;
    cplx alpha_gc;
    double m_gc = 0.0;
    double omega_gc = 0.0;
    double rho = 0.0;
    double A = 0.0;
    double B = 0.0;
    cplx Hprime;          // dH/dw at alpha_gc
    double W_prime = 0.0;  // |W'_gc(alpha_gc)|
    double sigma = 0.0;
    double a = 0.0;  // < 0
    double b = 0.0;  // > 0
    double M = 0.0;
    std::optional<double> Phi_gc;
    double H_residual = 0.0;  // |H(alpha_gc)|
    double I_residual = 0.0;
};

// Endpoint e^{i mu} of the pole arc: E(e^{i mu}) = -i G(0)/4.
double pole_arc_angle(const PhaseIntegral& pi);

// On the axis x = 0 with alpha = e^{i theta} every quantity can be pulled back to
// lambda = E(w), which maps the exterior of the unit circle in the upper half plane
// onto the first quadrant; alpha goes to i v_alpha with v_alpha = sin(theta/2)/2.
// Requires theta >= mu and a phase integral continuable to v_alpha.
class AxisEndpoint {
public:
    AxisEndpoint(const PhaseIntegral& pi, double theta);

    double theta() const { return theta_; }
    double v_alpha() const { return va_; }

    // t at which H(e^{i theta}; 0, t) = 0.
    double t_of_H_zero() const;
    // The reality condition I is affine in t: I = I0 + t I1.
    std::pair<double, double> I_affine() const;
    double I(double t) const;

    // dphi/dlambda on the first quadrant (principal sqrt(lambda^2 + v_alpha^2)).
    cplx dphi_dlambda(cplx lambda, double t) const;
    // H pulled back to lambda; analytic at lambda = i v_alpha.
    cplx H_lambda(cplx lambda, double t) const;
    // H(w) for w exterior to the unit circle, from H_lambda.
    cplx H_w(cplx w, double t) const;
    // dH/dw at alpha by a Cauchy circle of radius `radius` in lambda.
    cplx dH_w_at_alpha(double t, double radius = 1e-3, int points = 64) const;
    // Phase Phi(0, t) = -i phi(alpha); the second member is the discarded imaginary part.
    std::pair<double, double> Phi(double t) const;

private:
    double psi_v(double v) const;                 // d/dv Psi(i v)
    double g_of_v(double v) const;                // Psi_v(v) sqrt(1 - 4 v^2)
    double dg_over_u2(double u) const;
    cplx G_of_lambda(cplx lambda) const;         // analytic continuation of g
    cplx K_of(cplx lambda) const;                 // int_0^u0 g(sqrt(va^2-u^2)) / (c^2-u^2) du
    cplx K_regular(cplx lambda, cplx c2) const;   // subtracted integral

    const PhaseIntegral* pi_;
    double theta_, va_, u0_;
    double dpsi_v_alpha_ = 0.0;  // d/dv Psi_v at v_alpha
};

// Path choices for the contour integrals; two choices give independent
// parametrizations of the same quantities.
struct ContourChoice {
    bool gamma_chord = false;   // gamma~ as a straight chord instead of circle/radial arcs
    double beta_offset = 0.5;   // radius of beta's outer arc beyond max(1, |alpha|)
    double beta_low_angle = 0.3;
};

// w-plane description of the band endpoint problem: M, I, H, and phi' = R H.
// The cut beta runs radially out from alpha, along an arc, and in to w = 1; C is
// the region bounded by [0, alpha], beta, [0, 1] and D the lens bounded by the
// pole arc, gamma~ and beta. Intended for x >= 0 with beta exterior to the circle.
class GFunction {
public:
    GFunction(const PhaseIntegral& pi, EndpointState s, ContourChoice c = {});

    const EndpointState& state() const { return s_; }
    double pole_arc() const { return mu_; }
    cplx R(cplx w) const;   // R^2 = (w - alpha)(w - alpha*), R ~ w, cut on beta
    cplx J(cplx w) const;   // int over gamma~ and its reflection of theta0' sqrt(-xi)/(R (xi - w))
    cplx H(cplx w) const;
    cplx phi_prime(cplx w) const;
    // phi' at w in the upper half plane given d = w - alpha exactly.
    cplx phi_prime_at(cplx w, cplx d) const;
    double M() const;
    double I() const;
    double A() const;
    double B() const;

    bool in_C(cplx w) const;
    bool in_lens(cplx w) const;
    bool crosses_cut(cplx a, cplx b) const;  // segment meets beta or the pole arc (upper half plane)

    // Re phi(w) by integration of phi' from alpha along a region-aware path
    // (requires |alpha| = 1).
    double re_phi(cplx w) const;

    // Points of beta, oriented from alpha to 1.
    const std::vector<cplx>& beta_polyline() const { return beta_; }

private:
    cplx R_A(cplx w, cplx d) const;
    cplx R(cplx w, cplx d) const;
    cplx J_at(cplx w, cplx d) const;
    cplx Y(cplx w, cplx Jv) const;
    cplx phi_prime_exterior(cplx w, cplx d) const;
    template <class F>
    cplx gamma_integral(F&& f) const;
    template <class F>
    cplx along_beta(F&& f) const;
    cplx path_integral(const std::vector<cplx>& knots, bool singular_start) const;
    void build_beta();

    const PhaseIntegral* pi_;
    EndpointState s_;
    ContourChoice c_;
    double mu_, theta_, rabs_, rbeta_, kappa_;
    std::vector<cplx> beta_, boundary_C_, boundary_D_;
};

// Band endpoint alpha = e^{i theta(t)} on the axis x = 0, the first root of
// I(e^{i theta}; 0, t) = 0 continued from theta(0) = mu; throws root_lost for t >= t_gc.
EndpointState solve_alpha_on_circle(const PhaseIntegral& pi, double t);

CatastropheData locate_catastrophe(const PhaseIntegral& pi);

// Phi(0, t); throws root_lost for t at or beyond the catastrophe.
double phase_Phi(const PhaseIntegral& pi, double t);

struct PhiField {
    std::vector<double> re_w, im_w;  // axes, re fastest
    std::vector<double> re_phi;      // NaN where undefined (on cuts or unreachable)
};

// Re phi on a grid in the upper half plane by flood-filling edge integrals of
// phi' from alpha; Re phi(conj w) = Re phi(w) covers the lower half plane.
PhiField phi_field(const GFunction& g, const std::vector<double>& re_w, const std::vector<double>& im_w);

void write_phi_csv(const PhiField& f, const std::string& path);
std::string catastrophe_json(const CatastropheData& c);

}  // namespace fluxon
