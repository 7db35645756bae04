#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fluxon/condensate.hpp"
#include "fluxon/gfunction.hpp"
#include "fluxon/painleve1.hpp"

namespace fluxon {

struct HalfAngles {
    double c = 1.0, s = 0.0;  // cos(u/2), sin(u/2)
};

// Local coordinates about the catastrophe: eps^{4/5} tau = i a x + b (t - t_gc).
cplx tau_of(double x, double t, const CatastropheData& cd, double eps);
std::pair<double, double> pole_to_xt(cplx tau_p, const CatastropheData& cd, double eps);

// Pendulum background (dn, -sqrt(m) sn) with the phase linearized about t_gc.
HalfAngles theorem1_leading(double t, const CatastropheData& cd, double eps, double Phi_gc);
// Leading terms plus the eps^{1/5} M Re h(tau) cn correction. Throws
// pole_proximity when tau is within `exclusion` of a pole of the field.
HalfAngles theorem1_approx(double x, double t, const CatastropheData& cd, const Tritronquee& field, double eps,
                           double Phi_gc, double exclusion = 0.3);

// Phase parameter of the defect at the image of tau_p.
double defect_phase(cplx tau_p, const CatastropheData& cd, double eps, double Phi_gc);
HalfAngles theorem2_predict(double X, double T, double m_gc, double Omega);

struct CompareWindow {
    double tau_radius = 1.0;   // Theorem 1: disk |tau| <= tau_radius
    double tau_step = 0.125;   //            sampled on this square lattice
    double exclusion = 0.3;    //            minus disks about the poles
    double XT_half = 8.0;      // Theorem 2: |X|, |T| <= XT_half
    int XT_points = 33;        //            points per axis
    cplx tau_p = 0.0;          //            pole; 0 selects the first real pole
};

struct ComparisonReport {
    std::string mode;  // "thm1" or "thm2"
    std::vector<int> N;
    std::vector<double> epsilon;
    std::vector<double> sup_error;     // max over the window of max(|dcos|, |dsin|)
    std::vector<double> fitted_phase;  // thm1: Phi_gc fit; thm2: Omega fit
    std::vector<double> fitted_sup_error;
    std::vector<double> reference_phase;  // from the computed Phi_gc
    std::vector<int> excluded;            // failed evaluations left out of the sup
    double exponent = 0.0;                // slope of log sup_error against log eps
    double exponent_residual = 0.0;       // rms residual of that fit
    bool phase_from_Phi_gc = true;
};

ComparisonReport compare_theorem1(const PhaseIntegral& pi, const CatastropheData& cd, const Tritronquee& field,
                                  const std::vector<int>& Ns, const CompareWindow& w = {});
// With fit_phase the reported sup_error uses the fitted Omega; otherwise the Omega from Phi_gc.
ComparisonReport compare_theorem2(const PhaseIntegral& pi, const CatastropheData& cd, const Tritronquee& field,
                                  const std::vector<int>& Ns, bool fit_phase, const CompareWindow& w = {});

std::string report_json(const ComparisonReport& r);

// Least-squares slope of log y against log x and the rms residual.
std::pair<double, double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Minimizer of a 2 pi/period-periodic objective: uniform scan, then golden section
// in the bracket around the best sample.
double fit_periodic(const std::function<double(double)>& f, double lo, double period, int scan = 48);

}  // namespace fluxon
