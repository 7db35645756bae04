#pragma once

#include <complex>

namespace fluxon {

using cplx = std::complex<double>;

struct EllipticKE {
    double K;
    double E;
};

struct EllipticTriple {
    double sn;
    double cn;
    double dn;
};

// Complete elliptic integrals of the first and second kind, parameter m in (0,1).
EllipticKE elliptic_KE(double m);
double elliptic_K(double m);

// Jacobi sn, cn, dn at real argument u.
EllipticTriple jacobi(double u, double m);

// Riemann theta series sum_n exp(H n^2/2 + n z), Re H < 0.
cplx theta(cplx z, cplx H);
cplx theta_d1(cplx z, cplx H);

// Mean of dn^-2 over one period.
double mean_inv_dn2(double m);

// p(w;m): integral over [0, w+K] of (mean - dn^-2), periodic with period 2K.
double p_periodic(double w, double m);

double rho(double m);
double whitham_J(double energy);

}  // namespace fluxon
