#pragma once

#include <string>
#include <vector>

#include "fluxon/errors.hpp"
#include "fluxon/specfun.hpp"

namespace fluxon {

// Point on the real tritronquee solution of y'' = 6 y^2 + tau, with the
// Hamiltonian h = -y'^2/2 + 2 y^3 + tau y (so h' = y).
struct PIState {
    cplx tau, y, yprime, h;
};

struct PoleRecord {
    cplx tau_p;
    cplx h0;                    // constant term of h = -1/(tau - tau_p) + h0 + ...
    double residue_check = 0.0;  // |residue of h + 1|
};

struct PainleveConfig {
    double R_min = 300.0;    // radius at which the asymptotic series seeds the solution
    int order = 30;          // Taylor order of each step
    double step_tol = 1e-15;  // local truncation error per step, relative to max(1, |y|)
    double min_radius = 1e-10;  // convergence radius below which a path is declared to hit a pole
    double spacing = 0.25;   // lattice spacing of the pole search
    double max_radius = 20.0;
};

struct pole_proximity : numeric_failure {
    pole_proximity(const std::string& what, cplx estimate) : numeric_failure(what), estimate(estimate) {}
    cplx estimate;  // nearest-pole estimate from the Taylor coefficients
};

// Initial data from the large-|tau| expansion, valid for |arg(-tau0)| < 4 pi/5.
PIState tritronquee_init(cplx tau0, const PainleveConfig& cfg = {});

// The solution at tau in the pole-free sector, continued from the asymptotic
// data along a curve on which errors are not amplified.
PIState tritronquee_in_sector(cplx tau, const PainleveConfig& cfg = {});

// Taylor continuation along the polyline path (the first vertex is s.tau).
PIState continue_path(PIState s, const std::vector<cplx>& path, const PainleveConfig& cfg = {});

// |h''^2 + 2h - 4h'^3 - 2 tau h'| relative to the size of its terms.
double sigma_form_residual(const PIState& s);

// Laurent series of h about a pole through (tau - tau_p)^order; the
// coefficients follow from tau_p and h0.
cplx laurent_h(cplx tau_p, cplx h0, cplx tau, int order = 6);

// The solution on a square lattice covering |Re tau|, |Im tau| <= R + 1,
// continued from the asymptotic data on the negative real axis. Lattice nodes
// close to poles are not expanded; their Taylor data seed the pole search.
class Tritronquee {
public:
    explicit Tritronquee(double R = 8.0, PainleveConfig cfg = {});

    double radius() const { return R_; }
    PIState evaluate(cplx tau) const;
    PoleRecord locate_pole(cplx seed) const;
    // Poles with |tau_p| <= R, closed under conjugation, sorted by (Re, Im).
    const std::vector<PoleRecord>& poles() const { return poles_; }
    int unmatched_seeds() const { return unmatched_; }

private:
    struct Node {
        PIState s;
        double rho = 0.0;  // convergence radius estimate
        bool reached = false;
    };
    std::size_t index(long i, long j) const { return static_cast<std::size_t>(j) * n_ + static_cast<std::size_t>(i); }
    cplx node_tau(long i, long j) const;
    PIState evaluate_upper(cplx tau) const;
    void build_lattice();
    void find_poles();

    double R_;
    PainleveConfig cfg_;
    long n_ = 0;
    std::vector<Node> nodes_;
    std::vector<cplx> seeds_;
    std::vector<PoleRecord> poles_;
    int unmatched_ = 0;
};

struct HGrid {
    std::vector<double> re_tau, im_tau;  // re fastest
    std::vector<cplx> h;                 // NaN inside the pole exclusion disks
};

HGrid h_grid(const Tritronquee& field, const std::vector<double>& re_tau, const std::vector<double>& im_tau,
             double exclusion = 0.1);

void write_pole_csv(const std::vector<PoleRecord>& poles, const std::string& path);
void write_h_grid_csv(const HGrid& g, const std::string& path);

}  // namespace fluxon
