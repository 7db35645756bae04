#include <doctest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "fluxon/universality.hpp"

using namespace fluxon;
using std::numbers::pi;

namespace {

struct Setup {
    PhaseIntegral pi_{ImpulseProfile::sech(0.25)};
    CatastropheData cd = locate_catastrophe(pi_);
    Tritronquee field{8.0};
    double Phi() const { return *cd.Phi_gc; }
    cplx tau1() const { return field.poles().front().tau_p; }
};

const Setup& setup() {
    static const Setup s;
    return s;
}

}  // namespace

TEST_CASE("pole preimages in the (x, t) plane") {
    const auto& s = setup();
    const double eps = 1.0 / 64, sc = std::pow(eps, 0.8);
    const auto [x1, t1] = pole_to_xt(s.tau1(), s.cd, eps);
    CHECK(x1 == 0.0);
    CHECK(t1 == doctest::Approx(s.cd.t_gc + sc * s.tau1().real() / s.cd.b).epsilon(1e-15));

    const cplx p(4.0710555232, 1.3355512152);
    const auto up = pole_to_xt(p, s.cd, eps), dn = pole_to_xt(std::conj(p), s.cd, eps);
    CHECK(up.first == -dn.first);
    CHECK(up.second == dn.second);
    // Affine in tau: offsets from the catastrophe add.
    const cplx q(-1.2, 0.4);
    const auto pq = pole_to_xt(p + q, s.cd, eps), qq = pole_to_xt(q, s.cd, eps);
    CHECK(pq.first == doctest::Approx(up.first + qq.first).epsilon(1e-13));
    CHECK(pq.second - s.cd.t_gc == doctest::Approx(up.second + qq.second - 2 * s.cd.t_gc).epsilon(1e-13));
    // And inverse to the local coordinate.
    const cplx back = tau_of(up.first, up.second, s.cd, eps);
    CHECK(std::abs(back - p) < 1e-12);
}

TEST_CASE("local coordinates about a pole") {
    const auto& s = setup();
    const double eps = 1.0 / 64;
    const cplx p = s.field.poles()[1].tau_p;
    const auto [xp, tp] = pole_to_xt(p, s.cd, eps);
    for (auto [X, T] : {std::pair{0.5, -1.0}, {-3.0, 2.0}}) {
        const cplx direct = tau_of(xp + eps * X, tp + eps * T, s.cd, eps);
        const cplx local = p + std::pow(eps, 0.2) * cplx(s.cd.b * T, s.cd.a * X);
        CHECK(std::abs(direct - local) < 1e-12);
    }
}

TEST_CASE("first correction near the catastrophe") {
    const auto& s = setup();
    const double eps = 1.0 / 64;
    double worst = 0.0;
    for (double x = -0.05; x <= 0.05; x += 0.01)
        for (double t = s.cd.t_gc - 0.05; t <= s.cd.t_gc + 0.05; t += 0.01) {
            try {
                const auto h = theorem1_approx(x, t, s.cd, s.field, eps, s.Phi());
                worst = std::max(worst, std::abs(h.c * h.c + h.s * h.s - 1.0));
            } catch (const pole_proximity&) {
            }
        }
    CHECK(worst < 10 * std::pow(eps, 0.4));

    // x = 0: tau real and h real there.
    const double t = s.cd.t_gc - 0.02;
    CHECK(tau_of(0.0, t, s.cd, eps).imag() == 0.0);
    CHECK(s.field.evaluate(tau_of(0.0, t, s.cd, eps)).h.imag() == 0.0);

    // The correction is orthogonal to the leading vector and carries all the x dependence.
    const auto lead = theorem1_leading(t, s.cd, eps, s.Phi());
    std::vector<double> ratio;
    for (double x : {0.0, 0.01, 0.03}) {
        const auto a = theorem1_approx(x, t, s.cd, s.field, eps, s.Phi());
        const double dc = a.c - lead.c, ds = a.s - lead.s;
        CHECK(std::abs(dc * lead.c + ds * lead.s) < 1e-14);
        const double k = -dc * lead.s + ds * lead.c;
        ratio.push_back(k / s.field.evaluate(tau_of(x, t, s.cd, eps)).h.real());
    }
    CHECK(ratio[1] == doctest::Approx(ratio[0]).epsilon(1e-12));
    CHECK(ratio[2] == doctest::Approx(ratio[0]).epsilon(1e-12));

    // Where Re h = 0 the correction vanishes.
    const auto r = boost::math::tools::bisect([&](double tau) { return s.field.evaluate(tau).h.real(); }, -1.0, 0.0,
                                              boost::math::tools::eps_tolerance<double>(50));
    const double tau0 = 0.5 * (r.first + r.second);
    const double t0 = s.cd.t_gc + std::pow(eps, 0.8) * tau0 / s.cd.b;
    const auto at0 = theorem1_approx(0.0, t0, s.cd, s.field, eps, s.Phi());
    const auto l0 = theorem1_leading(t0, s.cd, eps, s.Phi());
    CHECK(std::hypot(at0.c - l0.c, at0.s - l0.s) < 1e-8 * s.cd.M * std::pow(eps, 0.2));

    CHECK_THROWS_AS(theorem1_approx(0.0, pole_to_xt(s.tau1(), s.cd, eps).second, s.cd, s.field, eps, s.Phi()),
                    pole_proximity);
}

TEST_CASE("defect prediction") {
    const auto& s = setup();
    const double eps = 1.0 / 64;
    const double Om = defect_phase(s.tau1(), s.cd, eps, s.Phi());
    const double tp = pole_to_xt(s.tau1(), s.cd, eps).second;
    // Far from the core the defect is the background of the leading terms.
    for (double T : {-1.0, 0.0, 2.5}) {
        const auto far = theorem2_predict(1e3, T, s.cd.m_gc, Om);
        const auto lead = theorem1_leading(tp + eps * T, s.cd, eps, s.Phi());
        CHECK(std::abs(far.c - lead.c) < 1e-3);
        CHECK(std::abs(far.s - lead.s) < 1e-3);
    }
    // Omega and Omega + pi give the same cos U.
    for (auto [X, T] : {std::pair{0.3, -0.4}, {2.0, 1.0}}) {
        const auto a = theorem2_predict(X, T, s.cd.m_gc, 0.7), b = theorem2_predict(X, T, s.cd.m_gc, 0.7 + pi);
        CHECK(std::abs((a.c * a.c - a.s * a.s) - (b.c * b.c - b.s * b.s)) < 1e-10);
        const auto c = theorem2_predict(X, T, s.cd.m_gc, 0.7);
        CHECK(c.c == a.c);
        CHECK(c.s == a.s);
    }
}

TEST_CASE("fitting helpers") {
    const auto [slope, res] = loglog_slope({0.1, 0.05, 0.025}, {3e-2, 3e-2 * std::pow(0.5, 0.4), 3e-2 * std::pow(0.25, 0.4)});
    CHECK(slope == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(res < 1e-12);
    CHECK_THROWS_AS(loglog_slope({1.0}, {1.0}), std::invalid_argument);

    const double x = fit_periodic([](double w) { return 1.0 - std::cos(w - 2.0); }, 0.0, 2 * pi);
    CHECK(x == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("comparison reports") {
    const auto& s = setup();
    CompareWindow w;
    w.tau_radius = 0.5;
    w.tau_step = 0.25;
    const auto r1 = compare_theorem1(s.pi_, s.cd, s.field, {8, 16}, w);
    CHECK(r1.mode == "thm1");
    REQUIRE(r1.sup_error.size() == 2);
    for (double e : r1.sup_error) {
        CHECK(std::isfinite(e));
        CHECK(e > 0.0);
    }
    CHECK(r1.epsilon[0] == 2 * r1.epsilon[1]);

    CompareWindow w2;
    w2.XT_points = 9;
    const auto r2 = compare_theorem2(s.pi_, s.cd, s.field, {8}, true, w2);
    CHECK(r2.mode == "thm2");
    REQUIRE(r2.fitted_phase.size() == 1);
    CHECK(r2.fitted_sup_error[0] <= r2.sup_error[0] + 1e-12);

    const auto j = nlohmann::json::parse(report_json(r1));
    for (const char* key : {"mode", "N", "sup_error", "epsilon", "exponent", "exponent_residual", "fitted_phase"})
        CHECK(j.contains(key));
    CHECK(j["N"].size() == 2);
}
