#include <doctest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <json.hpp>
#include <numbers>
#include <random>

#include "fluxon/defect.hpp"
#include "fluxon/specfun.hpp"
#include "support.hpp"

using namespace fluxon;
using std::numbers::pi;
namespace ft = fluxon::testing;

namespace {
constexpr double m_gc = 0.416708;
}

TEST_CASE("parameters") {
    CHECK_THROWS_AS(Defect({0.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(Defect({1.0, 0.0}), std::domain_error);
    const Defect d({0.3, pi / 3});
    CHECK(d.phase_arg(0.5) == doctest::Approx(2 * elliptic_K(0.3) / 3 + 0.5).epsilon(1e-15));
}

TEST_CASE("q does not depend on X and r grows quadratically") {
    const Defect d({m_gc, 0.0});
    for (double T : {-3.0, 0.4, 7.0}) {
        const double q0 = d.q_r(0.0, T).first;
        for (double X : {-5.0, 1.0, 40.0}) CHECK(d.q_r(X, T).first == q0);
    }
    const double smm = std::sqrt(m_gc * (1 - m_gc)), r = rho(m_gc);
    for (double T : {-200.0, 200.0})
        CHECK(std::abs(d.q_r(0.0, T).second / (-0.25 * smm * r * r * T * T) - 1.0) < 1e-2);
}

TEST_CASE("rotation and unit-circle invariants") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-10.0, 10.0), om(0.0, 2 * pi), um(0.05, 0.95);
    double orth = 0.0, unit = 0.0, rot = 0.0, qr_min = 1e300;
    const Defect gc({m_gc, 0.0});
    for (int k = 0; k < 10000; ++k) {
        const double X = u(rng), T = u(rng);
        const auto g = gc.sample(X, T);
        qr_min = std::min(qr_min, g.q * g.q + g.r * g.r);

        const Defect d({um(rng), om(rng)});
        const auto s = d.sample(X, T);
        const auto& R = s.R;
        orth = std::max({orth, std::abs(R[0][0] * R[0][0] + R[1][0] * R[1][0] - 1),
                         std::abs(R[0][1] * R[0][1] + R[1][1] * R[1][1] - 1),
                         std::abs(R[0][0] * R[0][1] + R[1][0] * R[1][1]),
                         std::abs(R[0][0] * R[1][1] - R[0][1] * R[1][0] - 1)});
        rot = std::max({rot, std::abs(R[0][0] - R[1][1]), std::abs(R[0][1] + R[1][0])});
        unit = std::max(unit, std::abs(s.cos_half * s.cos_half + s.sin_half * s.sin_half - 1));
        CHECK(std::isfinite(s.cos_half));
    }
    CHECK(qr_min > 0.0);
    CHECK(orth < 1e-13);
    CHECK(rot == 0.0);
    CHECK(unit < 1e-12);
}

TEST_CASE("rotation reduces to the identity where q vanishes") {
    const Defect d({m_gc, 0.0});
    auto q = [&](double T) { return d.q_r(0.0, T).first; };
    double lo = -4.0, hi = -4.0;
    while (q(lo) * q(hi + 0.05) > 0.0) hi += 0.05;
    hi += 0.05;
    const auto r = boost::math::tools::bisect(q, lo, hi, boost::math::tools::eps_tolerance<double>(52));
    const auto s = d.sample(2.0, 0.5 * (r.first + r.second));
    CHECK(std::abs(s.q) < 1e-12);
    CHECK(std::abs(s.R[0][0] - 1.0) < 1e-12);
    CHECK(std::abs(s.R[1][0]) < 1e-12);
    const auto [sn, cn, dn] = jacobi(d.phase_arg(0.5 * (r.first + r.second)), m_gc);
    CHECK(std::abs(s.cos_half - dn) < 1e-12);
    CHECK(std::abs(s.sin_half + std::sqrt(m_gc) * sn) < 1e-12);
}

TEST_CASE("far field is the pendulum background") {
    for (double Om : {0.0, 0.7, 2.0}) {
        const Defect d({m_gc, Om});
        const auto s = d.sample(1e3, 0.0);
        const auto [sn, cn, dn] = jacobi(2 * elliptic_K(m_gc) * Om / pi, m_gc);
        CHECK(std::abs(s.cos_half - dn) < 1e-3);
        CHECK(std::abs(s.sin_half + std::sqrt(m_gc) * sn) < 1e-3);
    }
}

TEST_CASE("shifting the phase by pi negates sin U") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    const Defect a({m_gc, 0.4}), b({m_gc, 0.4 + pi});
    for (int k = 0; k < 200; ++k) {
        const double X = u(rng), T = u(rng);
        const auto s = a.sample(X, T), t = b.sample(X, T);
        CHECK(std::abs(cos_full(s.cos_half, s.sin_half) - cos_full(t.cos_half, t.sin_half)) < 1e-10);
        CHECK(std::abs(sin_full(s.cos_half, s.sin_half) + sin_full(t.cos_half, t.sin_half)) < 1e-10);
    }
}

TEST_CASE("sine-Gordon residual is second order") {
    for (auto [m, Om] : {std::pair{m_gc, 0.0}, {0.1, pi / 3}}) {
        const Defect d({m, Om});
        const double r1 = pde_residual(d, 10.0, 0.04), r2 = pde_residual(d, 10.0, 0.02), r3 = pde_residual(d, 10.0, 0.01);
        if (m == m_gc) CHECK(r2 < 5e-3);
        for (double q : {r1 / r2, r2 / r3}) {
            CHECK(q > 3.5);
            CHECK(q < 4.5);
        }
    }
}

TEST_CASE("background column matches the pendulum stencil error") {
    const Defect d({m_gc, 0.0});
    const double h = 0.02, X = 1e3;
    auto back = [&](double T) {
        const auto [sn, cn, dn] = jacobi(d.phase_arg(T), m_gc);
        return std::pair{dn, -std::sqrt(m_gc) * sn};
    };
    auto field = [&](double T) {
        const auto s = d.sample(X, T);
        return std::pair{s.cos_half, s.sin_half};
    };
    for (double T : {-2.0, 0.3, 1.7}) {
        auto stencil = [&](auto&& f) {
            const auto c = f(T);
            const double utt = (ft::angle_step(c, f(T + h)) + ft::angle_step(c, f(T - h))) / (h * h);
            return utt + 2 * c.first * c.second;
        };
        CHECK(std::abs(stencil(field) - stencil(back)) < 1e-6);
        CHECK(std::abs(stencil(back)) < 1e-3);
    }
}

TEST_CASE("grid, serialization and catalog") {
    const Defect d({m_gc, pi / 3});
    const std::vector<double> X{-1.0, 0.0, 1.0}, T{-0.5, 0.5};
    const auto g = defect_grid(d, X, T);
    for (std::size_t j = 0; j < T.size(); ++j)
        for (std::size_t i = 0; i < X.size(); ++i) {
            const auto s = d.sample(X[i], T[j]);
            CHECK(g.cos_half[j * X.size() + i] == s.cos_half);
            CHECK(g.sin_half[j * X.size() + i] == s.sin_half);
        }
    const auto dir = ft::scratch_dir("defect");
    write_defect_csv(g, (dir / "d.csv").string());
    const auto lines = ft::read_lines((dir / "d.csv").string());
    REQUIRE(lines.size() == 7);
    CHECK(lines[0] == "X,T,cos_half,sin_half,cos_u");
    const auto j = nlohmann::json::parse(defect_json(g));
    CHECK(j["m"].get<double>() == m_gc);
    CHECK(j["Omega"].get<double>() == pi / 3);

    const auto files = defect_catalog({0.2, m_gc}, 5.0, 11, (dir / "catalog").string());
    CHECK(files.size() == 8);
    for (const auto& f : files) {
        CHECK(std::filesystem::exists(f));
        CHECK(ft::read_lines(f).size() == 1 + 11 * 11);
        auto side = std::filesystem::path(f).replace_extension(".json");
        CHECK(std::filesystem::exists(side));
    }
}
