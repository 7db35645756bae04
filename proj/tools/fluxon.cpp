// Batch front end: every command writes deterministic CSV/JSON artifacts.
//
// Exit codes: 0 success, 1 selftest failure, 2 usage, 3 numeric failure,
// 4 size cap exceeded.

#include <fmt/format.h>
#include <fmt/os.h>

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "fluxon/condensate.hpp"
#include "fluxon/defect.hpp"
#include "fluxon/gfunction.hpp"
#include "fluxon/identities.hpp"
#include "fluxon/painleve1.hpp"
#include "fluxon/specfun.hpp"
#include "fluxon/universality.hpp"

using namespace fluxon;
using json = nlohmann::ordered_json;

namespace {

struct Range {
    double lo = 0.0, hi = 1.0;
    std::size_t n = 2;
    std::vector<double> values() const { return linspace(lo, hi, n); }
};

// "lo:hi:n" with n >= 2.
Range parse_range(const std::string& s) {
    Range r;
    char c1 = 0, c2 = 0;
    long n = 0;
    std::istringstream in(s);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2 || !(in >> std::ws).eof())
        throw CLI::ValidationError("range", fmt::format("'{}' is not lo:hi:n with n >= 2", s));
    r.n = static_cast<std::size_t>(n);
    return r;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError("list", fmt::format("'{}' is not a comma-separated integer list", s));
        }
    }
    if (out.empty()) throw CLI::ValidationError("list", "empty list");
    return out;
}

std::vector<double> parse_real_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError("list", fmt::format("'{}' is not a comma-separated list of numbers", s));
        }
    }
    if (out.empty()) throw CLI::ValidationError("list", "empty list");
    return out;
}

struct ProfileOpts {
    std::string profile;
    double amplitude = 0.25;
    double width = 1.0;

    void attach(CLI::App* sub, bool required = true) {
        auto* o = sub->add_option("--profile", profile, "sech, gaussian, or a CSV file with columns x,G");
        if (required) o->required();
        sub->add_option("--amplitude", amplitude, "sech: G = -4A sech(x); gaussian: depth")->capture_default_str();
        sub->add_option("--width", width, "gaussian width")->capture_default_str();
    }
    ImpulseProfile make() const {
        if (profile == "sech") return ImpulseProfile::sech(amplitude);
        if (profile == "gaussian") return ImpulseProfile::gaussian(amplitude, width);
        if (std::filesystem::exists(profile)) return ImpulseProfile::from_csv(profile);
        throw CLI::ValidationError("--profile", fmt::format("unknown profile '{}'", profile));
    }
    std::string label() const {
        if (profile == "sech") return fmt::format("sech(A={})", amplitude);
        if (profile == "gaussian") return fmt::format("gaussian(depth={},width={})", amplitude, width);
        return profile;
    }
};

void emit(const std::string& text, const std::string& path) {
    if (path == "-") {
        std::cout << text << '\n';
        return;
    }
    fmt::output_file(path).print("{}\n", text);
}

std::string sidecar_path(const std::string& csv) {
    std::filesystem::path p(csv);
    return p.replace_extension(".json").string();
}

// Flat key=value lines become --key value arguments placed before the user's
// own, so explicit flags (last occurrence wins) override the file.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string file;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) {
            file = args[k + 1];
            args.erase(args.begin() + static_cast<long>(k), args.begin() + static_cast<long>(k) + 2);
            break;
        }
        if (args[k].rfind("--config=", 0) == 0) {
            file = args[k].substr(9);
            args.erase(args.begin() + static_cast<long>(k));
            break;
        }
    }
    if (file.empty()) return args;
    std::ifstream in(file);
    if (!in) throw CLI::ValidationError("--config", fmt::format("cannot read '{}'", file));
    std::vector<std::string> extra;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) continue;
        if (eq == std::string::npos) throw CLI::ValidationError("--config", fmt::format("line '{}' is not key=value", line));
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        extra.push_back("--" + key);
        if (value != "true") extra.push_back(value);
    }
    // Insert after the subcommand name.
    auto pos = args.begin();
    if (pos != args.end() && pos->rfind("-", 0) != 0) ++pos;
    args.insert(pos, extra.begin(), extra.end());
    return args;
}

// ------------------------------------------------------------ commands

int cmd_catastrophe(const ProfileOpts& po, const std::string& out, bool with_phi, const std::string& rho_csv,
                    const std::string& sign_csv, double sign_t, const std::string& re, const std::string& im) {
    const PhaseIntegral pi(po.make());
    CatastropheData cd = locate_catastrophe(pi);
    if (!with_phi) cd.Phi_gc.reset();
    emit(catastrophe_json(cd), out);
    if (!rho_csv.empty()) {
        auto f = fmt::output_file(rho_csv);
        f.print("m,rho\n");
        for (int k = 1; k < 200; ++k) f.print("{:.17g},{:.17g}\n", k / 200.0, rho(k / 200.0));
    }
    if (!sign_csv.empty()) {
        const EndpointState st = solve_alpha_on_circle(pi, sign_t);
        const GFunction g(pi, st);
        const auto field = phi_field(g, parse_range(re).values(), parse_range(im).values());
        write_phi_csv(field, sign_csv);
        json j;
        j["x"] = st.x;
        j["t"] = st.t;
        j["alpha_re"] = st.alpha.real();
        j["alpha_im"] = st.alpha.imag();
        j["nre"] = field.re_w.size();
        j["nim"] = field.im_w.size();
        emit(j.dump(2), sidecar_path(sign_csv));
    }
    return 0;
}

int cmd_condensate(const ProfileOpts& po, int N, const std::string& xr, const std::string& tr, const std::string& frame,
                   const std::string& out, const std::string& overlay) {
    const PhaseIntegral pi(po.make());
    CondensateEvaluator ev(build_spectral_data(pi, N));
    const double eps = ev.data().epsilon;
    const auto xs = parse_range(xr).values(), ts = parse_range(tr).values();
    FieldGrid g;
    std::string xname = "x", tname = "t";
    std::optional<CatastropheData> cd;
    if (frame != "xt") cd = locate_catastrophe(pi);
    if (frame == "xt") {
        g = grid_evaluate(ev, xs, ts);
    } else {
        // Zoomed frames about the catastrophe (tilde) or the image of the first real pole (pole).
        double x0 = 0.0, t0 = cd->t_gc, scale = std::pow(eps, 0.8);
        if (frame == "pole") {
            const Tritronquee field(3.0);
            cplx tp = 0.0;
            for (const auto& p : field.poles())
                if (p.tau_p.imag() == 0.0 && p.tau_p.real() > 0.0) tp = p.tau_p;
            std::tie(x0, t0) = pole_to_xt(tp, *cd, eps);
            scale = eps;
            xname = "X";
            tname = "T";
        } else {
            xname = "x_tilde";
            tname = "t_tilde";
        }
        std::vector<double> x(xs.size()), t(ts.size());
        for (std::size_t i = 0; i < xs.size(); ++i) x[i] = x0 + scale * xs[i];
        for (std::size_t j = 0; j < ts.size(); ++j) t[j] = t0 + scale * ts[j];
        g = grid_evaluate(ev, x, t);
        g.x = xs;
        g.t = ts;
    }
    write_field_csv(g, out, xname, tname);
    emit(field_json(g, po.label(), N, eps, frame), sidecar_path(out));
    if (!overlay.empty()) {
        if (!cd) cd = locate_catastrophe(pi);
        const Tritronquee field(8.0);
        auto f = fmt::output_file(overlay);
        f.print("re_tau,im_tau,x,t,x_tilde,t_tilde\n");
        for (const auto& p : field.poles()) {
            const auto [x, t] = pole_to_xt(p.tau_p, *cd, eps);
            f.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", p.tau_p.real(), p.tau_p.imag(), x, t,
                    p.tau_p.imag() / cd->a + 0.0, p.tau_p.real() / cd->b);
        }
    }
    return 0;
}

int cmd_defect(double m, double omega, const std::string& Xr, const std::string& Tr, const std::string& out,
               const std::string& catalog_ms, const std::string& dir, int catalog_n) {
    if (!catalog_ms.empty()) {
        for (const auto& p : defect_catalog(parse_real_list(catalog_ms), 10.0, catalog_n, dir)) fmt::print("{}\n", p);
        return 0;
    }
    const Defect d({m, omega});
    const auto g = defect_grid(d, parse_range(Xr).values(), parse_range(Tr).values());
    write_defect_csv(g, out);
    emit(defect_json(g), sidecar_path(out));
    return 0;
}

int cmd_pi_field(double R, const std::string& poles_csv, const std::string& grid_csv, const std::string& re,
                 const std::string& im, double exclusion) {
    const Tritronquee field(R);
    write_pole_csv(field.poles(), poles_csv);
    if (field.unmatched_seeds() > 0)
        fmt::print(stderr, "warning: {} pole seeds matched no returned pole\n", field.unmatched_seeds());
    if (!grid_csv.empty()) {
        const auto g = h_grid(field, parse_range(re).values(), parse_range(im).values(), exclusion);
        write_h_grid_csv(g, grid_csv);
        json j;
        j["R"] = R;
        j["n_poles"] = field.poles().size();
        j["exclusion"] = exclusion;
        j["nre"] = g.re_tau.size();
        j["nim"] = g.im_tau.size();
        emit(j.dump(2), sidecar_path(grid_csv));
    }
    return 0;
}

int cmd_compare(bool thm2, const ProfileOpts& po, const std::string& Ns, bool fit, const std::string& out,
                double radius) {
    const PhaseIntegral pi(po.make());
    const CatastropheData cd = locate_catastrophe(pi);
    const Tritronquee field(8.0);
    CompareWindow w;
    if (radius > 0.0) w.tau_radius = radius;
    const auto r = thm2 ? compare_theorem2(pi, cd, field, parse_int_list(Ns), fit, w)
                        : compare_theorem1(pi, cd, field, parse_int_list(Ns), w);
    emit(report_json(r), out);
    return 0;
}

int cmd_selftest() {
    int failed = 0, total = 0;
    auto report = [&](const IdentityCheck& c) {
        ++total;
        failed += !c.pass();
        fmt::print("{} {:<48} draws={:<3} max_err={:.2e} tol={:.0e}\n", c.pass() ? "ok  " : "FAIL", c.name, c.draws,
                   c.max_error, c.tol);
    };
    for (const auto& c : identity_suite()) report(c);
    const PhaseIntegral sech(ImpulseProfile::sech(0.25));
    for (const auto& c : catastrophe_identities(locate_catastrophe(sech))) report(c);

    // Module invariants at random points.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-3.0, 3.0), ut(0.0, 2.0), uX(-10.0, 10.0);
    IdentityCheck pyth{"condensate cos^2 + sin^2 = 1 (N = 8)", 0, 0.0, 1e-9};
    const CondensateEvaluator ev(build_spectral_data(sech, 8));
    for (int k = 0; k < 200; ++k) {
        const auto s = ev.evaluate(ux(rng), ut(rng));
        pyth.max_error = std::max(pyth.max_error, std::abs(s.cos_half * s.cos_half + s.sin_half * s.sin_half - 1.0));
        ++pyth.draws;
    }
    report(pyth);
    IdentityCheck orth{"defect rotation orthogonality", 0, 0.0, 1e-12};
    const Defect d({0.416708, 0.0});
    for (int k = 0; k < 200; ++k) {
        const auto s = d.sample(uX(rng), uX(rng));
        const double e1 = std::abs(s.R[0][0] * s.R[0][0] + s.R[1][0] * s.R[1][0] - 1.0);
        const double e2 = std::abs(s.R[0][0] * s.R[1][1] - s.R[0][1] * s.R[1][0] - 1.0);
        orth.max_error = std::max({orth.max_error, e1, e2});
        ++orth.draws;
    }
    report(orth);
    IdentityCheck res{"Painleve-I pole residues = -1", 0, 0.0, 1e-6};
    for (const auto& p : Tritronquee(4.0).poles()) {
        res.max_error = std::max(res.max_error, p.residue_check);
        ++res.draws;
    }
    report(res);
    fmt::print("{} of {} checks passed\n", total - failed, total);
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semiclassical sine-Gordon condensates near a gradient catastrophe"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--config", "file of key=value lines merged under the command-line flags");

    ProfileOpts po;
    std::string out = "-", rho_csv, sign_csv, re = "-2:2:161", im = "0:2:81";
    double sign_t = 1.0;
    bool no_phi = false;
    auto* cat = app.add_subcommand("catastrophe", "locate the gradient catastrophe on x = 0");
    po.attach(cat);
    cat->add_option("--json", out, "output path, - for standard output")->capture_default_str();
    cat->add_flag("--no-phi", no_phi, "skip the phase Phi_gc");
    cat->add_option("--rho-csv", rho_csv, "also write rho(m) on a grid of m");
    cat->add_option("--sign-chart", sign_csv, "also write Re phi on a w grid at x = 0, t = --sign-t");
    cat->add_option("--sign-t", sign_t)->capture_default_str();
    cat->add_option("--re", re, "lo:hi:n for Re w")->capture_default_str();
    cat->add_option("--im", im, "lo:hi:n for Im w (>= 0)")->capture_default_str();

    ProfileOpts pc;
    int N = 8;
    std::string xr = "-6:6:400", tr = "0:2:400", frame = "xt", grid_out = "condensate.csv", overlay;
    auto* cond = app.add_subcommand("condensate", "evaluate the fluxon condensate on a grid");
    pc.attach(cond);
    cond->add_option("--N", N)->capture_default_str();
    cond->add_option("--x", xr, "lo:hi:n")->capture_default_str();
    cond->add_option("--t", tr, "lo:hi:n")->capture_default_str();
    cond->add_option("--frame", frame, "xt, tilde (about the catastrophe) or pole (about the first real pole)")
        ->check(CLI::IsMember({"xt", "tilde", "pole"}))
        ->capture_default_str();
    cond->add_option("--out", grid_out)->capture_default_str();
    cond->add_option("--pole-overlay", overlay, "also write the preimages of the Painleve-I poles");

    double m = 0.416708, omega = 0.0;
    std::string Xr = "-10:10:401", Tr = "-10:10:401", defect_out = "defect.csv", catalog, dir = "catalog";
    int catalog_n = 201;
    auto* def = app.add_subcommand("defect", "evaluate a defect solution U(X,T; m, Omega)");
    def->add_option("--m", m)->capture_default_str();
    def->add_option("--omega", omega)->capture_default_str();
    def->add_option("--X", Xr, "lo:hi:n")->capture_default_str();
    def->add_option("--T", Tr, "lo:hi:n")->capture_default_str();
    def->add_option("--out", defect_out)->capture_default_str();
    def->add_option("--catalog", catalog, "comma-separated m list; writes Omega in {0, pi/3, 2pi/3, pi} grids");
    def->add_option("--dir", dir, "catalog directory")->capture_default_str();
    def->add_option("--catalog-n", catalog_n, "catalog points per axis")->capture_default_str();

    double R = 8.0, exclusion = 0.1;
    std::string poles_csv = "poles.csv", h_csv, hre = "-4:8:241", him = "-6:6:241";
    auto* pif = app.add_subcommand("pi-field", "poles and Hamiltonian of the Painleve-I tritronquee solution");
    pif->add_option("--R", R, "pole search radius")->capture_default_str();
    pif->add_option("--poles", poles_csv)->capture_default_str();
    pif->add_option("--h-grid", h_csv, "also write h on a tau grid");
    pif->add_option("--re", hre, "lo:hi:n for Re tau")->capture_default_str();
    pif->add_option("--im", him, "lo:hi:n for Im tau")->capture_default_str();
    pif->add_option("--exclusion", exclusion, "radius of the NaN disks about poles")->capture_default_str();

    ProfileOpts p1, p2;
    std::string N1 = "8,16,32", N2 = "8,16", out1 = "-", out2 = "-";
    double radius = 0.0;
    bool fit = false;
    auto* c1 = app.add_subcommand("compare-thm1", "sup error of the first-correction formula against condensates");
    p1.attach(c1);
    c1->add_option("--N", N1, "comma-separated list")->capture_default_str();
    c1->add_option("--radius", radius, "tau disk radius (default 1)");
    c1->add_option("--json", out1)->capture_default_str();
    auto* c2 = app.add_subcommand("compare-thm2", "sup difference of the defect prediction near the first real pole");
    p2.attach(c2);
    c2->add_option("--N", N2, "comma-separated list")->capture_default_str();
    c2->add_flag("--fit", fit, "fit the phase Omega instead of using Phi_gc");
    c2->add_option("--json", out2)->capture_default_str();

    auto* self = app.add_subcommand("selftest", "identity suite and module invariants");

    try {
        auto args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
        if (*cat) return cmd_catastrophe(po, out, !no_phi, rho_csv, sign_csv, sign_t, re, im);
        if (*cond) return cmd_condensate(pc, N, xr, tr, frame, grid_out, overlay);
        if (*def) return cmd_defect(m, omega, Xr, Tr, defect_out, catalog, dir, catalog_n);
        if (*pif) return cmd_pi_field(R, poles_csv, h_csv, hre, him, exclusion);
        if (*c1) return cmd_compare(false, p1, N1, false, out1, radius);
        if (*c2) return cmd_compare(true, p2, N2, fit, out2, 0.0);
        if (*self) return cmd_selftest();
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const cap_exceeded& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 4;
    } catch (const numeric_failure& e) {
        fmt::print(stderr, "numeric failure: {}\n", e.what());
        return 3;
    } catch (const std::domain_error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 2;
}
