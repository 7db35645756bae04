#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "support.hpp"

namespace ft = fluxon::testing;
using json = nlohmann::json;

namespace {

const std::filesystem::path& dir() {
    static const auto d = ft::scratch_dir("cli");
    return d;
}

// Runs the command line in the scratch directory; returns the exit status.
int run(const std::string& args, const std::string& env = "") {
    const std::string cmd =
        "cd '" + dir().string() + "' && " + env + " '" FLUXON_CLI "' " + args + " >stdout.txt 2>stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& name) {
    std::ifstream in(dir() / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("catastrophe command") {
    REQUIRE(run("catastrophe --profile sech --json -") == 0);
    const auto j = json::parse(slurp("stdout.txt"));
    CHECK(std::abs(j["t_gc"].get<double>() - 1.609104) < 5e-4);
    CHECK(j.contains("Phi_gc"));

    REQUIRE(run("catastrophe --profile sech --json cat.json --no-phi --rho-csv rho.csv --sign-chart sign.csv "
                "--re -1.5:1.5:7 --im 0:1.5:4") == 0);
    CHECK_FALSE(json::parse(slurp("cat.json")).contains("Phi_gc"));
    const auto rho = ft::read_lines((dir() / "rho.csv").string());
    CHECK(rho[0] == "m,rho");
    const auto sign = ft::read_lines((dir() / "sign.csv").string());
    CHECK(sign[0] == "re_w,im_w,re_phi");
    CHECK(sign.size() == 1 + 7 * 4);
    CHECK(json::parse(slurp("sign.json"))["t"] == 1.0);
}

TEST_CASE("exit codes") {
    CHECK(run("catastrophe --json -") == 2);
    CHECK(run("") == 2);
    CHECK(run("condensate --profile sech --x 1:2") == 2);
    CHECK(run("condensate --profile sech --frame polar") == 2);
    CHECK(run("defect --m 1.5 --X -1:1:3 --T -1:1:3") == 2);
    CHECK(run("condensate --profile sech --N 64 --x 0:1:2 --t 0:1:2") == 4);
    CHECK(run("catastrophe --profile gaussian --amplitude 0.5 --width 1 --json -") == 3);
    CHECK(run("--help") == 0);
}

TEST_CASE("condensate command, sidecar and determinism") {
    const std::string args = "condensate --profile sech --N 8 --x -1:1:9 --t 0:1.5:7 --out c1.csv";
    REQUIRE(run(args) == 0);
    REQUIRE(run("condensate --profile sech --N 8 --x -1:1:9 --t 0:1.5:7 --out c2.csv", "FLUXON_THREADS=3") == 0);
    CHECK(slurp("c1.csv") == slurp("c2.csv"));
    const auto lines = ft::read_lines((dir() / "c1.csv").string());
    CHECK(lines[0] == "x,t,cos_half,sin_half,cos_u");
    CHECK(lines.size() == 1 + 9 * 7);
    const auto j = json::parse(slurp("c1.json"));
    CHECK(j["N"] == 8);
    CHECK(j["nx"] == 9);
    CHECK(j["nt"] == 7);
    CHECK(j["epsilon"].get<double>() == 1.0 / 32);

    REQUIRE(run("condensate --profile sech --N 8 --frame tilde --x -1:1:3 --t -1:1:3 --out z.csv "
                "--pole-overlay pre.csv") == 0);
    CHECK(ft::read_lines((dir() / "z.csv").string())[0] == "x_tilde,t_tilde,cos_half,sin_half,cos_u");
    const auto pre = ft::read_lines((dir() / "pre.csv").string());
    CHECK(pre[0] == "re_tau,im_tau,x,t,x_tilde,t_tilde");
    CHECK(pre.size() == 11);
}

TEST_CASE("config file under command-line flags") {
    std::ofstream(dir() / "run.cfg") << "# grid\nN = 4\nx = -1:1:3\nt=0:1:2\nout = cfg.csv\n";
    REQUIRE(run("condensate --config run.cfg --profile sech --N 6") == 0);
    const auto j = json::parse(slurp("cfg.json"));
    CHECK(j["N"] == 6);
    CHECK(j["nx"] == 3);
    CHECK(j["nt"] == 2);
    std::ofstream(dir() / "bad.cfg") << "N 4\n";
    CHECK(run("condensate --config bad.cfg --profile sech") == 2);
}

TEST_CASE("defect command") {
    REQUIRE(run("defect --m 0.416708 --omega 0 --X -2:2:5 --T -2:2:5 --out d.csv") == 0);
    CHECK(ft::read_lines((dir() / "d.csv").string()).size() == 26);
    const auto j = json::parse(slurp("d.json"));
    CHECK(j["m"].get<double>() == 0.416708);
    CHECK(j["Omega"].get<double>() == 0.0);
    REQUIRE(run("defect --catalog 0.017037086855465844 --catalog-n 5 --dir cat") == 0);
    CHECK(std::distance(std::filesystem::directory_iterator(dir() / "cat"), {}) == 8);
}

TEST_CASE("pi-field command") {
    REQUIRE(run("pi-field --R 3 --poles p.csv --h-grid h.csv --re -1:3:5 --im -1:1:3") == 0);
    const auto p = ft::read_lines((dir() / "p.csv").string());
    REQUIRE(p.size() == 2);
    CHECK(p[1].rfind("2.38416876", 0) == 0);
    CHECK(ft::read_lines((dir() / "h.csv").string()).size() == 16);
    CHECK(json::parse(slurp("h.json"))["n_poles"] == 1);
}

TEST_CASE("comparison commands") {
    REQUIRE(run("compare-thm2 --profile sech --N 8 --fit --json -") == 0);
    const auto j = json::parse(slurp("stdout.txt"));
    CHECK(j["mode"] == "thm2");
    CHECK(j["fitted_phase"].size() == 1);
}

TEST_CASE("selftest") {
    CHECK(run("selftest") == 0);
    CHECK(slurp("stdout.txt").find("checks passed") != std::string::npos);
}
