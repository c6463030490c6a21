#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdc/cli.hpp"

using namespace sdc;
namespace fs = std::filesystem;

namespace {

const char* kCaseConfig = R"([plant]
a = 5
c = 2.5
L = 6.283185307179586
N_max = 10

[truncation]
N0 = 2

[control]
D = 0.1
t0 = 0.2
poles = -3, -3

[coupling]
disturbance = case-study

[simulation]
dt = 1e-3
T_end = 2
N_modes = 10
output = trajectory.csv
)";

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

struct Capture {
    std::ostringstream out, err;
    cli::Streams io{out, err};
};

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("sdc_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string config_error(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigError);
        return e.what();
    }
    FAIL("config was accepted");
    return {};
}

}  // namespace

TEST_CASE("config parsing") {
    const RunConfig c = parse(kCaseConfig);
    CHECK(c.plant.a == 5.0);
    CHECK(c.plant.length == doctest::Approx(2.0 * std::numbers::pi));
    CHECK(c.n0 == 2);
    CHECK(c.control.poles.size() == 2);
    CHECK(c.certificate.optimize);
    CHECK(c.simulation.t_end == 2.0);
    CHECK(c.control.placement == Placement::RankOne);
    CHECK(c.coupling.c2 == 10.0);
}

TEST_CASE("complex pole syntax") {
    CHECK(parse_complex("-3") == Complex(-3.0, 0.0));
    CHECK(parse_complex("-1+2i") == Complex(-1.0, 2.0));
    CHECK(parse_complex(" -1-2i ") == Complex(-1.0, -2.0));
    CHECK(parse_complex("2i") == Complex(0.0, 2.0));
    CHECK(parse_complex("-i") == Complex(0.0, -1.0));
    CHECK(parse_complex("1e-1-2.5e+1i") == Complex(0.1, -25.0));
    CHECK_THROWS_AS(parse_complex("abc"), Error);
}

TEST_CASE("config errors name the field") {
    CHECK(config_error(replace(kCaseConfig, "L = 6.283185307179586\n", "")).find("'L' in section [plant]") !=
          std::string::npos);
    CHECK(config_error(replace(kCaseConfig, "dt = 1e-3", "dt = 0.1")).find("'dt'") != std::string::npos);
    CHECK(config_error(replace(kCaseConfig, "poles = -3, -3", "poles = -3")).find("'poles'") != std::string::npos);
    CHECK(config_error(replace(kCaseConfig, "a = 5", "a = five")).find("'a' in section [plant]") !=
          std::string::npos);
    CHECK(config_error(replace(kCaseConfig, "N_modes = 10", "N_modes = 12")).find("'N_modes'") !=
          std::string::npos);
    CHECK(config_error(std::string(kCaseConfig) + "\n[certificate]\noptimize = false\nbeta = 0.4\n")
              .find("'gamma1' in section [certificate]") != std::string::npos);
}

TEST_CASE("validate command") {
    Capture c;
    CHECK(cli::cmd_validate(parse(kCaseConfig), c.io) == cli::kOk);
    CHECK(c.out.str().find("alpha = 8.75") != std::string::npos);
    CHECK(c.out.str().find("kalman = true") != std::string::npos);

    Capture z;
    CHECK(cli::cmd_validate(parse(replace(kCaseConfig, "N0 = 2", "N0 = 0")), z.io) == cli::kAssumptionFailure);
    CHECK(z.err.str().find("unstable mode discarded") != std::string::npos);

    Capture m;
    const fs::path dir = scratch("missing");
    std::ofstream(dir / "run.ini") << replace(kCaseConfig, "L = 6.283185307179586\n", "");
    CHECK(cli::run_with_config_file("validate", (dir / "run.ini").string(), {}, m.io) == cli::kConfigError);
    CHECK(m.err.str().find("'L'") != std::string::npos);
    CHECK(cli::run_with_config_file("validate", (dir / "absent.ini").string(), {}, m.io) == cli::kConfigError);
}

TEST_CASE("design command") {
    const fs::path dir = scratch("design");
    Capture c;
    CHECK(cli::cmd_design(parse(kCaseConfig), {dir}, c.io) == cli::kOk);
    const std::string report = slurp(dir / "design.txt");
    CHECK(report.find("spectrum_Acl = -3") != std::string::npos);
    CHECK(report.find("hurwitz = true") != std::string::npos);
    CHECK(report.find("lyapunov_residual") != std::string::npos);

    Capture u;
    const fs::path bad = scratch("design_unstable");
    CHECK(cli::cmd_design(parse(replace(kCaseConfig, "poles = -3, -3", "poles = 1, -3")), {bad}, u.io) ==
          cli::kSynthesisFailure);
    CHECK(slurp(bad / "design.txt").find("hurwitz = false") != std::string::npos);

    // two identical modes driven through one input cannot be steered independently
    SpectralSystem toy = build_heat_system(5.0, 2.5, 2.0 * std::numbers::pi, 10);
    toy.eigenvalues(1) = toy.eigenvalues(0);
    toy.input_coeffs.col(1) = toy.input_coeffs.col(0);
    toy.input_coeffs(1, 0) = toy.input_coeffs(0, 0);
    toy.input_coeffs(1, 1) = toy.input_coeffs(0, 1);
    Capture t;
    CHECK(cli::cmd_design(parse(kCaseConfig), toy, {scratch("design_toy")}, t.io) == cli::kSynthesisFailure);
    CHECK(cli::cmd_validate(parse(kCaseConfig), toy, t.io) == cli::kAssumptionFailure);
}

TEST_CASE("certify command") {
    const fs::path dir = scratch("certify");
    Capture c;
    const int code = cli::cmd_certify(parse(kCaseConfig), {dir}, c.io);
    std::ifstream doc(dir / "certificate.txt");
    const auto kv = parse_key_values(doc);
    CHECK(kv.size() == 12);
    CHECK(kv.at("small_gain_constant") > 0.0);
    // rank-one gain: constant above the published couplings' threshold, so the margin warning fires
    CHECK(code == (kv.at("margin") > 0.0 ? cli::kOk : cli::kCertificateFailure));

    Capture e;
    const std::string exact = replace(kCaseConfig, "poles = -3, -3", "poles = -3, -3\nplacement = exact");
    CHECK(cli::cmd_certify(parse(exact), {scratch("certify_exact")}, e.io) == cli::kOk);

    Capture o;
    const std::string fixed =
        std::string(kCaseConfig) + "\n[certificate]\nbeta = 0.4131\ngamma1 = 106.3290\ngamma2 = 337.1938\n";
    const fs::path fdir = scratch("certify_fixed");
    cli::cmd_certify(parse(fixed), {fdir}, o.io);
    std::ifstream fdoc(fdir / "certificate.txt");
    const auto fkv = parse_key_values(fdoc);
    CHECK(fkv.at("beta") == 0.4131);
    CHECK(fkv.at("gamma1") == 106.329);

    Capture s;
    std::string strong = std::string(kCaseConfig);
    strong = replace(strong, "disturbance = case-study", "disturbance = case-study\na2 = 7\nb2 = 5.5");
    CHECK(cli::cmd_certify(parse(strong + "\n[certificate]\nbeta = 0.4131\ngamma1 = 106.3290\ngamma2 = 337.1938\n"),
                           {scratch("certify_strong")}, s.io) == cli::kCertificateFailure);
    CHECK(s.err.str().find("warning") != std::string::npos);

    Capture i;
    CHECK(cli::cmd_certify(parse(std::string(kCaseConfig) + "\n[certificate]\nbeta = 0.4\ngamma1 = 1\ngamma2 = 1\n"),
                           {scratch("certify_bad")}, i.io) == cli::kCertificateFailure);
}

TEST_CASE("simulate command") {
    const fs::path dir = scratch("simulate");
    Capture c;
    const RunConfig cfg = parse(kCaseConfig);
    cli::cmd_simulate(cfg, {dir}, c.io);
    const std::string csv = slurp(dir / "trajectory.csv");
    CHECK(csv.rfind("t,x,normX,V,u1,u2,normd,c1,", 0) == 0);
    CHECK(slurp(dir / "summary.txt").find("iss_envelope = pass") != std::string::npos);

    const fs::path empty = scratch("simulate_empty");
    Capture z;
    CHECK(cli::cmd_simulate(parse(replace(kCaseConfig, "T_end = 2", "T_end = 0")), {empty}, z.io) == cli::kOk);
    CHECK(slurp(empty / "trajectory.csv") == "t,x,normX,V,u1,u2,normd,c1,c2,c3,c4,c5,c6,c7,c8,c9,c10\n");

    // identical config, byte-identical artifacts
    const fs::path again = scratch("simulate_again");
    Capture r;
    cli::cmd_simulate(cfg, {again}, r.io);
    CHECK(slurp(again / "trajectory.csv") == csv);
    cli::cmd_certify(cfg, {dir}, r.io);
    cli::cmd_certify(cfg, {again}, r.io);
    CHECK(slurp(again / "certificate.txt") == slurp(dir / "certificate.txt"));
}

TEST_CASE("exit codes map from error kinds") {
    CHECK(cli::exit_code_for(ErrorKind::ConfigError) == 1);
    CHECK(cli::exit_code_for(ErrorKind::AssumptionViolated) == 2);
    CHECK(cli::exit_code_for(ErrorKind::SynthesisFailure) == 3);
    CHECK(cli::exit_code_for(ErrorKind::InfeasibleCertificate) == 4);
    CHECK(cli::exit_code_for(ErrorKind::SimulationDiverged) == 5);
}
