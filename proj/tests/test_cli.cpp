#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include <json.hpp>

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

// Runs the installed CLI with stderr folded into stdout.
CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QCHAIN_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        out.append(buf.data(), n);
    }
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("cli: help exits cleanly") {
    const CliResult r = run_cli("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("simulate") != std::string::npos);
    CHECK(r.out.find("sweep") != std::string::npos);
}

TEST_CASE("cli: missing required options exit with 2") {
    CHECK(run_cli("simulate --protocol sctp --a0 0.5 --a1 0.6").exit_code == 2);
    CHECK(run_cli("simulate --protocol bogus --a0 0.5 --a1 0.6 --a2 auto").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
}

TEST_CASE("cli: invalid physics inputs exit with 2") {
    CHECK(run_cli("simulate --protocol sctp --a0 0.9 --a1 0.3 --a2 auto --trials 5")
              .exit_code == 2);
    CHECK(run_cli("simulate --protocol sctp --a0 0.5 --a1 0.6 --a2 nope --trials 5")
              .exit_code == 2);
    const CliResult r = run_cli(
        "simulate --protocol sctp --a0 0.5 --a1 0.6 --a2 auto --state 1,2,3 --trials 5");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("--state") != std::string::npos);
}

TEST_CASE("cli: simulate report carries the exact reference") {
    const CliResult r = run_cli(
        "simulate --protocol sctp --steps 3 --a0 0.5 --a1 0.6 --a2 auto "
        "--trials 4000 --seed 12");
    REQUIRE(r.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["exact_probability"].get<double>() == doctest::Approx(0.421875).epsilon(1e-12));
    CHECK(j["exact_source"] == "enumeration");
    CHECK(std::abs(j["z_score"].get<double>()) < 5.0);
    CHECK(j["protocol"]["total_hops"] == 3);
    CHECK(j["mean_success_fidelity"].get<double>() > 1.0 - 1e-9);

    // Long chains switch to the closed form.
    const CliResult r15 = run_cli(
        "simulate --protocol sctp --steps 15 --a0 0.5 --a1 0.6 --a2 auto "
        "--trials 200 --seed 12");
    REQUIRE(r15.exit_code == 0);
    const nlohmann::json j15 = nlohmann::json::parse(r15.out);
    CHECK(j15["exact_source"] == "closed_form");
    CHECK(j15["exact_probability"].get<double>() ==
          doctest::Approx(0.013363461010158062).epsilon(1e-12));
}

TEST_CASE("cli: enumerate emits the class split") {
    const CliResult r = run_cli(
        "enumerate --protocol gctp4 --a0 0.5 --a1 0.6 --a2 auto --seed 4 --format csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.rfind("label,probability\n", 0) == 0);
    CHECK(r.out.find("class_10,0.21060000000000") != std::string::npos);
    CHECK(r.out.find("total_success,0.67935000000000") != std::string::npos);

    const CliResult rj = run_cli(
        "enumerate --protocol pgctp --segments 2 --a0 0.5 --a1 0.6 --a2 auto --seed 4");
    REQUIRE(rj.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(rj.out);
    CHECK(j["total_probability"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j["total_success_probability"].get<double>() ==
          doctest::Approx(0.67935 * 0.67935).epsilon(1e-12));
}

TEST_CASE("cli: sweep output is stable down to the last digit") {
    const std::string args =
        "sweep --n-segments 1 --points 3 --a0-min 0.3 --a0-max 0.5";
    const CliResult r1 = run_cli(args);
    const CliResult r2 = run_cli(args);
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.out == r2.out);
    CHECK(r1.out.rfind("a0,envelope,n_segments,p_s,p_pg,ratio\n", 0) == 0);
    CHECK(r1.out.find("0.5,min,1,0.421875,0.515625,1.2222222222222223\n") !=
          std::string::npos);
    CHECK(r1.out.find("\r") == std::string::npos);

    CHECK(run_cli("sweep --n-segments 1 --points 2 --a0-min 0.3 --a0-max 0.9")
              .exit_code == 2);
}

TEST_CASE("cli: verify passes clean and fails under an injected fault") {
    const CliResult ok = run_cli("verify");
    CHECK(ok.exit_code == 0);
    const nlohmann::json j = nlohmann::json::parse(ok.out);
    CHECK(j["passed"] == true);
    CHECK(j["checks"].size() == 10);

    const CliResult bad = run_cli("verify --inject-fault");
    CHECK(bad.exit_code == 1);
    const nlohmann::json jb = nlohmann::json::parse(bad.out);
    CHECK(jb["passed"] == false);
}
