#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "support.hpp"

using namespace pwvie;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(PWVIE_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string p(const std::string& name) { return test::problem_path(name); }

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "pwvie_cli_test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("analyze") {
    auto r = run("analyze --json " + p("example1"));
    REQUIRE(r.status == 0);
    auto j = Json::parse(r.out);
    CHECK(j["path"] == "theorem-1");
    CHECK(j["paths"] == Json::parse(R"(["theorem-1", "theorem-2"])"));
    CHECK(j["characteristic"]["roots"].empty());

    r = run("analyze --json " + p("example2"));
    REQUIRE(r.status == 0);
    j = Json::parse(r.out);
    CHECK(j["path"] == "theorem-2");
    CHECK(j["characteristic"]["roots"] == Json::parse("[[0, 1]]"));
    CHECK(j["characteristic"]["free_constants"] == 1);

    CHECK(run("analyze " + p("zero_rhs_origin")).status == 2);
    CHECK(run("analyze /nonexistent.json").status != 0);
}

TEST_CASE("asympt") {
    CHECK(run("asympt " + p("example2") + " --order 2").out == "x̂(t) = c1 − 1.4426950408889634·ln t\n");
    CHECK(run("asympt " + p("example1") + " --order 2").out == "x̂(t) = 2/3\n");
    CHECK(run("asympt " + p("single") + " --order 2").out == "x̂(t) = 1\n");
    const auto j = Json::parse(run("asympt --json " + p("example2") + " --order 2").out);
    CHECK(j["free_parameters"].size() == 1);
}

TEST_CASE("solve and verify") {
    const auto dir = scratch();
    const auto out1 = (dir / "ex1.json").string();
    auto r = run("solve " + p("example1") + " --out " + out1 + " --json");
    REQUIRE(r.status == 0);
    auto j = Json::parse(r.out);
    CHECK(j["a"] == "2");
    CHECK(j["residual_max"].get<double>() <= 1e-8);
    for (const auto& s : j["samples"]) CHECK(std::abs(s[1].get<double>() - 2.0 / 3) <= 1e-8);
    CHECK(fs::exists(dir / "ex1.csv"));
    CHECK(run("verify " + p("example1") + " --solution " + out1).status == 0);

    // Determinism: a second run writes identical bytes.
    const auto out1b = (dir / "ex1b.json").string();
    REQUIRE(run("solve " + p("example1") + " --out " + out1b).status == 0);
    auto slurp = [](const std::string& f) { return read_file(f); };
    CHECK(slurp(out1) == slurp(out1b));

    const auto out2 = (dir / "ex2.json").string();
    r = run("solve " + p("example2") + " --param c=0 --out " + out2 + " --json");
    REQUIRE(r.status == 0);
    j = Json::parse(r.out);
    CHECK(j["a"] == "1");
    CHECK(j["parameters"].size() == 1);
    for (const auto& s : j["samples"]) {
        const double t = s[0].get<double>();
        if (t >= 0.01) CHECK(std::abs(s[1].get<double>() + std::log(t) / std::log(2.0)) <= 1e-6);
    }
    CHECK(run("verify " + p("example2") + " --solution " + out2).status == 0);

    const auto out3 = (dir / "ex2c1.json").string();
    REQUIRE(run("solve " + p("example2") + " --param c1=1 --out " + out3).status == 0);
    CHECK(run("verify " + p("example2") + " --solution " + out3).status == 0);

    r = run("solve " + p("manufactured") + " --json");
    REQUIRE(r.status == 0);
    j = Json::parse(r.out);
    CHECK(j["a"] == "1");
    for (const auto& s : j["samples"]) CHECK(std::abs(s[1].get<double>() - 2.0 / 3) <= 1e-8);
}

TEST_CASE("verify rejects wrong solutions") {
    const auto dir = scratch();
    const auto good = (dir / "ex1v.json").string();
    REQUIRE(run("solve " + p("example1") + " --out " + good).status == 0);

    // Zero regular part: same mesh, all values 0.
    auto j = Json::parse(read_file(good));
    for (auto& v : j["mesh"]["values"]) v = 0.0;
    const auto zero = (dir / "zero.json").string();
    std::ofstream(zero) << j.dump();
    CHECK(run("verify " + p("example1") + " --solution " + zero).status == 7);

    CHECK(run("verify " + p("manufactured") + " --solution " + good).status == 6);
}

TEST_CASE("parameter handling and exit codes") {
    CHECK(run("solve " + p("example2") + " --strict-params").status == 5);
    CHECK(run("solve " + p("example2")).status == 0);
    CHECK(run("solve " + p("example2") + " --param c7=1").status == 2);
    CHECK(run("solve " + p("example2") + " --param c1=abc").status == 2);
    CHECK(run("solve " + p("zero_rhs_origin")).status == 2);
    CHECK(run("solve " + p("multiplicity2") + " --param c1=1 --param c2=-1").status == 0);
    CHECK(run("asympt " + p("example1")).status != 0);
}
