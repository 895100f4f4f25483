#include <catch_amalgamated.hpp>

#include <crnc/crn_json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using crnc::Json;

namespace {

const std::string kExe = CRNC_EXE;
const std::string kSamples = CRNC_SAMPLES_DIR;

fs::path scratch()
{
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("crnc_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args, const std::string& tag = "out")
{
    const fs::path log = scratch() / (tag + ".log");
    const std::string cmd = "\"" + kExe + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json load(const fs::path& p) { return Json::parse(slurp(p)); }

} // namespace

TEST_CASE("compile the XOR netlist")
{
    const fs::path out = scratch() / "xor.json";
    REQUIRE(run("compile " + kSamples + "/xor.net -o " + out.string()) == 0);
    const Json j = load(out);
    CHECK(j.at("reactions").size() == 15);
    CHECK(j.at("states").size() == 6);
    CHECK(j.at("inputs").size() == 4);
    const Json m = load(out.string() + ".manifest.json");
    CHECK(m.at("command") == "compile");
    CHECK(m.at("inputs").at("netlist") == kSamples + "/xor.net");
    CHECK(m.at("params").at("tau") == 1.0);
    CHECK(m.at("outputs").at(0) == out.string());
}

TEST_CASE("cyclic netlist is an input error with diagnostics")
{
    CHECK(run("compile " + kSamples + "/cyclic.net -o " + (scratch() / "cyc.json").string(), "cyclic") == 2);
    CHECK(slurp(scratch() / "cyclic.log").find("cycle") != std::string::npos);
    CHECK_FALSE(fs::exists(scratch() / "cyc.json"));
}

TEST_CASE("single-gate netlist compiles to the NAND demo network")
{
    const fs::path a = scratch() / "single.json", dir = scratch() / "demo_nand";
    REQUIRE(run("compile " + kSamples + "/nand.net -o " + a.string()) == 0);
    REQUIRE(run("demo nand --noise none -o " + dir.string()) == 0);
    CHECK(load(a) == load(dir / "crn.json"));
    for (const char* f : {"crn.json", "schedule.json", "intervals.json", "trace.csv", "timing.svg", "report.json", "manifest.json"})
        CHECK(fs::exists(dir / f));
    CHECK(load(dir / "report.json").at("pass") == true);
}

TEST_CASE("zero horizon gives a header-only CSV")
{
    const fs::path out = scratch() / "zero.csv";
    REQUIRE(run("simulate --crn " + kSamples + "/decay.json --horizon 0 -o " + out.string()) == 0);
    CHECK(slurp(out) == "t,A,B\n");
}

TEST_CASE("decay CSV follows the exponential")
{
    const fs::path out = scratch() / "decay.csv";
    REQUIRE(run("simulate --crn " + kSamples + "/decay.json --horizon 3 --dt 0.01 -o " + out.string()) == 0);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,A,B");
    int rows = 0;
    while (std::getline(in, line)) {
        double t = 0, a = 0, b = 0;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &a, &b) == 3);
        CHECK(std::abs(a - std::exp(-t)) <= 1e-6);
        CHECK(std::abs(a + b - 1.0) <= 1e-9);
        ++rows;
    }
    CHECK(rows == 301);
    CHECK(fs::exists(out.string() + ".manifest.json"));
}

TEST_CASE("same seed gives byte-identical CSV")
{
    const fs::path crn = scratch() / "nand_crn.json";
    REQUIRE(run("compile " + kSamples + "/nand.net -o " + crn.string()) == 0);
    const std::string common = "simulate --crn " + crn.string() + " --schedule " + kSamples +
                               "/nand_schedule.json --noise random --seed 9 -o ";
    const fs::path a = scratch() / "r1.csv", b = scratch() / "r2.csv", c = scratch() / "r3.csv";
    REQUIRE(run(common + a.string()) == 0);
    REQUIRE(run(common + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    REQUIRE(run("simulate --crn " + crn.string() + " --schedule " + kSamples + "/nand_schedule.json --noise random --seed 10 -o " +
                c.string()) == 0);
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("demo outputs are reproducible")
{
    const fs::path a = scratch() / "sr_a", b = scratch() / "sr_b";
    REQUIRE(run("demo sr --noise random --seed 7 -o " + a.string()) == 0);
    REQUIRE(run("demo sr --noise random --seed 7 -o " + b.string()) == 0);
    CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
}

TEST_CASE("svg timing diagram")
{
    const fs::path crn = scratch() / "nand_crn2.json", svg = scratch() / "t.svg";
    REQUIRE(run("compile " + kSamples + "/nand.net -o " + crn.string()) == 0);
    REQUIRE(run("simulate --crn " + crn.string() + " --schedule " + kSamples + "/nand_schedule.json -o " +
                (scratch() / "t.csv").string() + " --svg " + svg.string()) == 0);
    const std::string s = slurp(svg);
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("verify and sweep exit codes")
{
    const std::string files = "--crn " + (scratch() / "nand_crn3.json").string() + " --schedule " + kSamples +
                              "/nand_schedule.json --intervals " + kSamples + "/nand_intervals.json";
    REQUIRE(run("compile " + kSamples + "/nand.net -o " + (scratch() / "nand_crn3.json").string()) == 0);
    CHECK(run("verify " + files) == 0);
    CHECK(run("sweep " + files + " --trials 3 --noise sinusoidal --seed 1") == 0);
    const fs::path wrong = scratch() / "wrong_intervals.json";
    std::ofstream(wrong) << R"([{"t1": 0, "t2": 3, "tag": "phi11", "expected": {"Y": 1}}])";
    CHECK(run("verify --crn " + (scratch() / "nand_crn3.json").string() + " --schedule " + kSamples +
              "/nand_schedule.json --intervals " + wrong.string()) == 1);
    CHECK(run("sweep --scenario xor --trials 2 --noise random") == 0);
    CHECK(run("verify --netlist " + kSamples + "/half_adder.net") == 0);
}

TEST_CASE("input errors")
{
    CHECK(run("compile /nonexistent.net") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("demo nosuch") == 2);
    CHECK(run("sweep --scenario nand --delta 1,2") == 2);
    CHECK(run("sweep --scenario nand --tau -1") == 2);
    CHECK(run("simulate --crn " + kSamples + "/xor.net --horizon 1") == 2);
    CHECK(run("verify --crn " + kSamples + "/decay.json") == 2);
}

TEST_CASE("simulation failure exit code")
{
    const fs::path crn = scratch() / "blowup.json";
    std::ofstream(crn) << R"({"inputs":[],"states":["A"],"reactions":[{"reactants":{"A":2},"products":{"A":3},"k":1}],"x0":{"A":1}})";
    CHECK(run("simulate --crn " + crn.string() + " --horizon 2 -o " + (scratch() / "b.csv").string(), "blowup") == 3);
    CHECK(slurp(scratch() / "blowup.log").find("simulation failed") != std::string::npos);
}

TEST_CASE("lemma table")
{
    CHECK(run("lemmas", "lemmas") == 0);
    const int grid = run("lemmas --grid", "grid");
    CHECK((grid == 0 || grid == 1));
    CHECK(slurp(scratch() / "grid.log").find("81 points") != std::string::npos);
}
