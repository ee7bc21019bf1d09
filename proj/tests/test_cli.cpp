#include "gysinkit/cli/commands.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gysinkit;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args, const cli::Context& ctx = {})
{
    args.insert(args.begin(), "gysinkit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err, ctx);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::string data(const std::string& name) { return std::string(GYSINKIT_DATA_DIR) + "/" + name; }

class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("gysinkit_cli_test_" + std::to_string(::getpid()) + "_" +
                                              std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

json read(const std::string& path)
{
    std::ifstream f(path);
    return json::parse(f);
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

} // namespace

TEST(CliCrit, ChekanovQuadricHasFourPoints)
{
    TempDir tmp;
    const auto o = run_cli({"--out", tmp.file("r.json"), "crit", "--family", "chekanov_q2"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto r = read(tmp.file("r.json"));
    EXPECT_EQ(r["command"], "crit");
    ASSERT_EQ(r["points"].size(), 4u);
    EXPECT_EQ(r["nondegenerate_count"], 4);
    EXPECT_NE(o.out.find("critical points: 4"), std::string::npos);
}

TEST(CliCrit, PolyFileMatchesBuiltin)
{
    TempDir tmp;
    ASSERT_EQ(run_cli({"--out", tmp.file("a.json"), "crit", "--family", "chekanov_q2"}).code, 0);
    ASSERT_EQ(run_cli({"--out", tmp.file("b.json"), "crit", "--poly", data("chekanov_q2_poly.json")}).code, 0);
    EXPECT_EQ(read(tmp.file("a.json"))["points"], read(tmp.file("b.json"))["points"]);
}

TEST(CliCrit, ProjectivePlaneAndQuadric)
{
    EXPECT_NE(run_cli({"crit", "--family", "clifford_cp", "--n", "2"}).out.find("critical points: 3"),
              std::string::npos);
    EXPECT_NE(run_cli({"crit", "--family", "gz_quadric", "--n", "3"}).out.find("critical points: 3"),
              std::string::npos);
}

TEST(CliCrit, ConfigErrors)
{
    EXPECT_EQ(run_cli({"crit"}).code, 2);
    EXPECT_EQ(run_cli({"crit", "--family", "nope"}).code, 2);
    EXPECT_EQ(run_cli({"crit", "--family", "clifford_cp", "--n", "2", "--dedupe", "-1"}).code, 2);
    EXPECT_EQ(run_cli({"crit", "--family", "clifford_cp", "--n", "0"}).code, 2);
    EXPECT_EQ(run_cli({"crit", "--bogus"}).code, 2);
    EXPECT_EQ(run_cli({}).code, 2);
}

TEST(CliSplit, ProjectiveSpaceOverThreeLattices)
{
    for (const auto& [lattice, factors] : std::vector<std::pair<std::string, int>>{{"1", 1}, {"2", 2}, {"4", 4}}) {
        TempDir tmp;
        const auto o = run_cli({"--out", tmp.file("s.json"), "split", "--cpn", "3", "--lattice", lattice});
        ASSERT_EQ(o.code, 0) << o.err;
        const auto r = read(tmp.file("s.json"));
        EXPECT_EQ(r["factor_count"], factors) << "lattice " << lattice;
        EXPECT_TRUE(r["verification"]["passed"].get<bool>());
        EXPECT_TRUE(r["passed"].get<bool>());
    }
}

TEST(CliSplit, PresentationFiles)
{
    for (const char* name : {"quadric_q2.json", "quadric_q3.json"}) {
        TempDir tmp;
        const auto o = run_cli({"--out", tmp.file("s.json"), "split", "--presentation", data(name)});
        ASSERT_EQ(o.code, 0) << name << ": " << o.err << o.out;
        EXPECT_EQ(read(tmp.file("s.json"))["factor_count"], 2) << name;
    }
    const auto cyc = run_cli({"split", "--presentation", data("cp3_cyclic.json"), "--lattice", "4"});
    EXPECT_EQ(cyc.code, 0);
    EXPECT_NE(cyc.out.find("field factors over (1/4)Z: 4"), std::string::npos);
}

TEST(CliSplit, NonSemisimpleTableFails)
{
    TempDir tmp;
    // K[h]/(h^2)
    write(tmp.file("nil.json"), R"({"type":"table","dim":2,"lattice_denominator":1,"products":[
        [0,0,[[["0",[1,0]]],[]]],[0,1,[[],[["0",[1,0]]]]],[1,0,[[],[["0",[1,0]]]]],[1,1,[[],[]]]]})");
    EXPECT_EQ(run_cli({"split", "--presentation", tmp.file("nil.json")}).code, 1);
}

TEST(CliSplit, MalformedInputIsAConfigError)
{
    TempDir tmp;
    write(tmp.file("bad.json"), "{not json");
    EXPECT_EQ(run_cli({"split", "--presentation", tmp.file("bad.json")}).code, 2);
    EXPECT_EQ(run_cli({"split", "--presentation", tmp.file("missing.json")}).code, 2);
    write(tmp.file("shape.json"), R"({"type":"cyclic","m":"four"})");
    EXPECT_EQ(run_cli({"split", "--presentation", tmp.file("shape.json")}).code, 2);
    // b0 * b1 = b1 but b1 * b0 = 0: not commutative
    write(tmp.file("noncomm.json"), R"({"type":"table","dim":2,"lattice_denominator":1,"products":[
        [0,0,[[["0",[1,0]]],[]]],[0,1,[[],[["0",[1,0]]]]],[1,0,[[],[]]],[1,1,[[],[["0",[1,0]]]]]]})");
    EXPECT_EQ(run_cli({"split", "--presentation", tmp.file("noncomm.json")}).code, 2);
    EXPECT_EQ(run_cli({"split", "--cpn", "3", "--presentation", data("cp3_cyclic.json")}).code, 2);
    EXPECT_EQ(run_cli({"split", "--cpn", "3", "--lattice", "-2"}).code, 2);
}

TEST(CliReduce, BuiltinPairs)
{
    struct Case {
        std::vector<std::string> args;
        std::string constant;
    };
    const std::vector<Case> cases{{{"--pair", "cpn", "--n", "5"}, "5/6"},
                                  {{"--pair", "quadric", "--n", "4"}, "3/4"},
                                  {{"--pair", "cp3_q2"}, "1/2"},
                                  {{"--kappa", "0.5"}, "1/2"}};
    for (const auto& c : cases) {
        TempDir tmp;
        std::vector<std::string> args{"--out", tmp.file("r.json"), "reduce", "--kmax", "200"};
        args.insert(args.end(), c.args.begin(), c.args.end());
        const auto o = run_cli(args);
        ASSERT_EQ(o.code, 0) << o.err << o.out;
        const auto r = read(tmp.file("r.json"));
        EXPECT_EQ(r["reduction_constant_exact"], c.constant);
        EXPECT_TRUE(r["identity"]["passed"].get<bool>());
    }
}

TEST(CliReduce, ConfigErrors)
{
    EXPECT_EQ(run_cli({"reduce"}).code, 2);
    EXPECT_EQ(run_cli({"reduce", "--kappa", "-1"}).code, 2);
    EXPECT_EQ(run_cli({"reduce", "--kappa", "abc"}).code, 2);
    EXPECT_EQ(run_cli({"reduce", "--pair", "torus"}).code, 2);
    EXPECT_EQ(run_cli({"reduce", "--kappa", "1/2", "--epsilon", "0"}).code, 2);
}

TEST(CliGysin, ChekanovPairAtCriticalLift)
{
    TempDir tmp;
    const auto o = run_cli({"--out", tmp.file("g.json"), "gysin", "--pair", "cp3_q2", "--rho-lift", "1,0;1,0;2,0"});
    ASSERT_EQ(o.code, 0) << o.err << o.out;
    const auto r = read(tmp.file("g.json"));
    const auto& q = r["pairs"][0]["queried"];
    EXPECT_TRUE(q["critical"].get<bool>());
    for (const auto& e : q["exactness"]) EXPECT_TRUE(e.get<bool>());
}

TEST(CliGysin, NonCriticalLiftFails)
{
    const auto o = run_cli({"gysin", "--pair", "cp3_q2", "--rho-lift", "1,0;1,0;1,0"});
    EXPECT_EQ(o.code, 1);
    EXPECT_NE(o.out.find("(nonzero)"), std::string::npos);
    EXPECT_EQ(run_cli({"gysin", "--pair", "cp3_q2", "--rho-lift", "1,0;1,0"}).code, 2);
    EXPECT_EQ(run_cli({"gysin", "--pair", "cp3_q2", "--rho-lift", "x"}).code, 2);
    EXPECT_EQ(run_cli({"gysin", "--pair", "torus"}).code, 2);
}

TEST(CliGysin, NonzeroEulerNumberFails)
{
    EXPECT_EQ(run_cli({"gysin", "--pair", "cp3_q2", "--rho-lift", "1,0;1,0;2,0", "--euler", "3"}).code, 1);
}

TEST(CliGysin, CpnPairSweep)
{
    const auto o = run_cli({"gysin", "--pair", "cpn", "--n", "3"});
    EXPECT_EQ(o.code, 0) << o.out;
    EXPECT_NE(o.out.find("critical lifted local systems: 4, delta = 0 at 4"), std::string::npos);
}

TEST(CliAxioms, DefaultsPassAndBrokenSolverFails)
{
    EXPECT_EQ(run_cli({"axioms"}).code, 0);
    EXPECT_EQ(run_cli({"axioms", "--seeds", "0"}).code, 2);
    cli::Context broken;
    broken.solver = [](const FilteredComplex& c, const Chain& x) { return -spectral_number(c, x); };
    const auto o = run_cli({"axioms", "--seeds", "20", "--instances", "5"}, broken);
    EXPECT_EQ(o.code, 1);
}

TEST(CliConfig, TomlFileSelectsTheCommand)
{
    TempDir tmp;
    const auto o = run_cli({"--config", data("example_split.toml"), "--out", tmp.file("s.json"), "split"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto r = read(tmp.file("s.json"));
    EXPECT_EQ(r["factor_count"], 4);
    EXPECT_EQ(r["truncation"], "12");
    EXPECT_EQ(run_cli({"--config", tmp.file("missing.toml"), "split"}).code, 2);
}

TEST(CliConfig, TruncationPrecedence)
{
    TempDir tmp;
    ::setenv("GYSINKIT_TRUNCATION", "7", 1);
    ASSERT_EQ(run_cli({"--out", tmp.file("env.json"), "split", "--cpn", "2"}).code, 0);
    ASSERT_EQ(run_cli({"--out", tmp.file("flag.json"), "--truncation", "5", "split", "--cpn", "2"}).code, 0);
    ::setenv("GYSINKIT_TRUNCATION", "zero", 1);
    EXPECT_EQ(run_cli({"split", "--cpn", "2"}).code, 2);
    ::unsetenv("GYSINKIT_TRUNCATION");
    ASSERT_EQ(run_cli({"--out", tmp.file("default.json"), "split", "--cpn", "2"}).code, 0);
    EXPECT_EQ(read(tmp.file("env.json"))["truncation"], "7");
    EXPECT_EQ(read(tmp.file("flag.json"))["truncation"], "5");
    EXPECT_EQ(read(tmp.file("default.json"))["truncation"], "10");
    EXPECT_EQ(run_cli({"--truncation", "0", "split", "--cpn", "2"}).code, 2);
}

TEST(CliReports, DeterministicWithVersionAndHash)
{
    TempDir tmp;
    for (const char* name : {"a.json", "b.json"})
        ASSERT_EQ(run_cli({"--out", tmp.file(name), "crit", "--family", "clifford_cp", "--n", "2"}).code, 0);
    EXPECT_EQ(slurp(tmp.file("a.json")), slurp(tmp.file("b.json")));
    const auto r = read(tmp.file("a.json"));
    EXPECT_EQ(r["tool_version"], std::string(kVersion));
    EXPECT_EQ(r["config_hash"], io::config_hash(r["config"]));

    ASSERT_EQ(run_cli({"--out", tmp.file("c.json"), "crit", "--family", "clifford_cp", "--n", "2", "--grid", "6"}).code,
              0);
    EXPECT_NE(read(tmp.file("c.json"))["config_hash"], r["config_hash"]);
}

TEST(CliReports, VersionFlag)
{
    const auto o = run_cli({"--version"});
    EXPECT_EQ(o.code, 0);
    EXPECT_NE(o.out.find(kVersion), std::string::npos);
}
