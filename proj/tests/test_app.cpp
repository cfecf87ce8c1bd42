#include "sandwichkit/app.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <map>

using namespace sandwichkit;
using app::json;

namespace {

std::filesystem::path corpus()
{
    const char* dir = std::getenv("SANDWICHKIT_SCENARIOS");
    return dir ? std::filesystem::path(dir) : std::filesystem::path("scenarios");
}

const std::map<std::string, int>& expected_exits()
{
    static const std::map<std::string, int> m{
        {"bibivariate.json", 0},
        {"broken.json", 3},
        {"fenchel_boundary_contact.json", 2},
        {"fenchel_closed_subspace.json", 0},
        {"fenchel_sum.json", 0},
        {"indicator_linear.json", 0},
        {"indicator_linear_infinite.json", 2},
        {"interiority_covering.json", 0},
        {"partial_infconv.json", 0},
        {"quadrivariate.json", 0},
        {"sandwich_hypothesis_fails.json", 2},
        {"sandwich_separator.json", 0},
        {"sublevel_automatic_interiority.json", 0},
        {"sublevel_duality.json", 0},
        {"sublevel_equivalence_empty.json", 0},
        {"sublevel_equivalence_shifted.json", 0},
        {"trivariate_boundedness.json", 0},
        {"trivariate_closed_subspace.json", 0},
    };
    return m;
}

app::Options opts(const std::string& command, const std::string& file)
{
    app::Options o;
    o.command = command;
    o.input = file.empty() ? "" : (corpus() / file).string();
    return o;
}

json run_json(const app::Options& o, int* code = nullptr)
{
    auto out = app::run(o);
    if (code)
        *code = out.exit_code;
    return json::parse(out.out);
}

std::filesystem::path write_temp(const std::string& name, const std::string& text)
{
    auto p = std::filesystem::temp_directory_path() / ("sandwichkit_test_" + name);
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST(Corpus, DocumentedExitCodes)
{
    for (const auto& [file, want] : expected_exits()) {
        auto out = app::run(opts("verify", file));
        EXPECT_EQ(out.exit_code, want) << file << "\n" << out.out;
    }
}

TEST(Corpus, EveryFileIsListed)
{
    std::size_t n = 0;
    for (const auto& e : std::filesystem::directory_iterator(corpus()))
        if (e.path().extension() == ".json") {
            ++n;
            EXPECT_TRUE(expected_exits().count(e.path().filename().string())) << e.path();
        }
    EXPECT_EQ(n, expected_exits().size());
}

TEST(Corpus, ReportsAreByteIdenticalAcrossRuns)
{
    for (const auto& [file, want] : expected_exits()) {
        auto a = app::run(opts("verify", file)), b = app::run(opts("verify", file));
        EXPECT_EQ(a.out, b.out) << file;
    }
}

TEST(Verify, FenchelSumReport)
{
    int code = -1;
    auto rep = run_json(opts("verify", "fenchel_sum.json"), &code);
    EXPECT_EQ(code, 0);
    EXPECT_EQ(rep["kind"], "fenchel");
    const auto& r = rep["records"][0];
    EXPECT_EQ(r["lhs"], "2");
    EXPECT_EQ(r["gap"], "0");
    EXPECT_EQ(r["witness"], json::array({"1"}));
    EXPECT_EQ(rep["input_digest"].get<std::string>().rfind("sha256:", 0), 0u);
}

TEST(Verify, BrokenFileNamesMapAndFunction)
{
    int code = -1;
    auto rep = run_json(opts("verify", "broken.json"), &code);
    EXPECT_EQ(code, 3);
    const std::string err = rep["error"];
    EXPECT_NE(err.find("'C'"), std::string::npos) << err;
    EXPECT_NE(err.find("'g'"), std::string::npos) << err;
}

TEST(Verify, MissingFileIsAnInputError)
{
    EXPECT_EQ(app::run(opts("verify", "no_such_file.json")).exit_code, 3);
}

TEST(Verify, SyntaxErrorCitesLine)
{
    auto p = write_temp("syntax.json", "{\n  \"task\": {\n    \"kind\": \"fenchel\",,\n  }\n}\n");
    app::Options o;
    o.command = "verify";
    o.input = p.string();
    auto out = app::run(o);
    EXPECT_EQ(out.exit_code, 3);
    EXPECT_NE(out.err.find("line 3"), std::string::npos) << out.err;
}

TEST(Verify, FloatModeAgreesOnTheWorkedExample)
{
    auto o = opts("verify", "fenchel_sum.json");
    o.mode = "float";
    o.tolerance = "1/1000000000";
    int code = -1;
    auto rep = run_json(o, &code);
    EXPECT_EQ(code, 0);
    EXPECT_EQ(rep["mode"], "float");
    EXPECT_EQ(rep["records"][0]["verdict"], "pass");
}

TEST(Verify, CrosscheckAttachesOracleBrackets)
{
    auto o = opts("verify", "fenchel_sum.json");
    o.crosscheck = true;
    int code = -1;
    auto rep = run_json(o, &code);
    EXPECT_EQ(code, 0);
    const auto& cc = rep["records"][0]["crosscheck"];
    ASSERT_TRUE(cc.is_object()) << rep.dump(2);
    EXPECT_EQ(cc["agrees"], true);
}

TEST(Verify, DirectoryBatchIsOrderedByFilename)
{
    app::Options o;
    o.command = "verify";
    o.input = corpus().string();
    int code = -1;
    auto rep = run_json(o, &code);
    EXPECT_EQ(code, 3);  // broken.json dominates
    std::vector<std::string> names;
    for (const auto& r : rep["reports"])
        names.push_back(r["file"]);
    EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
    EXPECT_EQ(names.size(), expected_exits().size());
}

TEST(Commands, TheoremTwentyOnTheEmptyLevel)
{
    int code = -1;
    auto rep = run_json(opts("theorem20", "sublevel_equivalence_empty.json"), &code);
    EXPECT_EQ(code, 0);
    const auto& r = rep["records"][0];
    EXPECT_EQ(r["interior"], false);
    EXPECT_EQ(r["zero_in_image"], false);
    EXPECT_EQ(r["gamma_above_fiber_inf"], false);
}

TEST(Commands, SandwichSeparator)
{
    int code = -1;
    auto rep = run_json(opts("sandwich", "sandwich_separator.json"), &code);
    EXPECT_EQ(code, 0);
    bool found = false;
    for (const auto& r : rep["records"])
        if (r.contains("separator")) {
            EXPECT_EQ(r["separator"], json::array({"1"}));
            found = true;
        }
    EXPECT_TRUE(found) << rep.dump(2);
}

TEST(Commands, InteriorityMargin)
{
    int code = -1;
    auto rep = run_json(opts("interiority", "interiority_covering.json"), &code);
    EXPECT_EQ(code, 0) << rep.dump(2);
}

TEST(Commands, EvalAndConjugate)
{
    auto o = opts("eval", "fenchel_sum.json");
    o.function = "g";
    o.at = "1/2";
    auto rep = run_json(o);
    EXPECT_EQ(rep["records"][0]["value"], "1/2");
    o.at = "3";
    EXPECT_EQ(run_json(o)["records"][0]["value"], "+inf");
    o.command = "conjugate";
    o.function = "g";
    o.at = "3";
    rep = run_json(o);
    EXPECT_EQ(rep["records"][0]["value"], "4");
    EXPECT_EQ(rep["records"][0]["maximizer"], json::array({"2"}));
}

TEST(Commands, EvalNeedsFunctionAndPoint)
{
    EXPECT_EQ(app::run(opts("eval", "fenchel_sum.json")).exit_code, 3);
    auto o = opts("eval", "fenchel_sum.json");
    o.function = "g";
    o.at = "1,2";
    EXPECT_EQ(app::run(o).exit_code, 3);
}

TEST(Commands, UnknownCommandAndOptions)
{
    EXPECT_EQ(app::run(opts("frobnicate", "fenchel_sum.json")).exit_code, 3);
    auto o = opts("verify", "fenchel_sum.json");
    o.mode = "fast";
    EXPECT_EQ(app::run(o).exit_code, 3);
    o = opts("verify", "fenchel_sum.json");
    o.report = "yaml";
    EXPECT_EQ(app::run(o).exit_code, 3);
}

TEST(Report, TextRenderingCarriesTheVerdict)
{
    auto o = opts("verify", "fenchel_sum.json");
    o.report = "text";
    auto out = app::run(o);
    EXPECT_EQ(out.exit_code, 0);
    EXPECT_NE(out.out.find("verdict: pass"), std::string::npos) << out.out;
    EXPECT_NE(out.out.find("witness: (1)"), std::string::npos) << out.out;
}

TEST(Report, ExitCodePrecedence)
{
    EXPECT_EQ(app::combine_exit(0, 2), 2);
    EXPECT_EQ(app::combine_exit(2, 1), 1);
    EXPECT_EQ(app::combine_exit(1, 3), 3);
    EXPECT_EQ(app::combine_exit(3, 0), 3);
}

TEST(Report, DigestIsSha256)
{
    EXPECT_EQ(app::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
